use std::collections::BTreeMap;
use std::time::Instant;

use dequant_core::numeric::haar_unitary;
use dequant_core::quantum::{
    beta_norm_variance_prediction, expected_beta_norm_reuploading, expected_beta_norm_simple, fft_coeffs_oracle,
    monte_carlo_norm_stats, oracle_grid, ModelKind, NormStats,
};
use dequant_core::stats::{linear_fit, variance_stderr, Summary};
use dequant_core::{DiagonalEncoding, GolombRuler, Observable, QuantumModel, SeededRng};
use rand::Rng;
use rayon::prelude::*;

use super::max_of;
use crate::config::{QnormReuploadingParams, QnormSimpleParams};
use crate::report::{Check, Report, Table};
use crate::LabError;

fn random_model(enc: &DiagonalEncoding, o: &Observable, kind: ModelKind, rng: &mut SeededRng) -> Result<QuantumModel, LabError> {
    let n = enc.dim();
    Ok(match kind {
        ModelKind::Simple => QuantumModel::simple(enc, haar_unitary(n, rng)?, o)?,
        ModelKind::Reuploading => {
            let v1 = haar_unitary(n, rng)?;
            let v2 = haar_unitary(n, rng)?;
            QuantumModel::reuploading(enc, v1, v2, o)?
        }
    })
}

fn kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Simple => "simple",
        ModelKind::Reuploading => "reuploading",
    }
}

fn golomb_encoding(marks: usize) -> Result<DiagonalEncoding, LabError> {
    Ok(DiagonalEncoding::golomb(&GolombRuler::greedy(marks)?)?)
}

struct FftRow {
    family: &'static str,
    instance: usize,
    qubits: u32,
    kind: ModelKind,
    grid: usize,
    diff: f64,
    off_support: f64,
    c0: f64,
}

fn fft_agreement(p: &QnormSimpleParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let families: [&'static str; 2] = ["ternary", "golomb"];
    let mut rows = Vec::new();
    for (f, family) in families.iter().enumerate() {
        let stream = rng.fork(f as u64);
        let part = (0..p.fft_instances)
            .into_par_iter()
            .map(|t| {
                let qubits = 1 + (t as u32 % p.fft_max_qubits);
                let enc = match *family {
                    "ternary" => DiagonalEncoding::ternary(qubits)?,
                    _ => golomb_encoding(1 << qubits)?,
                };
                let o = Observable::default_for(enc.dim())?;
                let kind = if t % 2 == 0 { ModelKind::Simple } else { ModelKind::Reuploading };
                let model = random_model(&enc, &o, kind, &mut stream.fork(t as u64))?;
                let analytic = model.coeffs();
                let grid = oracle_grid(&enc);
                let fft = fft_coeffs_oracle(&|x| model.eval(x), &enc, grid)?;
                Ok(FftRow {
                    family,
                    instance: t,
                    qubits,
                    kind,
                    grid,
                    diff: analytic.max_abs_difference(&fft.coeffs),
                    off_support: fft.off_support_max,
                    c0: analytic.constant().norm(),
                })
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        rows.extend(part);
    }
    let mut table = Table::new(
        "coefficient_agreement",
        &["encoding", "instance", "qubits", "model", "grid", "max_abs_difference", "off_support_max", "c0_abs"],
    );
    for r in &rows {
        table.push(vec![
            r.family.into(),
            r.instance.into(),
            r.qubits.into(),
            kind_name(r.kind).into(),
            r.grid.into(),
            r.diff.into(),
            r.off_support.into(),
            r.c0.into(),
        ]);
    }
    let diff = max_of(rows.iter().map(|r| r.diff));
    let off = max_of(rows.iter().map(|r| r.off_support));
    let c0 = max_of(rows.iter().filter(|r| r.kind == ModelKind::Simple).map(|r| r.c0));
    report.tables.push(table);
    report.metric("fft_max_abs_difference", diff);
    report.checks.push(Check::at_most("fft_max_abs_difference", 5, diff, p.fft_tol));
    report.checks.push(Check::at_most("fft_off_support_max", 5, off, p.fft_tol));
    report.checks.push(Check::at_most("traceless_c0_abs_max", 5, c0, 0.0));
    Ok(())
}

fn simple_stats(enc: &DiagonalEncoding, trials: usize, rng: &SeededRng) -> Result<NormStats, LabError> {
    let o = Observable::default_for(enc.dim())?;
    Ok(monte_carlo_norm_stats(enc, &o, ModelKind::Simple, trials, rng)?)
}

fn scaling_table(name: &str, x_name: &str) -> Table {
    Table::new(
        name,
        &[
            x_name,
            "dim",
            "features",
            "trials",
            "norm_sq_mean",
            "norm_sq_stderr",
            "expected",
            "z",
            "frequency_count_scaling",
        ],
    )
}

pub(super) fn qnorm_simple(p: &QnormSimpleParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    fft_agreement(p, &rng.fork(1), report)?;

    let start = Instant::now();
    let ternary_stream = rng.fork(2);
    let mut ternary_stats = BTreeMap::new();
    let mut table = scaling_table("ternary_scaling", "qubits");
    let (mut xs, mut ys, mut exact) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &p.ternary_qubits {
        let enc = DiagonalEncoding::ternary(n)?;
        let stats = simple_stats(&enc, p.trials, &ternary_stream.fork(n as u64))?;
        let pred = expected_beta_norm_simple(&enc, &Observable::default_for(enc.dim())?)?;
        table.push(vec![
            n.into(),
            enc.dim().into(),
            pred.p.into(),
            p.trials.into(),
            stats.norm_sq.mean.into(),
            stats.norm_sq.stderr.into(),
            pred.expected.into(),
            stats.norm_sq.z_score(pred.expected).into(),
            pred.paper_scaling.into(),
        ]);
        xs.push(n as f64);
        ys.push(stats.norm_sq.mean.ln());
        exact.push(pred.expected.ln());
        ternary_stats.insert(n, stats);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let target = 1.5f64.ln();
    let (slope, _) = linear_fit(&xs, &ys);
    let (slope_exact, _) = linear_fit(&xs, &exact);
    report.tables.push(table);
    report.metric("ternary_exponent", slope);
    report.metric("ternary_exponent_exact_prediction", slope_exact);
    report.checks.push(Check::within(
        "ternary_norm_exponent",
        6,
        slope,
        target * (1.0 - p.slope_rel_tol),
        target * (1.0 + p.slope_rel_tol),
    ));
    report.runtime_checks.push(Check::at_most("ternary_runtime_seconds", 6, elapsed, p.max_seconds));

    let golomb_stream = rng.fork(3);
    let mut table = scaling_table("golomb_scaling", "marks");
    let (mut xs, mut ys, mut exact) = (Vec::new(), Vec::new(), Vec::new());
    for &m in &p.golomb_marks {
        let enc = golomb_encoding(m)?;
        let stats = simple_stats(&enc, p.trials, &golomb_stream.fork(m as u64))?;
        let pred = expected_beta_norm_simple(&enc, &Observable::default_for(m)?)?;
        table.push(vec![
            m.into(),
            enc.dim().into(),
            pred.p.into(),
            p.trials.into(),
            stats.norm_sq.mean.into(),
            stats.norm_sq.stderr.into(),
            pred.expected.into(),
            stats.norm_sq.z_score(pred.expected).into(),
            pred.paper_scaling.into(),
        ]);
        xs.push((m as f64).ln());
        ys.push(stats.norm_sq.mean.ln());
        exact.push(pred.expected.ln());
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let (slope_exact, _) = linear_fit(&xs, &exact);
    report.tables.push(table);
    report.metric("golomb_exponent", slope);
    report.metric("golomb_exponent_exact_prediction", slope_exact);
    report.checks.push(Check::within(
        "golomb_norm_exponent",
        7,
        slope,
        1.0 - p.slope_rel_tol,
        1.0 + p.slope_rel_tol,
    ));

    let mut table = Table::new(
        "moments",
        &[
            "qubits",
            "norm_sq_mean",
            "norm_sq_stderr",
            "expected",
            "z",
            "norm_sq_variance",
            "norm_sq_variance_stderr",
            "variance_prediction",
            "variance_ratio",
        ],
    );
    for &n in &p.moment_qubits {
        let enc = DiagonalEncoding::ternary(n)?;
        let stats = match ternary_stats.remove(&n) {
            Some(s) => s,
            None => simple_stats(&enc, p.trials, &ternary_stream.fork(n as u64))?,
        };
        let o = Observable::default_for(enc.dim())?;
        let pred = expected_beta_norm_simple(&enc, &o)?;
        let var_pred = beta_norm_variance_prediction(&enc, &o)?;
        let z = stats.norm_sq.z_score(pred.expected);
        let ratio = stats.norm_sq.variance / var_pred;
        table.push(vec![
            n.into(),
            stats.norm_sq.mean.into(),
            stats.norm_sq.stderr.into(),
            pred.expected.into(),
            z.into(),
            stats.norm_sq.variance.into(),
            stats.norm_sq_variance_stderr.into(),
            var_pred.into(),
            ratio.into(),
        ]);
        report.checks.push(Check::at_most(&format!("mean_norm_abs_z_n{n}"), 8, z.abs(), p.mean_max_z));
        report.checks.push(Check::within(
            &format!("variance_ratio_n{n}"),
            8,
            ratio,
            1.0 / p.variance_factor,
            p.variance_factor,
        ));
    }
    report.tables.push(table);
    Ok(())
}

pub(super) fn qnorm_reuploading(
    p: &QnormReuploadingParams,
    rng: &SeededRng,
    report: &mut Report,
) -> Result<(), LabError> {
    let enc = DiagonalEncoding::ternary(p.qubits)?;
    let o = Observable::default_for(enc.dim())?;
    let stats = monte_carlo_norm_stats(&enc, &o, ModelKind::Reuploading, p.trials, &rng.fork(1))?;
    let pred = expected_beta_norm_reuploading(&enc, &o)?;
    let z_formula = stats.full_spectrum.z_score(pred.formula);
    let z_exact_full = stats.full_spectrum.z_score(pred.exact_full_spectrum);
    let z_exact = stats.norm_sq.z_score(pred.exact);

    let mut table = Table::new("reuploading_norm", &["quantity", "monte_carlo_mean", "stderr", "prediction", "z"]);
    table.push(vec![
        "full_spectrum_vs_formula".into(),
        stats.full_spectrum.mean.into(),
        stats.full_spectrum.stderr.into(),
        pred.formula.into(),
        z_formula.into(),
    ]);
    table.push(vec![
        "full_spectrum_vs_exact".into(),
        stats.full_spectrum.mean.into(),
        stats.full_spectrum.stderr.into(),
        pred.exact_full_spectrum.into(),
        z_exact_full.into(),
    ]);
    table.push(vec![
        "weight_norm_vs_exact".into(),
        stats.norm_sq.mean.into(),
        stats.norm_sq.stderr.into(),
        pred.exact.into(),
        z_exact.into(),
    ]);
    report.tables.push(table);
    report.metric("formula", pred.formula);
    report.metric("exact_full_spectrum", pred.exact_full_spectrum);
    report.metric("convention_ratio", pred.exact / pred.exact_full_spectrum);
    report.metric("full_spectrum_mean", stats.full_spectrum.mean);
    report.checks.push(Check::at_most("reuploading_formula_abs_z", 9, z_formula.abs(), p.max_z));

    let fm = enc.feature_map();
    let link_stream = rng.fork(2);
    let rows = (0..p.link_instances)
        .into_par_iter()
        .map(|i| {
            let mut r = link_stream.fork(i as u64);
            let kind = if i % 2 == 0 { ModelKind::Reuploading } else { ModelKind::Simple };
            let model = random_model(&enc, &o, kind, &mut r)?;
            let beta = model.coeffs().to_beta(&fm)?;
            let period = enc.period();
            let values: Vec<f64> = (0..p.link_mc_points)
                .map(|_| model.eval(r.random::<f64>() * period))
                .collect();
            let var = Summary::of(&values).variance;
            let stderr = variance_stderr(&values);
            let exact = fm.function_variance(&beta)?;
            Ok((kind, var, stderr, exact))
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let mut table = Table::new(
        "concentration_link",
        &["instance", "model", "variance_mc", "variance_stderr", "variance_parseval", "z"],
    );
    let mut worst: f64 = 0.0;
    for (i, (kind, var, stderr, exact)) in rows.iter().enumerate() {
        let z = (var - exact) / stderr;
        worst = worst.max(z.abs());
        table.push(vec![
            i.into(),
            kind_name(*kind).into(),
            (*var).into(),
            (*stderr).into(),
            (*exact).into(),
            z.into(),
        ]);
    }
    report.tables.push(table);
    report.checks.push(Check::at_most("variance_parseval_abs_z_max", 13, worst, p.link_max_z));
    Ok(())
}
