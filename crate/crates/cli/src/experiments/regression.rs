use std::time::Instant;

use dequant_core::fourier::{gd_train, least_squares, mnls, null_space_projection, separation_bounds, GdOptions};
use dequant_core::{Dataset, FeatureMap, FrequencySet, SeededRng, WeightVector};
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use super::{gaussian_vec, max_of};
use crate::config::{MnlsGdParams, SeparationParams};
use crate::report::{Check, Report, Table};
use crate::LabError;

struct GdRow {
    dim: usize,
    p: usize,
    m: usize,
    iterations: usize,
    converged: bool,
    residual: f64,
    rel_error: f64,
}

fn gd_instance(p: &MnlsGdParams, rng: &mut SeededRng) -> Result<GdRow, LabError> {
    let dim = rng.random_range(1..=p.max_dim);
    let m = rng.random_range(2..=p.max_points);
    let max_pairs = (p.max_features - 1) / 2;
    let pairs = rng.random_range(m..=max_pairs);
    let fm = FeatureMap::new(FrequencySet::half_lattice(dim, pairs, true)?);
    let xs = fm.sample_inputs(m, rng);
    let y = gaussian_vec(m, rng);
    let ds = Dataset::with_domain(xs, y, fm.period())?;
    let target = mnls(&fm, &ds)?;
    let opts = GdOptions {
        max_iters: p.max_iters,
        tol: p.residual_tol,
        ..GdOptions::default()
    };
    let traj = gd_train(&fm, &ds, &opts)?;
    Ok(GdRow {
        dim,
        p: fm.p(),
        m,
        iterations: traj.iterations,
        converged: traj.converged,
        residual: traj.final_residual,
        rel_error: traj.final_beta.sub(&target).norm() / target.norm(),
    })
}

pub(super) fn mnls_gd(p: &MnlsGdParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let start = Instant::now();
    let gd_stream = rng.fork(1);
    let rows = (0..p.instances)
        .into_par_iter()
        .map(|i| gd_instance(p, &mut gd_stream.fork(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut table = Table::new(
        "gd_convergence",
        &["instance", "dim", "features", "points", "iterations", "converged", "final_residual", "relative_error"],
    );
    for (i, r) in rows.iter().enumerate() {
        table.push(vec![
            i.into(),
            r.dim.into(),
            r.p.into(),
            r.m.into(),
            r.iterations.into(),
            r.converged.into(),
            r.residual.into(),
            r.rel_error.into(),
        ]);
    }
    let worst = max_of(rows.iter().map(|r| r.rel_error));
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    report.metric("max_relative_error", worst);
    report.metric("max_iterations", max_of(rows.iter().map(|r| r.iterations as f64)));
    report.checks.push(Check::at_most("gd_relative_error_max", 1, worst, p.rel_tol));
    report.checks.push(Check::at_most("gd_unconverged_instances", 1, unconverged as f64, 0.0));
    report.runtime_checks.push(Check::at_most("gd_runtime_seconds", 1, elapsed, p.max_seconds));
    report.tables.push(table);

    let rec_stream = rng.fork(2);
    let mut recovery = Table::new("recovery", &["instance", "dim", "features", "points", "max_abs_error"]);
    let mut worst_rec: f64 = 0.0;
    for i in 0..p.recovery_instances {
        let mut r = rec_stream.fork(i as u64);
        let dim = r.random_range(1..=p.max_dim);
        let m = r.random_range(p.max_points.min(20)..=p.max_points);
        // Keep M >= 2p so the planted system is well conditioned.
        let pairs = r.random_range(1..=((m / 2).saturating_sub(1) / 2).max(1));
        let fm = FeatureMap::new(FrequencySet::half_lattice(dim, pairs, true)?);
        let beta = WeightVector::new(gaussian_vec(fm.p(), &mut r));
        let xs = fm.sample_inputs(m, &mut r);
        let ds = Dataset::planted(&fm, xs, &beta)?;
        let fit = least_squares(&fm, &ds)?;
        let err = max_of(fit.as_slice().iter().zip(beta.as_slice()).map(|(a, b)| (a - b).abs()));
        worst_rec = worst_rec.max(err);
        recovery.push(vec![i.into(), dim.into(), fm.p().into(), m.into(), err.into()]);
    }
    report.metric("max_recovery_error", worst_rec);
    report.checks.push(Check::at_most("recovery_max_abs_error", 2, worst_rec, p.recovery_tol));
    report.tables.push(recovery);
    Ok(())
}

pub(super) fn separation(p: &SeparationParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let fm = FeatureMap::new(FrequencySet::half_lattice(p.dim, p.frequencies, true)?);
    let records = (0..p.pairs)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.fork(i as u64);
            let xs = fm.sample_inputs(p.points, &mut r);
            let y = gaussian_vec(p.points, &mut r);
            let ds = Dataset::with_domain(xs, y, fm.period())?;
            let beta_mnls = mnls(&fm, &ds)?;
            let proj = null_space_projection(&fm.data_matrix(ds.inputs())?)?;
            let raw = DVector::from_vec(gaussian_vec(fm.p(), &mut r)) * p.perturbation_scale;
            let u = WeightVector::new((proj * raw).iter().copied().collect());
            let beta_q = beta_mnls.add(&u);
            Ok(separation_bounds(&fm, &beta_q, &beta_mnls, &ds, p.grid, &mut r)?)
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut table = Table::new(
        "separation",
        &[
            "pair",
            "sup_grid",
            "sup_refined",
            "norm_gap",
            "norm_difference",
            "max_feature_norm",
            "reverse_constant",
            "forward_holds",
            "reverse_holds",
        ],
    );
    for (i, s) in records.iter().enumerate() {
        table.push(vec![
            i.into(),
            s.lhs_sup.into(),
            s.lhs_sup_refined.into(),
            s.rhs_norm_gap.into(),
            s.norm_difference.into(),
            s.lipschitz_l.into(),
            s.reverse_c.into(),
            s.forward_holds.into(),
            s.reverse_holds.into(),
        ]);
    }
    let excess = max_of(records.iter().map(|s| s.lhs_sup - s.rhs_norm_gap));
    let excess_refined = max_of(records.iter().map(|s| s.lhs_sup_refined - s.rhs_norm_gap));
    report.metric("max_grid_excess", excess);
    report.metric("max_refined_excess", excess_refined);
    report.metric(
        "reverse_holds_fraction",
        records.iter().filter(|s| s.reverse_holds).count() as f64 / records.len() as f64,
    );
    report.checks.push(Check::at_most("sup_minus_norm_gap_max", 10, excess.max(excess_refined), p.tol));
    report.tables.push(table);
    Ok(())
}
