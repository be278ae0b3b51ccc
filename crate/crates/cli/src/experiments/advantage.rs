use dequant_core::fourier::{empirical_risk, mnls};
use dequant_core::numeric::haar_unitary;
use dequant_core::rff::{estimator_training_risk, refit_estimator, sample_feature_indices, SamplingDistribution};
use dequant_core::{Dataset, DiagonalEncoding, FeatureMap, Observable, QuantumModel, SeededRng, WeightVector};

use crate::config::AdvantageDemoParams;
use crate::report::{Check, Report, Table};
use crate::LabError;

struct Fit {
    norm_mnls: f64,
    train_mnls: f64,
    gen_mnls: f64,
    norm_rff: f64,
    train_rff: f64,
    gen_rff: f64,
}

fn fit_at(
    fm: &FeatureMap,
    model: &QuantumModel,
    beta_q: &WeightVector,
    m: usize,
    p: &AdvantageDemoParams,
    rng: &mut SeededRng,
) -> Result<Fit, LabError> {
    let xs = fm.sample_inputs(m, rng);
    let y: Vec<f64> = xs.iter().map(|x| model.eval(x[0])).collect();
    let ds = Dataset::with_domain(xs, y, fm.period())?;
    let beta = mnls(fm, &ds)?;
    let samples = sample_feature_indices(&SamplingDistribution::uniform(fm.p())?, p.draws, rng)?;
    let est = refit_estimator(fm, &samples, &ds, p.ridge)?;
    let w = est.to_weights(fm.p());
    Ok(Fit {
        norm_mnls: beta.norm_sq(),
        train_mnls: empirical_risk(fm, &beta, &ds)?,
        gen_mnls: fm.parseval_distance(&beta, beta_q)?.powi(2),
        norm_rff: w.norm_sq(),
        train_rff: estimator_training_risk(fm, &est, &ds)?,
        gen_rff: fm.parseval_distance(&w, beta_q)?.powi(2),
    })
}

pub(super) fn advantage_demo(p: &AdvantageDemoParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let enc = DiagonalEncoding::ternary(p.qubits)?;
    let fm = enc.feature_map();
    let o = Observable::default_for(enc.dim())?;
    let v = haar_unitary(enc.dim(), &mut rng.fork(0))?;
    let model = QuantumModel::simple(&enc, v, &o)?;
    let beta_q = model.coeffs().to_beta(&fm)?;
    let norm_q = beta_q.norm_sq();

    let mut table = Table::new(
        "advantage",
        &[
            "points",
            "features",
            "draws",
            "target_norm_sq",
            "mnls_norm_sq",
            "mnls_train_mse",
            "mnls_generalization_mse",
            "rff_norm_sq",
            "rff_train_mse",
            "rff_generalization_mse",
        ],
    );
    let sweep = rng.fork(1);
    for &m in &p.points_sweep {
        let f = fit_at(&fm, &model, &beta_q, m, p, &mut sweep.fork(m as u64))?;
        table.push(vec![
            m.into(),
            fm.p().into(),
            p.draws.into(),
            norm_q.into(),
            f.norm_mnls.into(),
            f.train_mnls.into(),
            f.gen_mnls.into(),
            f.norm_rff.into(),
            f.train_rff.into(),
            f.gen_rff.into(),
        ]);
    }
    report.tables.push(table);

    let f = fit_at(&fm, &model, &beta_q, p.points, p, &mut sweep.fork(p.points as u64))?;
    report.metric("target_norm_sq", norm_q);
    report.metric("mnls_norm_sq", f.norm_mnls);
    report.metric("mnls_train_mse", f.train_mnls);
    report.metric("mnls_generalization_mse", f.gen_mnls);
    report.metric("rff_generalization_mse", f.gen_rff);
    report.metric("rff_train_mse", f.train_rff);
    report.checks.push(Check::new("target_norm_minus_mnls_norm", None, norm_q - f.norm_mnls, Some(0.0), None));
    report.checks.push(Check::new(
        "mnls_generalization_mse",
        None,
        f.gen_mnls,
        Some(p.gap_factor * f.train_mnls),
        None,
    ));
    Ok(())
}
