use std::time::Instant;

use dequant_core::rff::{estimator_radius, rff_error_curve, SamplingDistribution};
use dequant_core::stats::linear_fit;
use dequant_core::{FeatureMap, FrequencySet, SeededRng, WeightVector};

use super::{gaussian_vec, max_of};
use crate::config::{RffScalingParams, Sampling};
use crate::report::{Check, Report, Table};
use crate::LabError;

pub(super) fn rff_scaling(p: &RffScalingParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let start = Instant::now();
    let fm = FeatureMap::new(FrequencySet::half_lattice(p.dim, p.frequencies, true)?);
    let target = WeightVector::new(gaussian_vec(fm.p(), &mut rng.fork(0)));
    let q = match p.sampling {
        Sampling::Weights => SamplingDistribution::proportional_to_weights(&target)?,
        Sampling::Uniform => SamplingDistribution::uniform(fm.p())?,
    };
    let rows = rff_error_curve(&fm, &target, &q, &p.draws, p.trials, p.mc_points, &rng.fork(1))?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut table = Table::new(
        "rff_scaling",
        &[
            "draws",
            "mc_error_mean",
            "mc_error_stderr",
            "exact_error_mean",
            "exact_error_stderr",
            "bound",
            "violation_rate",
        ],
    );
    for r in &rows {
        table.push(vec![
            r.d.into(),
            r.error.mean.into(),
            r.error.stderr.into(),
            r.exact_error.mean.into(),
            r.exact_error.stderr.into(),
            r.bound.into(),
            r.violation_rate.into(),
        ]);
    }
    let log_d: Vec<f64> = rows.iter().map(|r| (r.d as f64).ln()).collect();
    let log_exact: Vec<f64> = rows.iter().map(|r| r.exact_error.mean.ln()).collect();
    let log_mc: Vec<f64> = rows.iter().map(|r| r.error.mean.ln()).collect();
    let (slope_exact, _) = linear_fit(&log_d, &log_exact);
    let (slope_mc, _) = linear_fit(&log_d, &log_mc);
    let violation = max_of(rows.iter().map(|r| r.violation_rate));
    report.tables.push(table);
    report.metric("slope_exact_error", slope_exact);
    report.metric("slope_mc_error", slope_mc);
    report.metric("estimator_radius", estimator_radius(&fm, &target, &q));
    report.checks.push(Check::within("error_loglog_slope", 4, slope_exact, p.slope_min, p.slope_max));
    report.checks.push(Check::within("mc_error_loglog_slope", 4, slope_mc, p.slope_min, p.slope_max));
    report.checks.push(Check::at_most("bound_violation_rate_max", 4, violation, p.max_violation_rate));
    report.runtime_checks.push(Check::at_most("rff_runtime_seconds", 4, elapsed, p.max_seconds));
    Ok(())
}
