use std::time::Instant;

use dequant_core::fourier::kernel_min_eig_experiment;
use dequant_core::{FeatureMap, FrequencySet, SeededRng};

use crate::config::KernelEigParams;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub(super) fn kernel_eig(p: &KernelEigParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let fm = FeatureMap::new(FrequencySet::half_lattice(p.dim, p.frequencies, p.include_constant)?);
    let start = Instant::now();
    let rec = kernel_min_eig_experiment(&fm, p.points, p.trials, rng)?;
    let elapsed = start.elapsed().as_secs_f64();

    let z = (rec.spread_sq.mean - rec.expected_spread_sq) / rec.spread_sq.stderr;
    let mut table = Table::new(
        "kernel_eig",
        &[
            "points",
            "trials",
            "features",
            "frequencies",
            "fraction_above_half",
            "lambda_min_mean",
            "lambda_min_stderr",
            "lambda_min_raw_mean",
            "spread_sq_mean",
            "spread_sq_stderr",
            "expected_spread_sq",
            "spread_sq_z",
            "bound_coefficient",
            "implied_constant",
        ],
    );
    table.push(vec![
        rec.m.into(),
        rec.trials.into(),
        rec.p.into(),
        rec.frequencies.into(),
        rec.fraction_above_half.into(),
        rec.lambda_min.mean.into(),
        rec.lambda_min.stderr.into(),
        rec.lambda_min_raw_mean.into(),
        rec.spread_sq.mean.into(),
        rec.spread_sq.stderr.into(),
        rec.expected_spread_sq.into(),
        z.into(),
        rec.bound_coefficient.unwrap_or(f64::NAN).into(),
        rec.implied_constant.unwrap_or(f64::NAN).into(),
    ]);
    report.tables.push(table);
    report.metric("fraction_above_half", rec.fraction_above_half);
    report.metric("spread_sq_mean", rec.spread_sq.mean);
    report.metric("expected_spread_sq", rec.expected_spread_sq);
    report.checks.push(Check::at_least("fraction_lambda_min_above_half", 3, rec.fraction_above_half, p.min_fraction));
    report.checks.push(Check::at_most("spread_sq_abs_z", 3, z.abs(), p.max_z));
    report.runtime_checks.push(Check::at_most("kernel_runtime_seconds", 3, elapsed, p.max_seconds));
    Ok(())
}
