use dequant_core::perfect::{
    check_norm_property, check_variance_property, empirical_sup, sample_perfect_function, PerfectFunctionSpec,
};
use dequant_core::SeededRng;
use rayon::prelude::*;

use super::max_of;
use crate::config::PerfectFnParams;
use crate::report::{Check, Report, Table};
use crate::LabError;

struct Trial {
    norm_sq: f64,
    norm_lhs: f64,
    norm_rhs: f64,
    norm_pass: bool,
    var_mc: f64,
    var_stderr: f64,
    var_exact: f64,
    threshold: f64,
    var_pass: bool,
    derived_threshold: f64,
    sup: f64,
}

pub(super) fn perfect_fn(p: &PerfectFnParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let spec = PerfectFunctionSpec::new(p.dim, p.max_frequency, p.frequencies, p.sigma_constant)?;
    let m = spec.frequencies() as f64;
    let s2 = spec.sigma * spec.sigma;
    // Centre sigma^2 / 3 of Var f with the matching half-width.
    let derived_threshold = s2 / 3.0 - s2 * (2.0 / p.delta).ln().sqrt() / (2.0 * m.sqrt());
    let trials = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.fork(t as u64);
            let f = sample_perfect_function(&spec, &mut r);
            let norm = check_norm_property(&f, p.delta)?;
            let var = check_variance_property(&f, p.delta, p.mc_points, &mut r.fork(1))?;
            let sup = empirical_sup(&f, p.restarts, p.ascent_steps, &mut r.fork(2))?;
            Ok(Trial {
                norm_sq: f.beta.norm_sq(),
                norm_lhs: norm.lhs,
                norm_rhs: norm.rhs,
                norm_pass: norm.pass,
                var_mc: var.var_estimate,
                var_stderr: var.var_stderr,
                var_exact: var.var_exact,
                threshold: var.threshold,
                var_pass: var.pass,
                derived_threshold,
                sup,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;

    let mut table = Table::new(
        "perfect_fn",
        &[
            "trial",
            "norm_sq",
            "norm_deviation",
            "norm_bound",
            "norm_pass",
            "variance_mc",
            "variance_stderr",
            "variance_exact",
            "variance_threshold",
            "variance_pass",
            "variance_derived_threshold",
            "sup",
            "sup_pass",
            "joint_pass",
        ],
    );
    let n = trials.len() as f64;
    let (mut norm_ok, mut var_ok, mut sup_ok, mut joint_ok, mut derived_ok) = (0, 0, 0, 0, 0);
    for (i, t) in trials.iter().enumerate() {
        let sup_pass = t.sup <= 1.0;
        let joint = t.norm_pass && t.var_pass && sup_pass;
        norm_ok += t.norm_pass as usize;
        var_ok += t.var_pass as usize;
        sup_ok += sup_pass as usize;
        joint_ok += joint as usize;
        derived_ok += (t.var_mc >= t.derived_threshold) as usize;
        table.push(vec![
            i.into(),
            t.norm_sq.into(),
            t.norm_lhs.into(),
            t.norm_rhs.into(),
            t.norm_pass.into(),
            t.var_mc.into(),
            t.var_stderr.into(),
            t.var_exact.into(),
            t.threshold.into(),
            t.var_pass.into(),
            t.derived_threshold.into(),
            t.sup.into(),
            sup_pass.into(),
            joint.into(),
        ]);
    }
    let var_z = max_of(trials.iter().map(|t| (t.var_mc - t.var_exact).abs() / t.var_stderr));
    report.tables.push(table);
    report.metric("sigma", spec.sigma);
    report.metric("sigma_constant", p.sigma_constant);
    report.metric("mean_sup", trials.iter().map(|t| t.sup).sum::<f64>() / n);
    report.metric("derived_variance_pass_rate", derived_ok as f64 / n);
    let rate = p.min_property_rate;
    report.checks.push(Check::at_least("norm_property_rate", 12, norm_ok as f64 / n, rate));
    report.checks.push(Check::at_least("variance_property_rate", 12, var_ok as f64 / n, rate));
    report.checks.push(Check::at_least("sup_property_rate", 12, sup_ok as f64 / n, rate));
    report.checks.push(Check::at_least("joint_property_rate", 12, joint_ok as f64 / n, p.min_joint_rate));
    report.checks.push(Check::at_most("variance_identity_abs_z_max", 12, var_z, p.var_max_z));
    Ok(())
}
