use dequant_core::dlp::{
    dlp_expansion_check, dlp_observable_diag, dlp_rff_obstruction, dlp_variance_exact, dlp_variance_monte_carlo,
    DlpInstance,
};
use dequant_core::SeededRng;

use crate::config::DlpParams;
use crate::report::{Check, Report, Table};
use crate::LabError;

pub(super) fn dlp(p: &DlpParams, rng: &SeededRng, report: &mut Report) -> Result<(), LabError> {
    let mut table = Table::new(
        "dlp",
        &[
            "qubits",
            "modulus",
            "generator",
            "bit",
            "expansion_gap_max",
            "corner_mean",
            "corner_variance",
            "label_variance",
            "obstruction",
            "expected_obstruction",
            "continuous_variance",
            "continuous_variance_stderr",
        ],
    );
    for &n in &p.qubits {
        let inst = DlpInstance::new(n, p.bit)?;
        let stream = rng.fork(n as u64);
        let gap = dlp_expansion_check(&inst, p.points, &mut stream.fork(0))?;
        let corner = dlp_variance_exact(&inst)?;
        // At a corner the product state is a basis state, so f equals the
        // observable's diagonal entry there.
        let diag = dlp_observable_diag(&inst);
        let mean = diag.iter().sum::<f64>() / diag.len() as f64;
        let label_variance = diag.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diag.len() as f64;
        let obstruction = dlp_rff_obstruction(&inst);
        let expected = 2f64.powf(n as f64 / 2.0);
        let cont = dlp_variance_monte_carlo(&inst, p.mc_points, &mut stream.fork(1))?;
        table.push(vec![
            n.into(),
            inst.modulus().into(),
            inst.generator().into(),
            p.bit.into(),
            gap.into(),
            corner.mean.into(),
            corner.variance.into(),
            label_variance.into(),
            obstruction.into(),
            expected.into(),
            cont.variance.into(),
            cont.stderr.into(),
        ]);
        report.checks.push(Check::at_most(&format!("expansion_gap_n{n}"), 11, gap, p.tol));
        report.checks.push(Check::at_most(
            &format!("corner_variance_mismatch_n{n}"),
            11,
            (corner.variance - label_variance).abs(),
            1e-12,
        ));
        report.checks.push(Check::at_least(&format!("corner_variance_n{n}"), 11, corner.variance, 0.25));
        report.checks.push(Check::at_most(
            &format!("obstruction_mismatch_n{n}"),
            11,
            (obstruction - expected).abs(),
            0.0,
        ));
    }
    report.tables.push(table);
    Ok(())
}
