//! One runner per experiment id. Each runner is a pure function of its
//! parameters and seed; randomness comes from forks of `SeededRng::new(seed, 0)`.

mod advantage;
mod dlp;
mod kernel;
mod perfect;
mod quantum;
mod regression;
mod rff;

use dequant_core::SeededRng;

use crate::config::{ExperimentConfig, Params};
use crate::report::Report;
use crate::LabError;

pub fn dispatch(config: &ExperimentConfig) -> Result<Report, LabError> {
    config.params.validate().map_err(LabError::Config)?;
    let rng = SeededRng::new(config.seed, 0);
    let mut report = Report::new(config);
    match &config.params {
        Params::MnlsGd(p) => regression::mnls_gd(p, &rng, &mut report)?,
        Params::KernelEig(p) => kernel::kernel_eig(p, &rng, &mut report)?,
        Params::RffScaling(p) => rff::rff_scaling(p, &rng, &mut report)?,
        Params::QnormSimple(p) => quantum::qnorm_simple(p, &rng, &mut report)?,
        Params::QnormReuploading(p) => quantum::qnorm_reuploading(p, &rng, &mut report)?,
        Params::Separation(p) => regression::separation(p, &rng, &mut report)?,
        Params::Dlp(p) => dlp::dlp(p, &rng, &mut report)?,
        Params::PerfectFn(p) => perfect::perfect_fn(p, &rng, &mut report)?,
        Params::AdvantageDemo(p) => advantage::advantage_demo(p, &rng, &mut report)?,
    }
    Ok(report)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn gaussian_vec(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    use rand_distr::{Distribution, StandardNormal};
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
