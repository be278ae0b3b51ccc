//! Random bounded Fourier functions with large weight norm and
//! non-vanishing variance.
//!
//! `f(x) = (1/sqrt(m)) sum_{w in Omega_+} (b_cos cos(w.x) + b_sin sin(w.x))`
//! with `m = |Omega_+|` and coefficients i.i.d. uniform on `[-sigma, sigma]`.
//! This is `sqrt(2)` times the feature-map model with the same weights, so
//! `Var_x f = ||beta||^2 / p` where `p = 2m` counts real features.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{maximize_abs, FeatureMap, FrequencySet, WeightVector};
use crate::numeric::SeededRng;
use crate::stats::{variance_stderr, Summary};

/// Prefactor of `sigma = c / (d (ln d + ln L))`, the largest value in the
/// default sweep whose sup bound held in at least 99% of trials
/// (d = 2, L = 8, 32 frequencies, 200 trials per value, seed 2024).
pub const DEFAULT_SIGMA_CONSTANT: f64 = 2.25;

/// Number of random points in the scatter stage of [`empirical_sup`].
pub const SUP_SCATTER_POINTS: usize = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct PerfectFunctionSpec {
    pub d: usize,
    pub l: i64,
    pub sigma: f64,
    pub sigma_constant: Option<f64>,
    fm: FeatureMap,
}

impl PerfectFunctionSpec {
    /// `frequencies` lowest-shell canonical vectors of `[-L, L]^d`, with
    /// `sigma = sigma_constant / (d (ln d + ln L))`.
    pub fn new(d: usize, l: i64, frequencies: usize, sigma_constant: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange("sigma formula needs d >= 2".into()));
        }
        if l < 1 {
            return Err(Error::OutOfRange("L must be >= 1".into()));
        }
        if sigma_constant < 0.0 {
            return Err(Error::OutOfRange("sigma constant must be >= 0".into()));
        }
        let sigma = sigma_constant / (d as f64 * ((d as f64).ln() + (l as f64).ln()));
        let mut spec = Self::with_sigma(d, l, frequencies, sigma)?;
        spec.sigma_constant = Some(sigma_constant);
        Ok(spec)
    }

    pub fn with_sigma(d: usize, l: i64, frequencies: usize, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::OutOfRange("sigma must be >= 0".into()));
        }
        let set = FrequencySet::half_lattice(d, frequencies, false)?;
        if set.half_steps().iter().flatten().any(|h| h.abs() > 2 * l) {
            return Err(Error::OutOfRange(format!(
                "{frequencies} frequencies do not fit in [-{l}, {l}]^{d}"
            )));
        }
        Ok(Self {
            d,
            l,
            sigma,
            sigma_constant: None,
            fm: FeatureMap::new(set),
        })
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    /// `m = |Omega_+|`.
    pub fn frequencies(&self) -> usize {
        self.fm.frequencies().len()
    }

    /// Real coefficient count `2m`.
    pub fn p(&self) -> usize {
        self.fm.p()
    }
}

#[derive(Clone, Debug)]
pub struct SampledPerfectFunction {
    pub spec: PerfectFunctionSpec,
    pub beta: WeightVector,
}

impl SampledPerfectFunction {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(std::f64::consts::SQRT_2 * self.spec.fm.eval(&self.beta, x)?)
    }

    /// `Var_x f = ||beta||^2 / p`.
    pub fn exact_variance(&self) -> f64 {
        self.beta.norm_sq() / self.spec.p() as f64
    }
}

pub fn sample_perfect_function(spec: &PerfectFunctionSpec, rng: &mut SeededRng) -> SampledPerfectFunction {
    let s = spec.sigma;
    let beta = (0..spec.p()).map(|_| (2.0 * rng.random::<f64>() - 1.0) * s).collect();
    SampledPerfectFunction {
        spec: spec.clone(),
        beta: WeightVector::new(beta),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PropertyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `| ||beta||^2 - (2/3) m sigma^2 | <= sigma^2 sqrt(m ln(2/delta))`.
pub fn check_norm_property(f: &SampledPerfectFunction, delta: f64) -> Result<PropertyCheck> {
    check_delta(delta)?;
    let m = f.spec.frequencies() as f64;
    let s2 = f.spec.sigma * f.spec.sigma;
    let lhs = (f.beta.norm_sq() - 2.0 / 3.0 * m * s2).abs();
    let rhs = s2 * (m * (2.0 / delta).ln()).sqrt();
    Ok(PropertyCheck { lhs, rhs, pass: lhs <= rhs })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VarianceCheck {
    /// Monte Carlo variance of `f` over uniform inputs.
    pub var_estimate: f64,
    pub var_stderr: f64,
    /// `||beta||^2 / p`.
    pub var_exact: f64,
    /// `(2/3) sigma^2 - sigma^2 sqrt(ln(2/delta)) / sqrt(m)`.
    pub threshold: f64,
    pub pass: bool,
}

pub fn check_variance_property(
    f: &SampledPerfectFunction,
    delta: f64,
    n_mc: usize,
    rng: &mut SeededRng,
) -> Result<VarianceCheck> {
    check_delta(delta)?;
    if n_mc < 10_000 {
        return Err(Error::OutOfRange(format!("variance check needs n_mc >= 10000, got {n_mc}")));
    }
    let period = f.spec.fm.period();
    let values = (0..n_mc)
        .map(|_| {
            let x: Vec<f64> = (0..f.spec.d).map(|_| rng.random::<f64>() * period).collect();
            f.eval(&x)
        })
        .collect::<Result<Vec<_>>>()?;
    let var_estimate = Summary::of(&values).variance;
    let m = f.spec.frequencies() as f64;
    let s2 = f.spec.sigma * f.spec.sigma;
    let threshold = 2.0 / 3.0 * s2 - s2 / m.sqrt() * (2.0 / delta).ln().sqrt();
    Ok(VarianceCheck {
        var_estimate,
        var_stderr: variance_stderr(&values),
        var_exact: f.exact_variance(),
        threshold,
        pass: threshold <= var_estimate,
    })
}

/// Lower bound on `sup |f|`: the best of a fixed-size uniform scatter and of
/// `restarts` finite-difference ascents from uniform starts.
pub fn empirical_sup(
    f: &SampledPerfectFunction,
    restarts: usize,
    steps: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    if restarts < 32 {
        return Err(Error::OutOfRange(format!("empirical_sup needs >= 32 restarts, got {restarts}")));
    }
    let d = f.spec.d;
    let period = f.spec.fm.period();
    let scatter_seed = rng.fork(0);
    let scatter = (0..SUP_SCATTER_POINTS)
        .into_par_iter()
        .chunks(4096)
        .enumerate()
        .map(|(chunk, idx)| {
            let mut r = scatter_seed.fork(chunk as u64);
            idx.iter()
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| r.random::<f64>() * period).collect();
                    f.eval(&x).map(f64::abs)
                })
                .try_fold(0.0, |acc: f64, v| v.map(|v| acc.max(v)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|_| (0..d).map(|_| rng.random::<f64>() * period).collect())
        .collect();
    let h = |x: &[f64]| f.eval(x).expect("dimension fixed by spec");
    let (ascent, _) = maximize_abs(&h, &starts, steps, period);
    Ok(scatter.max(ascent))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub sigma_constant: f64,
    pub sigma: f64,
    pub mean_sup: f64,
    pub fraction_bounded: f64,
}

/// Sup statistics over `trials` sampled functions per prefactor. Trial `t`
/// of constant `i` uses `rng.fork(i).fork(t)`.
pub fn sigma_sweep(
    d: usize,
    l: i64,
    frequencies: usize,
    constants: &[f64],
    trials: usize,
    restarts: usize,
    rng: &SeededRng,
) -> Result<Vec<SweepRow>> {
    constants
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let spec = PerfectFunctionSpec::new(d, l, frequencies, c)?;
            let stream = rng.fork(i as u64);
            let sups = (0..trials)
                .map(|t| {
                    let mut r = stream.fork(t as u64);
                    let f = sample_perfect_function(&spec, &mut r);
                    empirical_sup(&f, restarts, 100, &mut r)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow {
                sigma_constant: c,
                sigma: spec.sigma,
                mean_sup: sups.iter().sum::<f64>() / trials.max(1) as f64,
                fraction_bounded: sups.iter().filter(|&&s| s <= 1.0).count() as f64 / trials.max(1) as f64,
            })
        })
        .collect()
}

/// Largest swept constant whose bounded fraction reaches `target`.
pub fn pick_sigma_constant(rows: &[SweepRow], target: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.fraction_bounded >= target)
        .map(|r| r.sigma_constant)
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_spec() -> PerfectFunctionSpec {
        PerfectFunctionSpec::new(2, 8, 32, DEFAULT_SIGMA_CONSTANT).unwrap()
    }

    #[test]
    fn spec_shape() {
        let s = default_spec();
        assert_eq!(s.p(), 64);
        assert!((s.sigma - 2.25 / (2.0 * 16f64.ln())).abs() < 1e-15);
        assert!(PerfectFunctionSpec::new(1, 8, 4, 1.0).is_err());
        assert!(PerfectFunctionSpec::new(2, 1, 10, 1.0).is_err());
    }

    #[test]
    fn zero_sigma() {
        let spec = PerfectFunctionSpec::with_sigma(2, 8, 32, 0.0).unwrap();
        let mut rng = SeededRng::new(1, 0);
        let f = sample_perfect_function(&spec, &mut rng);
        assert_eq!(f.eval(&[1.0, 2.0]).unwrap(), 0.0);
        assert!(check_norm_property(&f, 0.01).unwrap().pass);
        let v = check_variance_property(&f, 0.01, 10_000, &mut rng).unwrap();
        assert!(v.pass && v.var_estimate == 0.0);
        assert_eq!(empirical_sup(&f, 32, 20, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn coefficients_are_bounded_and_centered() {
        let spec = default_spec();
        let f = sample_perfect_function(&spec, &mut SeededRng::new(2, 0));
        assert!(f.beta.as_slice().iter().all(|b| b.abs() <= spec.sigma));
        let mean = f.beta.as_slice().iter().sum::<f64>() / 64.0;
        assert!(mean.abs() < 4.0 * spec.sigma / 8.0);
        let direct: f64 = f.beta.as_slice().iter().map(|b| b * b).sum();
        assert!((direct - f.beta.norm_sq()).abs() < 1e-14);
    }

    #[test]
    fn mean_norm_matches_uniform_second_moment() {
        let spec = default_spec();
        let mut rng = SeededRng::new(3, 0);
        let norms: Vec<f64> = (0..5000).map(|_| sample_perfect_function(&spec, &mut rng).beta.norm_sq()).collect();
        let s = Summary::of(&norms);
        let expected = 2.0 / 3.0 * 32.0 * spec.sigma * spec.sigma;
        assert!(s.z_score(expected) < 3.0);
    }

    #[test]
    fn variance_identity() {
        let spec = default_spec();
        let mut rng = SeededRng::new(4, 0);
        let f = sample_perfect_function(&spec, &mut rng);
        let v = check_variance_property(&f, 0.01, 40_000, &mut rng).unwrap();
        assert!((v.var_estimate - v.var_exact).abs() < 4.0 * v.var_stderr);
    }

    #[test]
    fn single_frequency_sup_is_its_amplitude() {
        let spec = PerfectFunctionSpec::with_sigma(2, 8, 1, 0.3).unwrap();
        let f = SampledPerfectFunction {
            spec: spec.clone(),
            beta: WeightVector::new(vec![0.3, -0.2]),
        };
        // 1/sqrt(m) with m = 1.
        let amplitude = (0.3f64 * 0.3 + 0.2 * 0.2).sqrt();
        let s = empirical_sup(&f, 32, 100, &mut SeededRng::new(5, 0)).unwrap();
        assert!(s <= amplitude + 1e-12 && s > amplitude - 1e-8);
    }

    #[test]
    fn sweep_small_constant_gives_small_sup() {
        let rows = sigma_sweep(2, 8, 32, &[0.01, 0.5], 3, 32, &SeededRng::new(6, 0)).unwrap();
        assert!(rows[0].mean_sup < 0.05);
        assert!(rows[0].mean_sup < rows[1].mean_sup);
        assert_eq!(pick_sigma_constant(&rows, 0.99), Some(0.5));
    }
}
