//! Random-feature approximation of linear Fourier models: importance sampling
//! of feature columns, the unbiased Monte Carlo estimator, least-squares
//! refits on the sampled columns, and error-scaling measurements.

use std::collections::BTreeMap;

use nalgebra::{DVector, SVD};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{
    l2_mu_distance, Dataset, FeatureMap, KernelMatrix, LinearModel, WeightVector,
};
use crate::numeric::{RealMatrix, SeededRng};
use crate::stats::Summary;

/// Probability of failure used when reporting the concentration bound.
pub const BOUND_DELTA: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingDistribution {
    q: Vec<f64>,
}

impl SamplingDistribution {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if q.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDistribution("negative or non-finite probability".into()));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { q })
    }

    pub fn uniform(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        Ok(Self { q: vec![1.0 / p as f64; p] })
    }

    /// `q_i` proportional to `|beta_i|`.
    pub fn proportional_to_weights(beta: &WeightVector) -> Result<Self> {
        let total: f64 = beta.as_slice().iter().map(|b| b.abs()).sum();
        if total == 0.0 {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        Ok(Self {
            q: beta.as_slice().iter().map(|b| b.abs() / total).collect(),
        })
    }

    pub fn point_mass(p: usize, index: usize) -> Result<Self> {
        if index >= p {
            return Err(Error::InvalidDistribution(format!("index {index} outside 0..{p}")));
        }
        let mut q = vec![0.0; p];
        q[index] = 1.0;
        Ok(Self { q })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// `D` i.i.d. categorical draws with replacement.
pub fn sample_feature_indices(
    q: &SamplingDistribution,
    d: usize,
    rng: &mut SeededRng,
) -> Result<Vec<usize>> {
    if d == 0 {
        return Err(Error::OutOfRange("need at least one sampled feature".into()));
    }
    let dist = WeightedIndex::new(&q.q).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    Ok((0..d).map(|_| dist.sample(rng)).collect())
}

/// `f_hat = sum_k c_k phi_k` over the distinct sampled features.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RffEstimator {
    indices: Vec<usize>,
    coefficients: Vec<f64>,
    draws: usize,
}

impl RffEstimator {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    /// Scatter into a full-length weight vector for `fm`.
    pub fn to_weights(&self, p: usize) -> WeightVector {
        let mut w = vec![0.0; p];
        for (&i, &c) in self.indices.iter().zip(&self.coefficients) {
            w[i] += c;
        }
        WeightVector::new(w)
    }

    pub fn eval(&self, fm: &FeatureMap, x: &[f64]) -> Result<f64> {
        let phi = fm.features(x)?;
        Ok(self.indices.iter().zip(&self.coefficients).map(|(&i, c)| c * phi[i]).sum())
    }
}

/// Monte Carlo estimator `(1/D) sum_{k in S} (beta_k / q_k) phi_k`, whose
/// expectation over `S` is `f_beta`. Repeated draws add up.
pub fn mc_estimator(
    beta: &WeightVector,
    q: &SamplingDistribution,
    samples: &[usize],
) -> Result<RffEstimator> {
    if samples.is_empty() {
        return Err(Error::OutOfRange("need at least one sampled feature".into()));
    }
    if q.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: beta.len(),
            got: q.len(),
        });
    }
    let d = samples.len() as f64;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for &k in samples {
        let qk = *q.q.get(k).ok_or(Error::OutOfRange(format!("index {k} outside distribution")))?;
        if qk == 0.0 {
            return Err(Error::ZeroProbabilitySample { index: k });
        }
        *acc.entry(k).or_insert(0.0) += beta.as_slice()[k] / (qk * d);
    }
    Ok(RffEstimator {
        indices: acc.keys().copied().collect(),
        coefficients: acc.values().copied().collect(),
        draws: samples.len(),
    })
}

/// Coefficients on the distinct sampled columns minimizing
/// `||Phi_S c - y||^2 + ridge ||c||^2`; the minimum-norm minimizer when
/// `ridge = 0` and the system is underdetermined.
pub fn refit_estimator(
    fm: &FeatureMap,
    samples: &[usize],
    ds: &Dataset,
    ridge: f64,
) -> Result<RffEstimator> {
    if !(ridge >= 0.0) {
        return Err(Error::OutOfRange(format!("ridge must be >= 0, got {ridge}")));
    }
    if samples.is_empty() {
        return Err(Error::OutOfRange("need at least one sampled feature".into()));
    }
    let mut cols: Vec<usize> = samples.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if let Some(&bad) = cols.iter().find(|&&c| c >= fm.p()) {
        return Err(Error::OutOfRange(format!("feature index {bad} outside 0..{}", fm.p())));
    }
    let phi = fm.data_matrix(ds.inputs())?;
    let sub = RealMatrix::from_fn(ds.len(), cols.len(), |i, j| phi[(i, cols[j])]);
    let svd = SVD::new(sub, true, true);
    let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let s_max = svd.singular_values.max();
    let y = DVector::from_column_slice(ds.targets());
    let uty = u.transpose() * y;
    let mut c = DVector::zeros(cols.len());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let gain = if ridge > 0.0 {
            s / (s * s + ridge)
        } else if s > 1e-12 * s_max {
            1.0 / s
        } else {
            0.0
        };
        c += v_t.row(k).transpose() * (gain * uty[k]);
    }
    Ok(RffEstimator {
        indices: cols,
        coefficients: c.iter().copied().collect(),
        draws: samples.len(),
    })
}

pub fn estimator_training_risk(fm: &FeatureMap, est: &RffEstimator, ds: &Dataset) -> Result<f64> {
    crate::fourier::empirical_risk(fm, &est.to_weights(fm.p()), ds)
}

/// `R = max_i |beta_i| ||phi_i||_mu / q_i`, the almost-sure radius of one
/// draw of the estimator.
pub fn estimator_radius(fm: &FeatureMap, beta: &WeightVector, q: &SamplingDistribution) -> f64 {
    beta.as_slice()
        .iter()
        .zip(q.probabilities())
        .enumerate()
        .filter(|(_, (b, _))| **b != 0.0)
        .map(|(i, (b, qi))| b.abs() * fm.feature_l2_norm(i) / qi)
        .fold(0.0, f64::max)
}

/// `R / sqrt(D) (1 + sqrt(2 ln(1/delta)))`.
pub fn concentration_bound(radius: f64, d: usize, delta: f64) -> f64 {
    radius / (d as f64).sqrt() * (1.0 + (2.0 * (1.0 / delta).ln()).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct RffErrorRow {
    pub d: usize,
    /// Monte Carlo `||f_hat - f||_mu` averaged over trials.
    pub error: Summary,
    /// Exact `||f_hat - f||_mu` from orthogonality, averaged over trials.
    pub exact_error: Summary,
    pub bound: f64,
    pub violation_rate: f64,
}

/// Error of the Monte Carlo estimator against `D`. Trial `t` at list
/// position `i` draws from `rng.fork(i).fork(t)`.
pub fn rff_error_curve(
    fm: &FeatureMap,
    target: &WeightVector,
    q: &SamplingDistribution,
    d_list: &[usize],
    trials: usize,
    n_mc: usize,
    rng: &SeededRng,
) -> Result<Vec<RffErrorRow>> {
    if d_list.is_empty() {
        return Err(Error::OutOfRange("D list is empty".into()));
    }
    if trials == 0 {
        return Err(Error::OutOfRange("need at least one trial".into()));
    }
    let radius = estimator_radius(fm, target, q);
    let f = LinearModel::new(fm, target)?;
    d_list
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let stream = rng.fork(i as u64);
            let per_trial: Vec<(f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut r = stream.fork(t as u64);
                    let s = sample_feature_indices(q, d, &mut r)?;
                    let w = mc_estimator(target, q, &s)?.to_weights(fm.p());
                    let fhat = LinearModel::new(fm, &w)?;
                    let mc = l2_mu_distance(&fhat, &f, n_mc, &mut r)?;
                    Ok((mc.distance, fm.parseval_distance(&w, target)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let errors: Vec<f64> = per_trial.iter().map(|v| v.0).collect();
            let exact: Vec<f64> = per_trial.iter().map(|v| v.1).collect();
            let bound = concentration_bound(radius, d, BOUND_DELTA);
            let violations = exact.iter().filter(|&&e| e > bound).count();
            Ok(RffErrorRow {
                d,
                error: Summary::of(&errors),
                exact_error: Summary::of(&exact),
                bound,
                violation_rate: violations as f64 / trials as f64,
            })
        })
        .collect()
}

/// `M max_phi_norm / (sqrt(D) lambda_min(K))`.
pub fn mnls_rff_bound(k: &KernelMatrix, m: usize, d: usize, max_phi_norm: f64) -> Result<f64> {
    let lambda_min = k.lambda_min()?;
    if lambda_min <= 0.0 {
        return Err(Error::SingularKernel { lambda_min });
    }
    Ok(m as f64 * max_phi_norm / ((d as f64).sqrt() * lambda_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{gram, mnls, sample_uniform_inputs, FrequencySet};
    use rand::Rng;

    fn fm() -> FeatureMap {
        FeatureMap::new(FrequencySet::half_lattice(2, 10, true).unwrap())
    }

    fn random_beta(p: usize, seed: u64) -> WeightVector {
        let mut rng = SeededRng::new(seed, 7);
        WeightVector::new((0..p).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
    }

    #[test]
    fn distribution_validation() {
        assert!(SamplingDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(SamplingDistribution::new(vec![-0.5, 1.5]).is_err());
        assert!(SamplingDistribution::new(vec![0.25; 4]).is_ok());
    }

    #[test]
    fn point_mass_sampling() {
        let q = SamplingDistribution::point_mass(5, 3).unwrap();
        let s = sample_feature_indices(&q, 20, &mut SeededRng::new(1, 0)).unwrap();
        assert!(s.iter().all(|&i| i == 3));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let q = SamplingDistribution::uniform(4).unwrap();
        let n = 100_000;
        let s = sample_feature_indices(&q, n, &mut SeededRng::new(2, 0)).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let count = s.iter().filter(|&&i| i == k).count() as f64;
            assert!((count - n as f64 / 4.0).abs() < 4.0 * sigma);
        }
        let again = sample_feature_indices(&q, 50, &mut SeededRng::new(2, 0)).unwrap();
        assert_eq!(&s[..50], &again[..]);
    }

    #[test]
    fn single_draw_and_exact_case() {
        let fm = fm();
        let beta = random_beta(fm.p(), 3);
        let q = SamplingDistribution::uniform(fm.p()).unwrap();
        let est = mc_estimator(&beta, &q, &[4]).unwrap();
        assert_eq!(est.indices(), &[4]);
        assert!((est.coefficients()[0] - beta.as_slice()[4] * fm.p() as f64).abs() < 1e-12);

        let mut single = vec![0.0; fm.p()];
        single[2] = 0.7;
        let single = WeightVector::new(single);
        let q = SamplingDistribution::point_mass(fm.p(), 2).unwrap();
        let est = mc_estimator(&single, &q, &[2, 2, 2]).unwrap();
        assert!(est.to_weights(fm.p()).sub(&single).norm() < 1e-15);
    }

    #[test]
    fn zero_probability_draw_is_rejected() {
        let beta = WeightVector::new(vec![1.0, 1.0]);
        let q = SamplingDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(mc_estimator(&beta, &q, &[1]), Err(Error::ZeroProbabilitySample { index: 1 })));
    }

    #[test]
    fn estimator_is_unbiased() {
        let fm = fm();
        let beta = random_beta(fm.p(), 4);
        let q = SamplingDistribution::uniform(fm.p()).unwrap();
        let mut rng = SeededRng::new(4, 1);
        let xs = sample_uniform_inputs(10, 2, &mut rng);
        let mut values = vec![Vec::new(); xs.len()];
        for _ in 0..2000 {
            let s = sample_feature_indices(&q, 8, &mut rng).unwrap();
            let est = mc_estimator(&beta, &q, &s).unwrap();
            for (i, x) in xs.iter().enumerate() {
                values[i].push(est.eval(&fm, x).unwrap());
            }
        }
        for (i, x) in xs.iter().enumerate() {
            let s = Summary::of(&values[i]);
            assert!(s.z_score(fm.eval(&beta, x).unwrap()) < 4.0);
        }
    }

    fn dataset(fm: &FeatureMap, m: usize, seed: u64) -> Dataset {
        let mut rng = SeededRng::new(seed, 0);
        let xs = sample_uniform_inputs(m, fm.dim(), &mut rng);
        let y = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
        Dataset::new(xs, y).unwrap()
    }

    #[test]
    fn refit_with_all_features_matches_mnls() {
        let fm = fm();
        let ds = dataset(&fm, 8, 5);
        let all: Vec<usize> = (0..fm.p()).collect();
        let est = refit_estimator(&fm, &all, &ds, 0.0).unwrap();
        let b = mnls(&fm, &ds).unwrap();
        for x in ds.inputs() {
            assert!((est.eval(&fm, x).unwrap() - fm.eval(&b, x).unwrap()).abs() < 1e-8);
        }
        let zero = Dataset::new(ds.inputs().to_vec(), vec![0.0; 8]).unwrap();
        let est = refit_estimator(&fm, &all, &zero, 1e-10).unwrap();
        assert!(est.coefficients().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn refit_beats_monte_carlo_and_grows_with_support() {
        let fm = fm();
        let ds = dataset(&fm, 15, 6);
        let target = mnls(&fm, &Dataset::new(ds.inputs()[..10].to_vec(), ds.targets()[..10].to_vec()).unwrap())
            .unwrap();
        let q = SamplingDistribution::uniform(fm.p()).unwrap();
        let mut rng = SeededRng::new(6, 2);
        let s = sample_feature_indices(&q, 12, &mut rng).unwrap();
        let mc = mc_estimator(&target, &q, &s).unwrap();
        let refit = refit_estimator(&fm, &s, &ds, 0.0).unwrap();
        let r_refit = estimator_training_risk(&fm, &refit, &ds).unwrap();
        assert!(r_refit <= estimator_training_risk(&fm, &mc, &ds).unwrap() + 1e-12);
        let sub = refit_estimator(&fm, &s[..6], &ds, 0.0).unwrap();
        assert!(r_refit <= estimator_training_risk(&fm, &sub, &ds).unwrap() + 1e-12);
    }

    #[test]
    fn zero_target_has_zero_error() {
        let fm = fm();
        let q = SamplingDistribution::uniform(fm.p()).unwrap();
        let rows = rff_error_curve(&fm, &WeightVector::zeros(fm.p()), &q, &[4, 8], 3, 10, &SeededRng::new(1, 0))
            .unwrap();
        assert!(rows.iter().all(|r| r.error.mean == 0.0 && r.exact_error.mean == 0.0));
    }

    #[test]
    fn mnls_bound_arithmetic() {
        let k = KernelMatrix::from_matrix(RealMatrix::identity(1, 1)).unwrap();
        assert!((mnls_rff_bound(&k, 1, 1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let fm = fm();
        let xs = sample_uniform_inputs(5, 2, &mut SeededRng::new(8, 0));
        let k = gram(&fm, &xs).unwrap();
        let lam = k.lambda_min().unwrap();
        let max_norm = (0..fm.p()).map(|i| fm.feature_l2_norm(i)).fold(0.0, f64::max);
        let b1 = mnls_rff_bound(&k, 5, 16, max_norm).unwrap();
        let b4 = mnls_rff_bound(&k, 5, 64, max_norm).unwrap();
        assert!((b1 - 5.0 / (4.0 * lam) * max_norm).abs() < 1e-12 * b1);
        assert!((b4 - b1 / 2.0).abs() < 1e-12 * b1);
    }
}
