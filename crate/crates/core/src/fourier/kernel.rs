//! Fourier kernel matrices and the eigenvalue-concentration experiment.

use rayon::prelude::*;
use serde::Serialize;

use super::FeatureMap;
use crate::error::{Error, Result};
use crate::numeric::{self, RealMatrix, SeededRng};
use crate::stats::Summary;

/// `K_ij = phi(x_i)^T phi(x_j)`.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    k: RealMatrix,
}

impl KernelMatrix {
    /// Wraps a precomputed square symmetric matrix.
    pub fn from_matrix(k: RealMatrix) -> Result<Self> {
        numeric::sym_eig_min(&k)?;
        Ok(Self { k })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.k
    }

    pub fn size(&self) -> usize {
        self.k.nrows()
    }

    pub fn lambda_min(&self) -> Result<f64> {
        numeric::sym_eig_min(&self.k)
    }

    /// The kernel divided by its (constant) diagonal, so `k(x, x) = 1`.
    pub fn unit_diagonal(&self) -> KernelMatrix {
        KernelMatrix {
            k: &self.k / self.k[(0, 0)],
        }
    }

    /// `s^2 = tr(K^2)/M - (tr(K)/M)^2`, the spread statistic of the
    /// eigenvalue lower bound `lambda_min >= m - s sqrt(M - 1)`.
    pub fn spread_sq(&self) -> f64 {
        let m = self.size() as f64;
        let tr = self.k.trace() / m;
        let tr2 = self.k.iter().map(|v| v * v).sum::<f64>() / m;
        tr2 - tr * tr
    }
}

pub fn gram(fm: &FeatureMap, inputs: &[Vec<f64>]) -> Result<KernelMatrix> {
    if inputs.is_empty() {
        return Err(Error::InvalidDataset("gram needs at least one input".into()));
    }
    let phi = fm.data_matrix(inputs)?;
    let mut k = &phi * phi.transpose();
    // Symmetrize away rounding so the eigen-solver's symmetry check is exact.
    for i in 0..k.nrows() {
        for j in (i + 1)..k.ncols() {
            let v = 0.5 * (k[(i, j)] + k[(j, i)]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(KernelMatrix { k })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelEigRecord {
    pub m: usize,
    pub trials: usize,
    pub p: usize,
    pub frequencies: usize,
    /// Fraction of trials where the unit-diagonal kernel has `lambda_min > 1/2`.
    pub fraction_above_half: f64,
    pub lambda_min: Summary,
    /// Same statistic before normalizing the diagonal.
    pub lambda_min_raw_mean: f64,
    pub spread_sq: Summary,
    /// `E[s^2] = (M - 1) E[k(x, x')^2]` for the unit-diagonal kernel.
    pub expected_spread_sq: f64,
    /// Multiplier of the unknown constant in `P(lambda_min <= 1/2) <= coeff * C`,
    /// defined when `n_freq > 8 (M - 1)^2`.
    pub bound_coefficient: Option<f64>,
    pub measured_complement: f64,
    /// `measured_complement / bound_coefficient`.
    pub implied_constant: Option<f64>,
}

/// Draw `trials` independent datasets of `m` uniform points, and record the
/// smallest eigenvalue and spread of the unit-diagonal kernel.
pub fn kernel_min_eig_experiment(
    fm: &FeatureMap,
    m: usize,
    trials: usize,
    rng: &SeededRng,
) -> Result<KernelEigRecord> {
    if m == 0 || trials == 0 {
        return Err(Error::OutOfRange("kernel experiment needs M >= 1 and trials >= 1".into()));
    }
    let per_trial: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.fork(t as u64);
            let xs = fm.sample_inputs(m, &mut r);
            let k = gram(fm, &xs)?;
            let raw = k.lambda_min()?;
            let unit = k.unit_diagonal();
            Ok((unit.lambda_min()?, raw, unit.spread_sq()))
        })
        .collect::<Result<Vec<_>>>()?;

    let lmin: Vec<f64> = per_trial.iter().map(|t| t.0).collect();
    let raw: Vec<f64> = per_trial.iter().map(|t| t.1).collect();
    let s2: Vec<f64> = per_trial.iter().map(|t| t.2).collect();
    let above = lmin.iter().filter(|&&v| v > 0.5).count();
    let fraction = above as f64 / trials as f64;

    // Distinct nonzero frequencies give uncorrelated cosines of x - x'.
    let n_freq = fm.frequencies().len() as f64;
    let c = if fm.frequencies().include_constant() { 1.0 } else { 0.0 };
    let e_k2 = (c + 0.5 * n_freq) / (c + n_freq).powi(2);
    let mm1 = (m - 1) as f64;
    let gap = n_freq - 8.0 * mm1 * mm1;
    let bound_coefficient = (m > 1 && gap > 0.0).then(|| 4.0 * mm1 * mm1 * n_freq / (gap * gap));
    let complement = 1.0 - fraction;
    Ok(KernelEigRecord {
        m,
        trials,
        p: fm.p(),
        frequencies: fm.frequencies().len(),
        fraction_above_half: fraction,
        lambda_min: Summary::of(&lmin),
        lambda_min_raw_mean: raw.iter().sum::<f64>() / trials as f64,
        spread_sq: Summary::of(&s2),
        expected_spread_sq: mm1 * e_k2,
        bound_coefficient,
        measured_complement: complement,
        implied_constant: bound_coefficient.map(|b| complement / b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{sample_uniform_inputs, FrequencySet};

    #[test]
    fn single_point_kernel() {
        let fm = FeatureMap::new(FrequencySet::half_lattice(2, 5, true).unwrap());
        let k = gram(&fm, &[vec![0.3, 1.2]]).unwrap();
        assert_eq!(k.size(), 1);
        assert!((k.matrix()[(0, 0)] - fm.feature_norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn one_frequency_kernel_is_half_cosine() {
        let fm = FeatureMap::new(FrequencySet::from_integers(1, vec![vec![1]], false).unwrap());
        let xs = sample_uniform_inputs(5, 1, &mut SeededRng::new(5, 0));
        let k = gram(&fm, &xs).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = (xs[i][0] - xs[j][0]).cos() / 2.0;
                assert!((k.matrix()[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_is_phi_phi_t_and_psd() {
        let fm = FeatureMap::new(FrequencySet::half_lattice(2, 12, true).unwrap());
        let xs = sample_uniform_inputs(30, 2, &mut SeededRng::new(6, 0));
        let k = gram(&fm, &xs).unwrap();
        let phi = fm.data_matrix(&xs).unwrap();
        let direct = &phi * phi.transpose();
        assert!((k.matrix() - direct).amax() < 1e-12);
        assert!(k.lambda_min().unwrap() >= -1e-10);
    }

    #[test]
    fn experiment_single_point_is_deterministic() {
        let fm = FeatureMap::new(FrequencySet::half_lattice(2, 20, false).unwrap());
        let rec = kernel_min_eig_experiment(&fm, 1, 5, &SeededRng::new(1, 0)).unwrap();
        assert!((rec.lambda_min_raw_mean - fm.feature_norm_sq()).abs() < 1e-14);
        assert!((rec.lambda_min.mean - 1.0).abs() < 1e-14);
        assert_eq!(rec.lambda_min.variance, 0.0);
    }
}
