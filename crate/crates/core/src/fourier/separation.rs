//! Relation between the sup distance of two interpolants and their weight norms.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use super::distance::{maximize_abs, sup_search, LinearModel, Model};
use super::kernel::gram;
use super::{Dataset, FeatureMap, WeightVector};
use crate::error::{Error, Result};
use crate::numeric::SeededRng;

const REDRAW_ATTEMPTS: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SeparationRecord {
    /// Grid lower bound on `||f_Q - f_MNLS||_inf`.
    pub lhs_sup: f64,
    /// Grid maximum improved by multi-start local ascent.
    pub lhs_sup_refined: f64,
    /// `sqrt(||beta_Q||^2 - ||beta_MNLS||^2)`.
    pub rhs_norm_gap: f64,
    /// `||beta_Q|| - ||beta_MNLS||`.
    pub norm_difference: f64,
    /// `max_x ||phi(x)||` over the grid.
    pub lipschitz_l: f64,
    /// `sqrt(p) / sqrt(lambda_min(K))` on `p` sampled points.
    pub reverse_c: f64,
    pub forward_holds: bool,
    pub reverse_holds: bool,
}

fn interpolation_residual(fm: &FeatureMap, beta: &WeightVector, ds: &Dataset) -> Result<f64> {
    let phi = fm.data_matrix(ds.inputs())?;
    let pred = phi * DVector::from_column_slice(beta.as_slice());
    Ok(pred
        .iter()
        .zip(ds.targets())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

pub fn separation_bounds(
    fm: &FeatureMap,
    beta_q: &WeightVector,
    beta_mnls: &WeightVector,
    ds: &Dataset,
    grid: usize,
    rng: &mut SeededRng,
) -> Result<SeparationRecord> {
    let y_norm = ds.targets().iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-8 * y_norm.max(1.0);
    for beta in [beta_q, beta_mnls] {
        let residual = interpolation_residual(fm, beta, ds)?;
        if residual > tol {
            return Err(Error::NotInterpolating { residual });
        }
    }
    let fq = LinearModel::new(fm, beta_q)?;
    let fm_model = LinearModel::new(fm, beta_mnls)?;
    let (lhs_sup, at) = sup_search(&fq, &fm_model, grid)?;

    let period = fm.period();
    let mut starts = vec![at];
    starts.extend((0..32).map(|_| (0..fm.dim()).map(|_| rng.random::<f64>() * period).collect()));
    let diff = |x: &[f64]| fq.value(x) - fm_model.value(x);
    let (refined, _) = maximize_abs(&diff, &starts, 200, period);
    let lhs_sup_refined = refined.max(lhs_sup);

    let gap_sq = beta_q.norm_sq() - beta_mnls.norm_sq();
    let rhs_norm_gap = gap_sq.max(0.0).sqrt();
    let norm_difference = beta_q.norm() - beta_mnls.norm();

    let lipschitz_l = grid_feature_norm_max(fm, grid)?;
    let reverse_c = reverse_constant(fm, rng)?;

    Ok(SeparationRecord {
        lhs_sup,
        lhs_sup_refined,
        rhs_norm_gap,
        norm_difference,
        lipschitz_l,
        reverse_c,
        forward_holds: lhs_sup <= lipschitz_l * rhs_norm_gap + 1e-6,
        reverse_holds: norm_difference <= reverse_c * lhs_sup_refined,
    })
}

fn grid_feature_norm_max(fm: &FeatureMap, grid: usize) -> Result<f64> {
    // ||phi(x)|| does not depend on x, but is measured rather than assumed.
    let d = fm.dim();
    let per_dim = if d <= 3 { grid.min(64) } else { 4 };
    let step = fm.period() / per_dim as f64;
    let mut best: f64 = 0.0;
    for mut idx in 0..per_dim.pow(d as u32) {
        let mut x = vec![0.0; d];
        for xi in x.iter_mut() {
            *xi = (idx % per_dim) as f64 * step;
            idx /= per_dim;
        }
        let phi = fm.features(&x)?;
        best = best.max(phi.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    Ok(best)
}

fn reverse_constant(fm: &FeatureMap, rng: &mut SeededRng) -> Result<f64> {
    let p = fm.p();
    for _ in 0..REDRAW_ATTEMPTS {
        let xs = fm.sample_inputs(p, rng);
        let lambda_min = gram(fm, &xs)?.lambda_min()?;
        if lambda_min > 1e-10 {
            return Ok((p as f64).sqrt() / lambda_min.sqrt());
        }
    }
    Err(Error::IndependentPointsNotFound {
        needed: p,
        attempts: REDRAW_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{mnls, null_space_projection, sample_uniform_inputs, FrequencySet};

    fn setup(seed: u64) -> (FeatureMap, Dataset, WeightVector, WeightVector) {
        let fm = FeatureMap::new(FrequencySet::half_lattice(1, 8, true).unwrap());
        let mut rng = SeededRng::new(seed, 0);
        let xs = sample_uniform_inputs(6, 1, &mut rng);
        let y = (0..6).map(|_| rng.random::<f64>() - 0.5).collect();
        let ds = Dataset::new(xs, y).unwrap();
        let b = mnls(&fm, &ds).unwrap();
        let phi = fm.data_matrix(ds.inputs()).unwrap();
        let z = DVector::from_iterator(fm.p(), (0..fm.p()).map(|_| rng.random::<f64>() - 0.5));
        let u = null_space_projection(&phi).unwrap() * z;
        let bq = b.add(&WeightVector::new(u.iter().copied().collect()));
        (fm, ds, b, bq)
    }

    #[test]
    fn identical_interpolants() {
        let (fm, ds, b, _) = setup(1);
        let rec = separation_bounds(&fm, &b, &b, &ds, 256, &mut SeededRng::new(1, 1)).unwrap();
        assert_eq!(rec.lhs_sup, 0.0);
        assert_eq!(rec.rhs_norm_gap, 0.0);
    }

    #[test]
    fn null_space_offset_obeys_both_sides() {
        let (fm, ds, b, bq) = setup(2);
        let rec = separation_bounds(&fm, &bq, &b, &ds, 512, &mut SeededRng::new(2, 1)).unwrap();
        assert!(rec.lhs_sup <= rec.rhs_norm_gap + 1e-6);
        assert!(rec.lipschitz_l <= 1.0 + 1e-12);
        assert!(rec.forward_holds && rec.reverse_holds);
        assert!(rec.lhs_sup_refined >= rec.lhs_sup);
    }

    #[test]
    fn rejects_non_interpolant() {
        let (fm, ds, b, _) = setup(3);
        let off = b.add(&WeightVector::new(vec![0.1; fm.p()]));
        let err = separation_bounds(&fm, &off, &b, &ds, 64, &mut SeededRng::new(3, 1));
        assert!(matches!(err, Err(Error::NotInterpolating { .. })));
    }
}
