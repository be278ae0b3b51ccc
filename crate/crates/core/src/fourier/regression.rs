//! Least-squares fits in feature space: the minimum-norm interpolant, plain
//! gradient descent on the empirical risk, and the underparameterized
//! normal-equation solve.

use nalgebra::DVector;

use super::{Dataset, FeatureMap, WeightVector};
use crate::error::{Error, Result};
use crate::numeric::{self, RealMatrix};

/// `beta_MNLS = Phi^T (Phi Phi^T)^{-1} y`.
pub fn mnls(fm: &FeatureMap, ds: &Dataset) -> Result<WeightVector> {
    let m = ds.len();
    if fm.p() <= m {
        return Err(Error::InvalidDimension(format!(
            "minimum-norm interpolation needs p > M (p = {}, M = {m})",
            fm.p()
        )));
    }
    let phi = fm.data_matrix(ds.inputs())?;
    let k = &phi * phi.transpose();
    let lambda_min = numeric::sym_eig_min(&k)?;
    if lambda_min <= 1e-10 {
        return Err(Error::SingularKernel { lambda_min });
    }
    let alpha = numeric::solve_spd(&k, ds.targets())?;
    let beta = phi.transpose() * DVector::from_vec(alpha);
    Ok(WeightVector::new(beta.iter().copied().collect()))
}

/// `(Phi^T Phi)^{-1} Phi^T y` for `p <= M`.
pub fn least_squares(fm: &FeatureMap, ds: &Dataset) -> Result<WeightVector> {
    if fm.p() > ds.len() {
        return Err(Error::InvalidDimension(format!(
            "normal equations need p <= M (p = {}, M = {})",
            fm.p(),
            ds.len()
        )));
    }
    let phi = fm.data_matrix(ds.inputs())?;
    let gram = phi.transpose() * &phi;
    let rhs = phi.transpose() * DVector::from_column_slice(ds.targets());
    let rhs: Vec<f64> = rhs.iter().copied().collect();
    Ok(WeightVector::new(numeric::solve_spd(&gram, &rhs)?))
}

/// `(1/M) ||Phi beta - y||^2`.
pub fn empirical_risk(fm: &FeatureMap, beta: &WeightVector, ds: &Dataset) -> Result<f64> {
    fm.check_weights(beta)?;
    let phi = fm.data_matrix(ds.inputs())?;
    let r = residual(&phi, beta.as_slice(), ds.targets());
    Ok(r.iter().map(|v| v * v).sum::<f64>() / ds.len() as f64)
}

fn residual(phi: &RealMatrix, beta: &[f64], y: &[f64]) -> Vec<f64> {
    let pred = phi * DVector::from_column_slice(beta);
    pred.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Orthogonal projector onto the null space of `Phi`.
pub fn null_space_projection(phi: &RealMatrix) -> Result<RealMatrix> {
    let k = phi * phi.transpose();
    let chol = nalgebra::Cholesky::new(k.clone()).ok_or_else(|| Error::SingularKernel {
        lambda_min: numeric::sym_eig_min(&k).unwrap_or(f64::NAN),
    })?;
    let row_proj = phi.transpose() * chol.solve(phi);
    Ok(RealMatrix::identity(phi.ncols(), phi.ncols()) - row_proj)
}

/// `||(I - P_row) beta||`: distance of `beta` from the row space of `Phi`.
pub fn row_space_residual(phi: &RealMatrix, beta: &WeightVector) -> Result<f64> {
    let proj = null_space_projection(phi)?;
    Ok((proj * DVector::from_column_slice(beta.as_slice())).norm())
}

#[derive(Clone, Debug)]
pub struct GdOptions {
    /// Step size; defaults to `0.9 / lambda_max(Phi^T Phi)`.
    pub step: Option<f64>,
    pub max_iters: usize,
    /// Stop once `||Phi beta - y|| < tol`.
    pub tol: f64,
    /// Keep every k-th iterate (the first and last are always kept).
    pub record_every: Option<usize>,
    /// Initial weights; zero when absent.
    pub init: Option<WeightVector>,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self {
            step: None,
            max_iters: 1_000_000,
            tol: 1e-10,
            record_every: None,
            init: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GdTrajectory {
    pub step: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    /// `(iteration, beta_k)` pairs as selected by `record_every`.
    pub iterates: Vec<(usize, WeightVector)>,
    pub final_beta: WeightVector,
}

/// Gradient descent `beta <- beta + step * Phi^T (y - Phi beta)`.
pub fn gd_train(fm: &FeatureMap, ds: &Dataset, opts: &GdOptions) -> Result<GdTrajectory> {
    let phi = fm.data_matrix(ds.inputs())?;
    let phi_t = phi.transpose();
    let lambda_max = numeric::sym_eig_max(&(&phi * &phi_t))?;
    let max_step = 1.0 / lambda_max;
    let step = opts.step.unwrap_or(0.9 * max_step);
    if !(step > 0.0 && step <= max_step * (1.0 + 1e-12)) {
        return Err(Error::StepOutOfRange {
            step,
            max: max_step,
        });
    }
    let mut beta = match &opts.init {
        Some(b) => {
            fm.check_weights(b)?;
            DVector::from_column_slice(b.as_slice())
        }
        None => DVector::zeros(fm.p()),
    };
    let y = DVector::from_column_slice(ds.targets());
    let mut iterates = Vec::new();
    let record = |k: usize, b: &DVector<f64>, out: &mut Vec<(usize, WeightVector)>| {
        out.push((k, WeightVector::new(b.iter().copied().collect())));
    };
    record(0, &beta, &mut iterates);

    let mut k = 0;
    let mut r = &y - &phi * &beta;
    let mut res_norm = r.norm();
    while res_norm >= opts.tol && k < opts.max_iters {
        beta.axpy(step, &(&phi_t * &r), 1.0);
        k += 1;
        if let Some(every) = opts.record_every {
            if every > 0 && k % every == 0 {
                record(k, &beta, &mut iterates);
            }
        }
        r = &y - &phi * &beta;
        res_norm = r.norm();
    }
    if iterates.last().map(|(i, _)| *i) != Some(k) {
        record(k, &beta, &mut iterates);
    }
    Ok(GdTrajectory {
        step,
        iterations: k,
        converged: res_norm < opts.tol,
        final_residual: res_norm,
        iterates,
        final_beta: WeightVector::new(beta.iter().copied().collect()),
    })
}
