//! Haar moments of the weight-vector norm: closed-form predictions and the
//! Monte Carlo harness that checks them.
//!
//! For `W = U O U^dag` with Haar `U`, the second moments are
//! `E[W_jk conj(W_j'k')] = a d_jj' d_kk' + g d_jk d_j'k'` with
//! `a = (N ||O||^2 - Tr(O)^2) / (N (N^2 - 1))` and
//! `g = (N Tr(O)^2 - ||O||^2) / (N (N^2 - 1))`. Every prediction below is a
//! sum of these terms over the redundancy map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DiagonalEncoding, Observable, QuantumModel};
use crate::error::{Error, Result};
use crate::numeric::{haar_unitary, SeededRng};
use crate::stats::{variance_stderr, Summary};

pub fn weingarten_w2(n: usize) -> Result<f64> {
    if n <= 3 {
        return Err(Error::OutOfRange(format!("W2 formula needs N >= 4, got {n}")));
    }
    let n = n as f64;
    Ok(-1.0 / (n.powi(5) - 14.0 * n.powi(3) + 9.0 * n))
}

pub fn weingarten_w4(n: usize) -> Result<f64> {
    if n <= 3 {
        return Err(Error::OutOfRange(format!("W4 formula needs N >= 4, got {n}")));
    }
    let n = n as f64;
    let num = n.powi(4) - 8.0 * n * n + 6.0;
    let den = n.powi(8) - 14.0 * n.powi(6) + 49.0 * n.powi(4) - 36.0 * n * n;
    Ok(num / den)
}

struct HaarPair {
    a: f64,
    g: f64,
}

fn haar_pair(o: &Observable) -> HaarPair {
    let n = o.dim() as f64;
    let f = o.frobenius_sq();
    let t = o.trace();
    let den = n * (n * n - 1.0);
    HaarPair {
        a: (n * f - t * t) / den,
        g: (n * t * t - f) / den,
    }
}

fn check_dims(enc: &DiagonalEncoding, o: &Observable) -> Result<()> {
    if enc.dim() != o.dim() {
        return Err(Error::DimensionMismatch {
            expected: enc.dim(),
            got: o.dim(),
        });
    }
    if enc.dim() < 2 {
        return Err(Error::OutOfRange("moment formulas need N >= 2".into()));
    }
    Ok(())
}

/// Off-diagonal pairs `j != k` with equal slopes.
fn off_diagonal_zero_pairs(enc: &DiagonalEncoding) -> usize {
    enc.redundancy_map()[&0] - enc.dim()
}

fn positive_redundancy_sum(enc: &DiagonalEncoding) -> f64 {
    enc.redundancy_map()
        .iter()
        .filter(|(h, _)| **h > 0)
        .map(|(_, &r)| r as f64)
        .sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormPrediction {
    /// Exact `E ||beta||^2` for this crate's feature convention.
    pub expected: f64,
    /// `p / (N + 1)`, the scaling law quoted for the frequency-count convention.
    pub paper_scaling: f64,
    /// Exact `E[p sum_w |c_w|^2]` over the full spectrum.
    pub expected_full_spectrum: f64,
    pub p: usize,
}

/// `E ||beta||^2` for the simple model `V S(x) |+>` with Haar `V`.
pub fn expected_beta_norm_simple(enc: &DiagonalEncoding, o: &Observable) -> Result<NormPrediction> {
    check_dims(enc, o)?;
    o.require_traceless()?;
    let n = enc.dim() as f64;
    let p = enc.feature_map().p();
    let pf = p as f64;
    let HaarPair { a, .. } = haar_pair(o);
    let c0 = a * off_diagonal_zero_pairs(enc) as f64 / (n * n);
    let pos = a * positive_redundancy_sum(enc) / (n * n);
    Ok(NormPrediction {
        expected: pf * (c0 + 4.0 * pos),
        paper_scaling: pf / (n + 1.0),
        expected_full_spectrum: pf * (c0 + 2.0 * pos),
        p,
    })
}

/// `(p^2 / N^6) sum_{w != 0} R(w)^2 + p^2 / N^4`, an order-of-magnitude
/// predictor for `Var ||beta||^2`.
pub fn beta_norm_variance_prediction(enc: &DiagonalEncoding, o: &Observable) -> Result<f64> {
    check_dims(enc, o)?;
    let n = enc.dim();
    if n <= 3 {
        return Err(Error::OutOfRange(format!("variance predictor needs N >= 4, got {n}")));
    }
    let r2: f64 = enc
        .redundancy_map()
        .iter()
        .filter(|(h, _)| **h != 0)
        .map(|(_, &r)| (r * r) as f64)
        .sum();
    let p = enc.feature_map().p() as f64;
    let n = n as f64;
    Ok(p * p / n.powi(6) * r2 + p * p / n.powi(4))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReuploadingPrediction {
    /// `C1 N^2 p / (N (N + 1)) + Tr(O)^2 / N^2` with
    /// `C1 = (N ||O||^2 - Tr(O)^2) / (N (N^2 - 1))`.
    pub formula: f64,
    /// Exact `E[p sum_w |c_w|^2]` over the full spectrum.
    pub exact_full_spectrum: f64,
    /// Exact `E ||beta||^2` for this crate's feature convention.
    pub exact: f64,
    pub p: usize,
}

/// `E ||beta||^2` for `V2 S(x) V1 |0>` with independent Haar layers.
pub fn expected_beta_norm_reuploading(
    enc: &DiagonalEncoding,
    o: &Observable,
) -> Result<ReuploadingPrediction> {
    check_dims(enc, o)?;
    let n = enc.dim() as f64;
    let p = enc.feature_map().p();
    let pf = p as f64;
    let t = o.trace();
    let HaarPair { a, g } = haar_pair(o);
    let formula = a * n * n * pf / (n * (n + 1.0)) + t * t / (n * n);
    // Moments of a Haar column: E|a_j|^4 = 2/(N(N+1)), E|a_j|^2|a_k|^2 = 1/(N(N+1)).
    let pair = 1.0 / (n * (n + 1.0));
    let c0 = 2.0 * a / (n + 1.0) + g + a * off_diagonal_zero_pairs(enc) as f64 * pair;
    let pos = a * positive_redundancy_sum(enc) * pair;
    Ok(ReuploadingPrediction {
        formula,
        exact_full_spectrum: pf * (c0 + 2.0 * pos),
        exact: pf * (c0 + 4.0 * pos),
        p,
    })
}

/// Upper bound on `E ||beta||^2` when both layers form an `eps`-approximate
/// 2-design in the monomial sense.
pub fn approx_design_norm_bound(n: usize, p: usize, eps: f64, o: &Observable) -> Result<f64> {
    if eps < 0.0 {
        return Err(Error::OutOfRange("eps must be nonnegative".into()));
    }
    if o.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: o.dim(),
        });
    }
    let nf = n as f64;
    let pf = p as f64;
    let t = o.trace();
    let c1 = (nf * o.frobenius_sq() - t * t) / (nf * (nf * nf - 1.0));
    let c2 = o.tensor_abs_sum_normalized();
    let haar = c1 * nf * nf * pf / (nf * (nf + 1.0)) + t * t / (nf * nf);
    Ok(haar + (c1 * eps / (nf * nf) + c2 * eps / (nf * (nf + 1.0))) * nf * nf + c2 * eps * eps * nf * nf)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Simple,
    Reuploading,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormStats {
    pub trials: usize,
    /// `||beta||^2` under this crate's convention.
    pub norm_sq: Summary,
    pub norm_sq_variance_stderr: f64,
    /// `p sum_w |c_w|^2` over the full spectrum.
    pub full_spectrum: Summary,
    pub max_abs_c0: f64,
}

/// Per-trial draws: trial `t` uses stream `rng.fork(t)`, results are reduced
/// in trial order.
pub fn monte_carlo_norm_stats(
    enc: &DiagonalEncoding,
    o: &Observable,
    kind: ModelKind,
    trials: usize,
    rng: &SeededRng,
) -> Result<NormStats> {
    check_dims(enc, o)?;
    if trials < 2 {
        return Err(Error::OutOfRange("monte_carlo_norm_stats needs trials >= 2".into()));
    }
    let n = enc.dim();
    let p = enc.feature_map().p() as f64;
    let rows: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.fork(t as u64);
            let model = match kind {
                ModelKind::Simple => QuantumModel::simple(enc, haar_unitary(n, &mut r)?, o)?,
                ModelKind::Reuploading => {
                    let v1 = haar_unitary(n, &mut r)?;
                    let v2 = haar_unitary(n, &mut r)?;
                    QuantumModel::reuploading(enc, v1, v2, o)?
                }
            };
            let c = model.coeffs();
            let c0 = c.constant();
            let pos: f64 = c.iter().filter(|(h, _)| *h > 0).map(|(_, v)| v.norm_sqr()).sum();
            let norm_sq = p * (c0.norm_sqr() + 4.0 * pos);
            Ok((norm_sq, p * c.sum_sq(), c0.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let full: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(NormStats {
        trials,
        norm_sq: Summary::of(&norms),
        norm_sq_variance_stderr: variance_stderr(&norms),
        full_spectrum: Summary::of(&full),
        max_abs_c0: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::GolombRuler;

    #[test]
    fn weingarten_values() {
        assert!((weingarten_w4(4).unwrap() - 134.0 / 20160.0).abs() < 1e-18);
        assert!((weingarten_w2(4).unwrap() + 1.0 / 164.0).abs() < 1e-18);
        let n = 128f64;
        assert!((n.powi(4) * weingarten_w4(128).unwrap() - 1.0).abs() < 0.01);
        assert!(weingarten_w4(3).is_err());
        assert!(weingarten_w2(2).is_err());
    }

    #[test]
    fn simple_prediction_closed_form() {
        // Distinct slopes: sum over positive frequencies of R is N(N-1)/2.
        for enc in [
            DiagonalEncoding::ternary(3).unwrap(),
            DiagonalEncoding::golomb(&GolombRuler::greedy(6).unwrap()).unwrap(),
        ] {
            let n = enc.dim() as f64;
            let o = Observable::default_for(enc.dim()).unwrap();
            let pred = expected_beta_norm_simple(&enc, &o).unwrap();
            assert!((pred.expected - 2.0 * pred.p as f64 / (n + 1.0)).abs() < 1e-12);
            assert!((pred.expected_full_spectrum - pred.paper_scaling).abs() < 1e-12);
        }
        let id = Observable::identity(8).unwrap();
        assert!(expected_beta_norm_simple(&DiagonalEncoding::ternary(3).unwrap(), &id).is_err());
    }

    #[test]
    fn reuploading_prediction_special_cases() {
        let enc = DiagonalEncoding::ternary(3).unwrap();
        let id = Observable::identity(8).unwrap();
        let pred = expected_beta_norm_reuploading(&enc, &id).unwrap();
        assert!((pred.formula - 1.0).abs() < 1e-14);
        assert!((pred.exact_full_spectrum - pred.p as f64).abs() < 1e-12);

        let z = Observable::pauli("ZII").unwrap();
        let pred = expected_beta_norm_reuploading(&enc, &z).unwrap();
        let (n, p) = (8.0, pred.p as f64);
        assert!((pred.formula - p * n * n / ((n * n - 1.0) * (n + 1.0))).abs() < 1e-12);
        assert!((pred.exact_full_spectrum - p / (n + 1.0)).abs() < 1e-12);
        assert!((pred.exact - p * (2.0 * n + 1.0) / ((n + 1.0) * (n + 1.0))).abs() < 1e-12);
    }

    #[test]
    fn approx_design_bound_shape() {
        let z = Observable::pauli("ZI").unwrap();
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let p = enc.feature_map().p();
        let base = expected_beta_norm_reuploading(&enc, &z).unwrap().formula;
        assert!((approx_design_norm_bound(4, p, 0.0, &z).unwrap() - base).abs() < 1e-15);
        let mut prev = base;
        for eps in [1e-3, 1e-2, 0.1, 1.0] {
            let b = approx_design_norm_bound(4, p, eps, &z).unwrap();
            assert!(b > prev);
            prev = b;
        }
        assert!(approx_design_norm_bound(4, p, -1.0, &z).is_err());
    }

    #[test]
    fn monte_carlo_matches_simple_prediction() {
        let enc = DiagonalEncoding::golomb(&GolombRuler::new(vec![0, 1, 4, 6]).unwrap()).unwrap();
        let o = Observable::pauli("ZI").unwrap();
        let pred = expected_beta_norm_simple(&enc, &o).unwrap();
        let stats = monte_carlo_norm_stats(&enc, &o, ModelKind::Simple, 2000, &SeededRng::new(9, 0)).unwrap();
        assert!(stats.norm_sq.z_score(pred.expected) < 3.0);
        assert_eq!(stats.max_abs_c0, 0.0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let o = Observable::pauli("XZ").unwrap();
        let rng = SeededRng::new(10, 0);
        let a = monte_carlo_norm_stats(&enc, &o, ModelKind::Reuploading, 2, &rng).unwrap();
        let b = monte_carlo_norm_stats(&enc, &o, ModelKind::Reuploading, 2, &rng).unwrap();
        assert_eq!(a.norm_sq, b.norm_sq);
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let enc = DiagonalEncoding::ternary(3).unwrap();
        let o = Observable::pauli("ZII").unwrap();
        let rng = SeededRng::new(12, 0);
        let small = monte_carlo_norm_stats(&enc, &o, ModelKind::Simple, 500, &rng).unwrap();
        let big = monte_carlo_norm_stats(&enc, &o, ModelKind::Simple, 2000, &rng).unwrap();
        let ratio = small.norm_sq.stderr / big.norm_sq.stderr;
        assert!((ratio / 2.0 - 1.0).abs() < 0.3, "ratio {ratio}");
    }
}
