//! Deterministic random sampling and dense linear algebra shared by the
//! rest of the crate.
//!
//! Every Monte Carlo loop in the crate draws from a [`SeededRng`] addressed by
//! `(seed, stream)`. A trial never shares a stream with another trial, so
//! ensemble statistics are identical whatever the rayon thread count.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Counter-based random stream identified by `(seed, stream)`.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Child stream for sub-task `child`. Depends only on `(seed, stream, child)`,
    /// never on how many values have already been drawn from `self`.
    pub fn fork(&self, child: u64) -> SeededRng {
        SeededRng::new(self.seed, splitmix64(self.stream ^ splitmix64(child.wrapping_add(1))))
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed `n x n` unitary.
///
/// Complex Ginibre matrix, Householder QR, then each column of `Q` is
/// multiplied by the phase of the matching diagonal entry of `R`. Without the
/// phase fix the result is not Haar distributed.
pub fn haar_unitary(n: usize, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("unitary dimension must be >= 1".into()));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        entries.push(Complex64::new(re * scale, im * scale));
    }
    let ginibre = ComplexMatrix::from_row_slice(n, n, &entries);
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// `max |(U^dagger U - I)_ij|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let gram = u.adjoint() * u;
    let n = u.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn check_symmetric(s: &RealMatrix) -> Result<()> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let scale = s.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut asym = 0.0f64;
    for i in 0..s.nrows() {
        for j in (i + 1)..s.ncols() {
            asym = asym.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(s: &RealMatrix) -> Result<Vec<f64>> {
    check_symmetric(s)?;
    if s.nrows() == 0 {
        return Err(Error::InvalidDimension("empty matrix".into()));
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_eig_min(s: &RealMatrix) -> Result<f64> {
    Ok(sym_eigenvalues(s)?[0])
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_eig_max(s: &RealMatrix) -> Result<f64> {
    let eig = sym_eigenvalues(s)?;
    Ok(eig[eig.len() - 1])
}

/// Minimum-norm solution of the underdetermined system `A x = y` (`A` is
/// `M x p` with `p >= M` and full row rank), computed from the thin SVD.
pub fn min_norm_lstsq(a: &RealMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let (m, p) = a.shape();
    if m == 0 {
        return Err(Error::InvalidDimension("system has no rows".into()));
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    if p < m {
        return Err(Error::InvalidDimension(format!(
            "minimum-norm solve needs p >= M, got {m}x{p}"
        )));
    }
    let svd = a.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let s_max = sigma.max();
    let s_min = sigma.min();
    let threshold = 1e-10 * s_max;
    if s_min <= threshold {
        return Err(Error::RankDeficient {
            singular_value: s_min,
            threshold,
        });
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let y = DVector::from_column_slice(y);
    let mut coeffs = u.transpose() * y;
    for (c, s) in coeffs.iter_mut().zip(sigma.iter()) {
        *c /= s;
    }
    let x = v_t.transpose() * coeffs;
    Ok(x.iter().copied().collect())
}

/// Solve `S x = b` for symmetric positive definite `S`.
pub(crate) fn solve_spd(s: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let chol = Cholesky::new(s.clone()).ok_or_else(|| Error::SingularKernel {
        lambda_min: sym_eig_min(s).unwrap_or(f64::NAN),
    })?;
    let x = chol.solve(&DVector::from_column_slice(b));
    Ok(x.iter().copied().collect())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_one_by_one_is_a_phase() {
        let mut rng = SeededRng::new(3, 0);
        let u = haar_unitary(1, &mut rng).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = SeededRng::new(11, 4);
        for n in [2, 4, 7, 16] {
            let u = haar_unitary(n, &mut rng).unwrap();
            assert!(unitarity_deviation(&u) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn haar_rejects_zero_dimension() {
        let mut rng = SeededRng::new(0, 0);
        assert!(matches!(haar_unitary(0, &mut rng), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn haar_is_reproducible() {
        let a = haar_unitary(5, &mut SeededRng::new(42, 9)).unwrap();
        let b = haar_unitary(5, &mut SeededRng::new(42, 9)).unwrap();
        assert_eq!(a, b);
        let c = haar_unitary(5, &mut SeededRng::new(42, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn haar_first_moment() {
        // E|U_ij|^2 = 1/N for every entry; the grand mean over all (i, j) is
        // exactly 1/N by unitarity, so each entry's empirical mean must sit
        // within 3 standard errors of the grand mean.
        let n = 4;
        let draws = 20_000;
        let base = SeededRng::new(2024, 0);
        let mut sums = vec![0.0; n * n];
        let mut sq = vec![0.0; n * n];
        for t in 0..draws {
            let u = haar_unitary(n, &mut base.fork(t)).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let v = u[(i, j)].norm_sqr();
                    sums[i * n + j] += v;
                    sq[i * n + j] += v * v;
                }
            }
        }
        let grand: f64 = sums.iter().sum::<f64>() / (draws as f64 * (n * n) as f64);
        assert!((grand - 0.25).abs() < 1e-12);
        for k in 0..n * n {
            let mean = sums[k] / draws as f64;
            let var = sq[k] / draws as f64 - mean * mean;
            let se = (var / draws as f64).sqrt();
            assert!((mean - grand).abs() <= 3.0 * se, "entry {k}: {mean} vs {grand} (se {se})");
        }
    }

    #[test]
    fn eig_min_simple() {
        assert!((sym_eig_min(&RealMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-12);
        let d = RealMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert!((sym_eig_min(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_min_rejects_bad_input() {
        let rect = RealMatrix::zeros(2, 3);
        assert!(matches!(sym_eig_min(&rect), Err(Error::NotSquare { .. })));
        let asym = RealMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(sym_eig_min(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn lstsq_square_identity() {
        let a = RealMatrix::identity(2, 2);
        let x = min_norm_lstsq(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_symmetric_min_norm() {
        let a = RealMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = min_norm_lstsq(&a, &[2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_reports_rank_deficiency() {
        let a = RealMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        match min_norm_lstsq(&a, &[1.0, 2.0]) {
            Err(Error::RankDeficient { singular_value, .. }) => assert!(singular_value < 1e-10),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn fork_is_independent_of_consumption() {
        let mut a = SeededRng::new(5, 1);
        let b = SeededRng::new(5, 1);
        let _ = a.next_u64();
        assert_eq!(a.fork(3).next_u64(), b.fork(3).next_u64());
        assert_ne!(b.fork(3).next_u64(), b.fork(4).next_u64());
    }
}
