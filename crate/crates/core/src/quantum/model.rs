//! Dense simulation of the simple and re-uploading quantum Fourier models and
//! exact extraction of their Fourier coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{DiagonalEncoding, Observable};
use crate::error::{Error, Result};
use crate::fourier::{FeatureMap, Model, WeightVector};
use crate::numeric::{unitarity_deviation, ComplexMatrix};

const UNITARY_TOL: f64 = 1e-10;

/// `w -> c_w` keyed by half-step frequency, with `f(x) = sum_w c_w exp(i w x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumModelCoeffs {
    coeffs: BTreeMap<i64, Complex64>,
}

impl QuantumModelCoeffs {
    pub fn from_map(coeffs: BTreeMap<i64, Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn get(&self, half_step: i64) -> Option<Complex64> {
        self.coeffs.get(&half_step).copied()
    }

    pub fn constant(&self) -> Complex64 {
        self.get(0).unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&h, &c)| (h, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max_w |c_{-w} - conj(c_w)|`.
    pub fn conjugate_symmetry_violation(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(h, c)| match self.coeffs.get(&-h) {
                Some(m) => (m - c.conj()).norm(),
                None => c.norm(),
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_difference(&self, other: &QuantumModelCoeffs) -> f64 {
        let keys: std::collections::BTreeSet<i64> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .map(|h| (self.get(h).unwrap_or_default() - other.get(h).unwrap_or_default()).norm())
            .fold(0.0, f64::max)
    }

    /// `sum_w |c_w|^2` over the whole support, negative frequencies included.
    pub fn sum_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&h, c)| (c * Complex64::from_polar(1.0, 0.5 * h as f64 * x)).re)
            .sum()
    }

    /// Real weights for `fm`: `beta_0 = sqrt(p) c_0`, `beta_cos = 2 sqrt(p) Re c`,
    /// `beta_sin = -2 sqrt(p) Im c`.
    pub fn to_beta(&self, fm: &FeatureMap) -> Result<WeightVector> {
        let freqs = fm.frequencies();
        if freqs.dim() != 1 {
            return Err(Error::SupportMismatch("quantum models have scalar inputs".into()));
        }
        let positive: Vec<i64> = self.coeffs.keys().copied().filter(|&h| h > 0).collect();
        let mut fm_freqs: Vec<i64> = freqs.half_steps().iter().map(|v| v[0]).collect();
        fm_freqs.sort_unstable();
        if positive != fm_freqs {
            return Err(Error::SupportMismatch(format!(
                "feature map has {} positive frequencies, coefficients have {}",
                fm_freqs.len(),
                positive.len()
            )));
        }
        if freqs.include_constant() != self.coeffs.contains_key(&0) {
            return Err(Error::SupportMismatch("constant term tracked on only one side".into()));
        }
        let sp = (fm.p() as f64).sqrt();
        let mut beta = vec![0.0; fm.p()];
        if freqs.include_constant() {
            beta[0] = sp * self.constant().re;
        }
        for (k, v) in freqs.half_steps().iter().enumerate() {
            let c = self.coeffs[&v[0]];
            beta[fm.cos_index(k)] = 2.0 * sp * c.re;
            beta[fm.sin_index(k)] = -2.0 * sp * c.im;
        }
        Ok(WeightVector::new(beta))
    }
}

#[derive(Clone, Debug)]
enum Layers {
    /// `V S(x) |+>^n`.
    Simple { v: ComplexMatrix },
    /// `V2 S(x) V1 |0>`.
    Reuploading { v1: ComplexMatrix, v2: ComplexMatrix },
}

/// A quantum Fourier model `f(x) = <psi(x)| O |psi(x)>`.
#[derive(Clone, Debug)]
pub struct QuantumModel {
    encoding: DiagonalEncoding,
    layers: Layers,
    observable: Observable,
}

fn check_square(m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn check_unitary(m: &ComplexMatrix, n: usize) -> Result<()> {
    check_square(m, n)?;
    let deviation = unitarity_deviation(m);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

impl QuantumModel {
    /// The observable may have a trace; model constructors that need a
    /// traceless one check it themselves.
    pub fn simple(enc: &DiagonalEncoding, v: ComplexMatrix, o: &Observable) -> Result<Self> {
        let n = enc.dim();
        check_unitary(&v, n)?;
        check_square(o.matrix(), n)?;
        Ok(Self {
            encoding: enc.clone(),
            layers: Layers::Simple { v },
            observable: o.clone(),
        })
    }

    pub fn reuploading(
        enc: &DiagonalEncoding,
        v1: ComplexMatrix,
        v2: ComplexMatrix,
        o: &Observable,
    ) -> Result<Self> {
        let n = enc.dim();
        check_unitary(&v1, n)?;
        check_unitary(&v2, n)?;
        check_square(o.matrix(), n)?;
        Ok(Self {
            encoding: enc.clone(),
            layers: Layers::Reuploading { v1, v2 },
            observable: o.clone(),
        })
    }

    pub fn encoding(&self) -> &DiagonalEncoding {
        &self.encoding
    }

    /// Amplitudes of the state entering the encoding layer and the
    /// observable conjugated by the final layer.
    fn pre_state_and_effective_observable(&self) -> (Vec<Complex64>, ComplexMatrix) {
        let n = self.encoding.dim();
        let o = self.observable.matrix();
        match &self.layers {
            Layers::Simple { v } => {
                let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
                (vec![amp; n], v.adjoint() * o * v)
            }
            Layers::Reuploading { v1, v2 } => {
                (v1.column(0).iter().copied().collect(), v2.adjoint() * o * v2)
            }
        }
    }

    /// `c_w = sum_{(j,k): lambda_j - lambda_k = w} conj(a_j) O~_jk a_k`.
    pub fn coeffs(&self) -> QuantumModelCoeffs {
        let (a, eff) = self.pre_state_and_effective_observable();
        let slopes = self.encoding.slopes();
        let simple = matches!(self.layers, Layers::Simple { .. });
        let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (j, &sj) in slopes.iter().enumerate() {
            for (k, &sk) in slopes.iter().enumerate() {
                // In the simple model the diagonal terms add up to Tr(O)/N
                // exactly; that sum is added once below instead of rounding.
                if simple && j == k {
                    map.entry(0).or_default();
                    continue;
                }
                *map.entry(sj - sk).or_default() += a[j].conj() * eff[(j, k)] * a[k];
            }
        }
        if simple {
            let n = slopes.len() as f64;
            *map.entry(0).or_default() += Complex64::new(self.observable.trace() / n, 0.0);
        }
        QuantumModelCoeffs::from_map(map)
    }

    /// Full statevector expectation value; the imaginary part is rounding.
    pub fn expectation(&self, x: f64) -> Complex64 {
        let n = self.encoding.dim();
        let (pre, last) = match &self.layers {
            Layers::Simple { v } => (
                vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n],
                v,
            ),
            Layers::Reuploading { v1, v2 } => (v1.column(0).iter().copied().collect(), v2),
        };
        let encoded: Vec<Complex64> = pre
            .iter()
            .zip(self.encoding.slopes())
            .map(|(a, &s)| a * Complex64::from_polar(1.0, -0.5 * s as f64 * x))
            .collect();
        let psi = last * nalgebra::DVector::from_vec(encoded);
        let o_psi = self.observable.matrix() * &psi;
        psi.dotc(&o_psi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.expectation(x).re
    }
}

impl Model for QuantumModel {
    fn dim(&self) -> usize {
        1
    }

    fn period(&self) -> f64 {
        self.encoding.period()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0])
    }
}

/// Coefficients from the raw model's FFT, restricted to the encoding support.
#[derive(Clone, Debug)]
pub struct FftCoeffs {
    pub coeffs: QuantumModelCoeffs,
    /// Largest bin magnitude outside the encoding's spectrum.
    pub off_support_max: f64,
    pub grid: usize,
}

/// Smallest power of two satisfying the oracle's sampling conditions.
pub fn oracle_grid(enc: &DiagonalEncoding) -> usize {
    let support = enc.redundancy_map().len();
    (4 * support).max(2 * enc.max_half_step() as usize + 1).next_power_of_two()
}

/// Samples `f` on `grid` equispaced points of `[0, 4 pi)` and reads `c_w` off
/// the discrete Fourier transform.
pub fn fft_coeffs_oracle(
    f: &dyn Fn(f64) -> f64,
    enc: &DiagonalEncoding,
    grid: usize,
) -> Result<FftCoeffs> {
    let support = enc.redundancy_map();
    let max_h = enc.max_half_step();
    if grid < 4 * support.len() || grid as i64 <= 2 * max_h {
        return Err(Error::Aliasing {
            grid,
            max_half_step: max_h,
        });
    }
    let period = 4.0 * std::f64::consts::PI;
    let mut buf: Vec<Complex64> = (0..grid)
        .map(|m| Complex64::new(f(m as f64 * period / grid as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
    let scale = 1.0 / grid as f64;
    let bin = |h: i64| buf[h.rem_euclid(grid as i64) as usize] * scale;
    let coeffs = support.keys().map(|&h| (h, bin(h))).collect();
    let half = grid as i64 / 2;
    let off_support_max = ((-half + 1)..half)
        .filter(|h| !support.contains_key(h))
        .map(|h| bin(h).norm())
        .fold(0.0, f64::max);
    Ok(FftCoeffs {
        coeffs: QuantumModelCoeffs::from_map(coeffs),
        off_support_max,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{haar_unitary, SeededRng};
    use crate::quantum::GolombRuler;

    fn hadamards(n: u32) -> ComplexMatrix {
        let dim = 1usize << n;
        let s = 1.0 / (dim as f64).sqrt();
        ComplexMatrix::from_fn(dim, dim, |i, j| {
            let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * s, 0.0)
        })
    }

    #[test]
    fn identity_layer_with_z() {
        let enc = DiagonalEncoding::ternary(1).unwrap();
        let o = Observable::pauli("Z").unwrap();
        let m = QuantumModel::simple(&enc, ComplexMatrix::identity(2, 2), &o).unwrap();
        assert!(m.eval(0.0).abs() < 1e-15);
        let c = m.coeffs();
        assert!(c.iter().all(|(_, v)| v.norm() < 1e-15));
        for x in [0.3, 1.7, 5.0] {
            assert!((m.eval(x) - c.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_observable_gives_pure_constant() {
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let v = haar_unitary(4, &mut SeededRng::new(2, 0)).unwrap();
        let m = QuantumModel::simple(&enc, v, &Observable::identity(4).unwrap()).unwrap();
        let c = m.coeffs();
        assert!((c.constant() - 1.0).norm() < 1e-14);
        assert!(c.iter().filter(|(h, _)| *h != 0).all(|(_, v)| v.norm() < 1e-14));
    }

    #[test]
    fn rejects_non_unitary_and_wrong_size() {
        let enc = DiagonalEncoding::ternary(1).unwrap();
        let o = Observable::pauli("Z").unwrap();
        let bad = ComplexMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(QuantumModel::simple(&enc, bad, &o), Err(Error::NotUnitary { .. })));
        let big = ComplexMatrix::identity(4, 4);
        assert!(QuantumModel::simple(&enc, big, &o).is_err());
    }

    #[test]
    fn haar_instances_agree_with_fft() {
        let mut rng = SeededRng::new(11, 0);
        for enc in [
            DiagonalEncoding::ternary(3).unwrap(),
            DiagonalEncoding::golomb(&GolombRuler::greedy(6).unwrap()).unwrap(),
        ] {
            let o = Observable::default_for(enc.dim()).unwrap();
            let v = haar_unitary(enc.dim(), &mut rng).unwrap();
            let m = QuantumModel::simple(&enc, v, &o).unwrap();
            let c = m.coeffs();
            assert!(c.constant().norm() < 1e-14);
            assert!(c.conjugate_symmetry_violation() < 1e-12);
            let fft = fft_coeffs_oracle(&|x| m.eval(x), &enc, oracle_grid(&enc)).unwrap();
            assert!(c.max_abs_difference(&fft.coeffs) < 1e-9);
            assert!(fft.off_support_max < 1e-9);
        }
    }

    #[test]
    fn hadamard_first_layer_reduces_to_simple_model() {
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let o = Observable::pauli("ZX").unwrap();
        let v = haar_unitary(4, &mut SeededRng::new(3, 0)).unwrap();
        let a = QuantumModel::simple(&enc, v.clone(), &o).unwrap().coeffs();
        let b = QuantumModel::reuploading(&enc, hadamards(2), v, &o).unwrap().coeffs();
        assert!(a.max_abs_difference(&b) < 1e-12);
    }

    #[test]
    fn diagonal_observable_without_final_layer_is_constant() {
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let v1 = haar_unitary(4, &mut SeededRng::new(4, 0)).unwrap();
        let m = QuantumModel::reuploading(&enc, v1, ComplexMatrix::identity(4, 4), &Observable::pauli("ZI").unwrap())
            .unwrap();
        assert!(m.coeffs().iter().filter(|(h, _)| *h != 0).all(|(_, c)| c.norm() < 1e-15));
    }

    #[test]
    fn reuploading_agrees_with_fft() {
        let enc = DiagonalEncoding::ternary(3).unwrap();
        let mut rng = SeededRng::new(5, 0);
        let v1 = haar_unitary(8, &mut rng).unwrap();
        let v2 = haar_unitary(8, &mut rng).unwrap();
        let m = QuantumModel::reuploading(&enc, v1, v2, &Observable::pauli("ZIZ").unwrap()).unwrap();
        let fft = fft_coeffs_oracle(&|x| m.eval(x), &enc, oracle_grid(&enc)).unwrap();
        assert!(m.coeffs().max_abs_difference(&fft.coeffs) < 1e-9);
    }

    #[test]
    fn fft_trivial_signals() {
        let enc = DiagonalEncoding::ternary(1).unwrap();
        let fft = fft_coeffs_oracle(&|_| 0.7, &enc, 16).unwrap();
        assert!((fft.coeffs.constant().re - 0.7).abs() < 1e-15);
        assert!(fft.coeffs.iter().filter(|(h, _)| *h != 0).all(|(_, c)| c.norm() < 1e-15));
        let planted = fft_coeffs_oracle(&|x| (0.5 * x).cos(), &enc, 16).unwrap();
        assert!((planted.coeffs.get(1).unwrap().re - 0.5).abs() < 1e-15);
        assert!(matches!(fft_coeffs_oracle(&|_| 0.0, &enc, 4), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn expectation_is_real_bounded_and_periodic() {
        let enc = DiagonalEncoding::ternary(3).unwrap();
        let mut rng = SeededRng::new(6, 0);
        let v = haar_unitary(8, &mut rng).unwrap();
        let m = QuantumModel::simple(&enc, v, &Observable::pauli("ZII").unwrap()).unwrap();
        for i in 0..100 {
            let x = 0.137 * i as f64;
            let e = m.expectation(x);
            assert!(e.im.abs() < 1e-12);
            assert!(e.re.abs() <= 1.0 + 1e-12);
            assert!((m.eval(x + 4.0 * std::f64::consts::PI) - e.re).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_reproduces_model() {
        let enc = DiagonalEncoding::ternary(3).unwrap();
        let fm = enc.feature_map();
        let mut rng = SeededRng::new(7, 0);
        let v = haar_unitary(8, &mut rng).unwrap();
        let m = QuantumModel::simple(&enc, v, &Observable::pauli("IZI").unwrap()).unwrap();
        let beta = m.coeffs().to_beta(&fm).unwrap();
        for i in 0..50 {
            let x = 0.25 * i as f64;
            assert!((fm.eval(&beta, &[x]).unwrap() - m.eval(x)).abs() < 1e-10);
        }
        let other = DiagonalEncoding::ternary(2).unwrap().feature_map();
        assert!(matches!(m.coeffs().to_beta(&other), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn beta_of_zero_and_real_coefficients() {
        let enc = DiagonalEncoding::ternary(1).unwrap();
        let fm = enc.feature_map();
        let zero = QuantumModelCoeffs::from_map([(-1, Complex64::default()), (0, Complex64::default()), (1, Complex64::default())].into());
        assert!(zero.to_beta(&fm).unwrap().norm() == 0.0);
        let real = QuantumModelCoeffs::from_map(
            [(-1, Complex64::new(0.3, 0.0)), (0, Complex64::default()), (1, Complex64::new(0.3, 0.0))].into(),
        );
        let b = real.to_beta(&fm).unwrap();
        assert_eq!(b.as_slice()[fm.sin_index(0)], 0.0);
    }
}
