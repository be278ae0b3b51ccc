//! Hermitian observables: Pauli strings and balanced diagonal sign patterns.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::ComplexMatrix;

#[derive(Clone, Debug)]
pub struct Observable {
    label: String,
    matrix: ComplexMatrix,
}

fn pauli_entry(c: char, row: usize, col: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match (c, row, col) {
        ('I', r, c) => if r == c { one } else { zero },
        ('X', r, c) => if r != c { one } else { zero },
        ('Y', 0, 1) => Complex64::new(0.0, -1.0),
        ('Y', 1, 0) => Complex64::new(0.0, 1.0),
        ('Y', _, _) => zero,
        ('Z', 0, 0) => one,
        ('Z', 1, 1) => -one,
        _ => zero,
    }
}

impl Observable {
    /// Pauli string; character `k` acts on qubit `k`, which is bit `k` of the
    /// basis index.
    pub fn pauli(string: &str) -> Result<Self> {
        if string.is_empty() || string.len() > 12 {
            return Err(Error::OutOfRange(format!("Pauli string length {} not in 1..=12", string.len())));
        }
        let chars: Vec<char> = string.chars().collect();
        if let Some(c) = chars.iter().find(|c| !"IXYZ".contains(**c)) {
            return Err(Error::OutOfRange(format!("'{c}' is not a Pauli letter")));
        }
        let n = 1usize << chars.len();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| {
            chars
                .iter()
                .enumerate()
                .map(|(k, &c)| pauli_entry(c, i >> k & 1, j >> k & 1))
                .product()
        });
        Ok(Self {
            label: string.to_string(),
            matrix,
        })
    }

    pub fn diagonal(entries: &[f64], label: impl Into<String>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDimension("observable needs dimension >= 1".into()));
        }
        let n = entries.len();
        let mut matrix = ComplexMatrix::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            matrix[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(Self {
            label: label.into(),
            matrix,
        })
    }

    /// `diag(+1, -1, +1, -1, ...)`; traceless only for even `n`.
    pub fn balanced_diagonal(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || n == 0 {
            return Err(Error::NotTraceless { trace: (n % 2) as f64 });
        }
        let entries: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        Self::diagonal(&entries, format!("balanced-diag-{n}"))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; n], format!("identity-{n}"))
    }

    /// `Z` on qubit 0 for power-of-two `n`, otherwise the balanced diagonal.
    pub fn default_for(n: usize) -> Result<Self> {
        if n.is_power_of_two() && n >= 2 {
            let q = n.trailing_zeros() as usize;
            Self::pauli(&format!("Z{}", "I".repeat(q - 1)))
        } else {
            Self::balanced_diagonal(n)
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `||O||_2^2 = Tr(O^dag O)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn require_traceless(&self) -> Result<()> {
        let t = self.trace();
        if t.abs() > 1e-12 {
            return Err(Error::NotTraceless { trace: t });
        }
        Ok(())
    }

    /// `sum_{l,k} |(O (x) O)_{lk}| / N^2 = (sum |O_ij|)^2 / N^2`.
    pub fn tensor_abs_sum_normalized(&self) -> f64 {
        let s: f64 = self.matrix.iter().map(|z| z.norm()).sum();
        let n = self.dim() as f64;
        s * s / (n * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_properties() {
        for s in ["Z", "ZI", "XY", "IYZ", "XXZ"] {
            let o = Observable::pauli(s).unwrap();
            let n = o.dim() as f64;
            assert!(o.hermiticity_deviation() < 1e-15);
            assert!(o.trace().abs() < 1e-15);
            assert!((o.frobenius_sq() - n).abs() < 1e-12);
            let sq = o.matrix() * o.matrix();
            assert!((sq - ComplexMatrix::identity(o.dim(), o.dim())).camax() < 1e-15);
        }
        let id = Observable::pauli("II").unwrap();
        assert_eq!(id.trace(), 4.0);
        assert!(Observable::pauli("ZQ").is_err());
    }

    #[test]
    fn z_on_qubit_zero_follows_bit_zero() {
        let o = Observable::pauli("ZI").unwrap();
        let d: Vec<f64> = (0..4).map(|i| o.matrix()[(i, i)].re).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0, -1.0]);
        assert!(o.is_diagonal());
    }

    #[test]
    fn tensor_sum_matches_enumeration() {
        let o = Observable::pauli("ZZ").unwrap();
        let n = o.dim();
        let mut nonzero = 0usize;
        let mut total = 0.0;
        for l in 0..n * n {
            for k in 0..n * n {
                let v = o.matrix()[(l / n, k / n)] * o.matrix()[(l % n, k % n)];
                if v.norm() > 0.0 {
                    nonzero += 1;
                }
                total += v.norm();
            }
        }
        assert_eq!(nonzero, 16);
        assert!((total / (n * n) as f64 - 1.0).abs() < 1e-15);
        assert!((o.tensor_abs_sum_normalized() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_diagonal_needs_even_dimension() {
        let o = Observable::balanced_diagonal(6).unwrap();
        assert_eq!(o.trace(), 0.0);
        assert_eq!(o.frobenius_sq(), 6.0);
        assert!(Observable::balanced_diagonal(5).is_err());
        assert!(Observable::default_for(8).unwrap().label() == "ZII");
    }
}
