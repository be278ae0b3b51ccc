//! Diagonal data encodings `S(x) = diag(exp(-i lambda_j x))` and their
//! frequency redundancies.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{FeatureMap, FrequencySet};

/// Phase slopes in half-steps: slot `j` holds `2 lambda_j`.
///
/// Only differences of slopes matter for the model, so a common shift that
/// makes every slope an integer number of half-steps is applied where needed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalEncoding {
    slopes: Vec<i64>,
    label: String,
}

/// Ordered-pair counts `R(w)` keyed by the half-step frequency `2w`.
pub type RedundancyMap = BTreeMap<i64, usize>;

impl DiagonalEncoding {
    pub fn from_half_step_slopes(slopes: Vec<i64>, label: impl Into<String>) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::InvalidDimension("encoding needs at least one slope".into()));
        }
        Ok(Self {
            slopes,
            label: label.into(),
        })
    }

    /// Single-qubit rotations `RZ(3^k x)` on qubit `k`.
    ///
    /// The slopes `sum_k (2 b_k - 1) 3^k / 4` are shifted by `sum_k 3^k / 4`,
    /// giving `2 lambda_j = sum_k b_k 3^k` where `b_k` is bit `k` of `j`.
    pub fn ternary(n: u32) -> Result<Self> {
        if !(1..=10).contains(&n) {
            return Err(Error::OutOfRange(format!("ternary encoding needs 1 <= n <= 10, got {n}")));
        }
        let slopes = (0..1usize << n)
            .map(|j| {
                (0..n)
                    .filter(|k| j >> k & 1 == 1)
                    .map(|k| 3i64.pow(k))
                    .sum()
            })
            .collect();
        Self::from_half_step_slopes(slopes, format!("ternary-{n}"))
    }

    /// `S(x) = exp(-i x R_G / 2)`, i.e. `2 lambda_j` is mark `j`.
    pub fn golomb(ruler: &GolombRuler) -> Result<Self> {
        if ruler.len() < 2 {
            return Err(Error::InvalidRuler("need at least two marks".into()));
        }
        let slopes = ruler.marks().iter().map(|&m| m as i64).collect();
        Self::from_half_step_slopes(slopes, format!("golomb-{}", ruler.len()))
    }

    pub fn dim(&self) -> usize {
        self.slopes.len()
    }

    /// `log2 N` when `N` is a power of two.
    pub fn qubits(&self) -> Option<u32> {
        let n = self.dim();
        n.is_power_of_two().then(|| n.trailing_zeros())
    }

    pub fn slopes(&self) -> &[i64] {
        &self.slopes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Counts by brute-force enumeration of ordered pairs `(j, k)`.
    pub fn redundancy_map(&self) -> RedundancyMap {
        let mut r = RedundancyMap::new();
        for &a in &self.slopes {
            for &b in &self.slopes {
                *r.entry(a - b).or_insert(0) += 1;
            }
        }
        r
    }

    /// Positive half-step frequencies, ascending.
    pub fn positive_frequencies(&self) -> Vec<i64> {
        self.redundancy_map().into_keys().filter(|&h| h > 0).collect()
    }

    pub fn max_half_step(&self) -> i64 {
        let lo = self.slopes.iter().min().copied().unwrap_or(0);
        let hi = self.slopes.iter().max().copied().unwrap_or(0);
        hi - lo
    }

    /// Feature map over the model spectrum, constant included (`p = |Omega|`).
    pub fn feature_map(&self) -> FeatureMap {
        let freqs = self.positive_frequencies().into_iter().map(|h| vec![h]).collect();
        FeatureMap::new(
            FrequencySet::from_half_steps(1, freqs, true).expect("differences are distinct and nonzero"),
        )
    }

    pub fn period(&self) -> f64 {
        self.feature_map().period()
    }
}

/// Digits of `h` in balanced ternary (least significant first), if `h` fits in
/// `n` digits.
pub fn balanced_ternary_digits(mut h: i64, n: u32) -> Option<Vec<i8>> {
    let mut digits = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let r = h.rem_euclid(3);
        let d = if r == 2 { -1 } else { r as i8 };
        digits.push(d);
        h = (h - d as i64) / 3;
    }
    (h == 0).then_some(digits)
}

/// `R(w) = 2^(number of zero balanced-ternary digits of 2w)` for the ternary
/// encoding on `n` qubits.
pub fn ternary_redundancy_closed_form(h: i64, n: u32) -> Option<usize> {
    balanced_ternary_digits(h, n).map(|d| 1usize << d.iter().filter(|&&x| x == 0).count())
}

/// `sum_{w != 0} R(w)^2` for the ternary encoding: each digit contributes
/// `2^2 + 1 + 1`, minus the zero frequency's `(2^n)^2`.
pub fn ternary_sum_r2_closed_form(n: u32) -> f64 {
    6f64.powi(n as i32) - 4f64.powi(n as i32)
}

/// Integer set whose pairwise differences are all distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GolombRuler {
    marks: Vec<u64>,
}

impl GolombRuler {
    pub fn new(marks: Vec<u64>) -> Result<Self> {
        if marks.first() != Some(&0) {
            return Err(Error::InvalidRuler("first mark must be 0".into()));
        }
        if marks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidRuler("marks must be strictly increasing".into()));
        }
        let mut seen = HashSet::new();
        for i in 0..marks.len() {
            for j in (i + 1)..marks.len() {
                let diff = marks[j] - marks[i];
                if !seen.insert(diff) {
                    return Err(Error::InvalidRuler(format!("difference {diff} repeats")));
                }
            }
        }
        Ok(Self { marks })
    }

    /// Greedy construction: each new mark is the smallest integer keeping all
    /// differences distinct.
    pub fn greedy(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidRuler("need at least two marks".into()));
        }
        let mut marks = vec![0u64];
        let mut diffs = HashSet::new();
        let mut candidate = 1u64;
        while marks.len() < m {
            let new: Vec<u64> = marks.iter().map(|&a| candidate - a).collect();
            let distinct = new.iter().collect::<HashSet<_>>().len() == new.len();
            if distinct && new.iter().all(|d| !diffs.contains(d)) {
                diffs.extend(new);
                marks.push(candidate);
            }
            candidate += 1;
        }
        Self::new(marks)
    }

    pub fn marks(&self) -> &[u64] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_one_qubit() {
        let enc = DiagonalEncoding::ternary(1).unwrap();
        let r = enc.redundancy_map();
        assert_eq!(r, RedundancyMap::from([(-1, 1), (0, 2), (1, 1)]));
    }

    #[test]
    fn ternary_counts() {
        let enc = DiagonalEncoding::ternary(2).unwrap();
        let r = enc.redundancy_map();
        assert_eq!(r.len(), 9);
        assert_eq!(r.values().sum::<usize>(), 16);
        let r3 = DiagonalEncoding::ternary(3).unwrap().redundancy_map();
        let keys: Vec<i64> = r3.keys().copied().collect();
        assert_eq!(keys, (-13..=13).collect::<Vec<_>>());
        assert!(DiagonalEncoding::ternary(0).is_err());
        assert!(DiagonalEncoding::ternary(11).is_err());
    }

    #[test]
    fn ternary_closed_form_matches_enumeration() {
        for n in 1..=5 {
            let r = DiagonalEncoding::ternary(n).unwrap().redundancy_map();
            for (&h, &count) in &r {
                assert_eq!(ternary_redundancy_closed_form(h, n), Some(count), "n={n} h={h}");
            }
            let s: usize = r.iter().filter(|(h, _)| **h != 0).map(|(_, c)| c * c).sum();
            assert_eq!(s as f64, ternary_sum_r2_closed_form(n));
        }
    }

    #[test]
    fn golomb_small_rulers() {
        let r = DiagonalEncoding::golomb(&GolombRuler::new(vec![0, 1, 3]).unwrap())
            .unwrap()
            .redundancy_map();
        assert_eq!(r[&0], 3);
        let nonzero: Vec<i64> = r.keys().copied().filter(|&h| h != 0).collect();
        assert_eq!(nonzero, vec![-3, -2, -1, 1, 2, 3]);
        assert!(r.iter().all(|(&h, &c)| h == 0 || c == 1));

        let r = DiagonalEncoding::golomb(&GolombRuler::new(vec![0, 1, 4, 6]).unwrap())
            .unwrap()
            .redundancy_map();
        assert_eq!(r.len(), 13);
        assert_eq!(r[&0], 4);
        assert_eq!(r.values().sum::<usize>(), 16);
    }

    #[test]
    fn ruler_validation() {
        assert!(GolombRuler::new(vec![0, 1, 2]).is_err());
        assert!(GolombRuler::new(vec![1, 2]).is_err());
        assert!(GolombRuler::new(vec![0, 3, 3]).is_err());
    }

    #[test]
    fn greedy_rulers() {
        assert_eq!(GolombRuler::greedy(2).unwrap().marks(), &[0, 1]);
        assert_eq!(GolombRuler::greedy(3).unwrap().marks(), &[0, 1, 3]);
        let r5 = GolombRuler::greedy(5).unwrap();
        let mut diffs = HashSet::new();
        for a in r5.marks() {
            for b in r5.marks() {
                if a != b {
                    assert!(diffs.insert(*a as i64 - *b as i64));
                }
            }
        }
        assert_eq!(diffs.len(), 20);
        assert_eq!(GolombRuler::greedy(8).unwrap().marks(), &[0, 1, 3, 7, 12, 20, 30, 44]);
    }

    #[test]
    fn redundancy_sums_to_n_squared() {
        for enc in [
            DiagonalEncoding::ternary(4).unwrap(),
            DiagonalEncoding::golomb(&GolombRuler::greedy(16).unwrap()).unwrap(),
        ] {
            let r = enc.redundancy_map();
            assert_eq!(r.values().sum::<usize>(), enc.dim() * enc.dim());
            assert!(r[&0] >= enc.dim());
            for (&h, &c) in &r {
                assert_eq!(r[&-h], c);
            }
        }
    }
}
