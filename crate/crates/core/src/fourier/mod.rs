//! Fourier feature maps on the torus and the linear models built on them.
//!
//! Frequencies are stored in half-steps: a component `h` stands for the
//! frequency `h / 2`, so the half-integer spectra produced by rotation
//! encodings are represented exactly. Features are laid out as
//! `[const?, cos w1, sin w1, cos w2, sin w2, ...]`, every entry scaled by
//! `1/sqrt(p)` where `p` counts real features.

mod distance;
mod kernel;
mod regression;
mod separation;

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{RealMatrix, SeededRng};

pub use distance::{
    l2_mu_distance, maximize_abs, sup_distance_grid, FnModel, L2Estimate, LinearModel, Model,
};
pub use kernel::{gram, kernel_min_eig_experiment, KernelEigRecord, KernelMatrix};
pub use regression::{
    empirical_risk, gd_train, least_squares, mnls, null_space_projection, row_space_residual,
    GdOptions, GdTrajectory,
};
pub use separation::{separation_bounds, SeparationRecord};

const TWO_PI: f64 = 2.0 * PI;

/// Positive half `Omega_+` of a real spectrum, in half-step units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrequencySet {
    dim: usize,
    half_steps: Vec<Vec<i64>>,
    include_constant: bool,
}

fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&c| c == 0)
}

fn negate(v: &[i64]) -> Vec<i64> {
    v.iter().map(|c| -c).collect()
}

/// First nonzero component positive.
fn is_canonical(v: &[i64]) -> bool {
    v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

impl FrequencySet {
    /// Build from half-step vectors (component `h` means frequency `h/2`).
    pub fn from_half_steps(
        dim: usize,
        half_steps: Vec<Vec<i64>>,
        include_constant: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("frequency dimension must be >= 1".into()));
        }
        let mut seen = HashSet::new();
        for v in &half_steps {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if is_zero(v) {
                return Err(Error::SupportMismatch(
                    "zero frequency is represented by include_constant".into(),
                ));
            }
            if seen.contains(&negate(v)) {
                return Err(Error::SupportMismatch(format!(
                    "frequency {v:?} stored together with its negation"
                )));
            }
            if !seen.insert(v.clone()) {
                return Err(Error::SupportMismatch(format!("duplicate frequency {v:?}")));
            }
        }
        if half_steps.is_empty() && !include_constant {
            return Err(Error::InvalidDimension("feature map would have p = 0".into()));
        }
        Ok(Self {
            dim,
            half_steps,
            include_constant,
        })
    }

    /// Build from integer frequency vectors.
    pub fn from_integers(
        dim: usize,
        freqs: Vec<Vec<i64>>,
        include_constant: bool,
    ) -> Result<Self> {
        let doubled = freqs
            .into_iter()
            .map(|v| v.into_iter().map(|c| 2 * c).collect())
            .collect();
        Self::from_half_steps(dim, doubled, include_constant)
    }

    /// The first `count` canonical integer vectors of `Z^d`, ordered by
    /// max-norm shell and lexicographically inside a shell.
    pub fn half_lattice(dim: usize, count: usize, include_constant: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("frequency dimension must be >= 1".into()));
        }
        let mut out = Vec::with_capacity(count);
        let mut radius = 1i64;
        while out.len() < count {
            let mut shell: Vec<Vec<i64>> = box_vectors(dim, radius)
                .into_iter()
                .filter(|v| v.iter().map(|c| c.abs()).max() == Some(radius) && is_canonical(v))
                .collect();
            shell.sort();
            for v in shell {
                if out.len() == count {
                    break;
                }
                out.push(v);
            }
            radius += 1;
        }
        Self::from_integers(dim, out, include_constant)
    }

    /// Every canonical vector of the box `[-L, L]^d`.
    pub fn integer_box(dim: usize, max_abs: i64, include_constant: bool) -> Result<Self> {
        if max_abs < 1 {
            return Err(Error::OutOfRange("box half-width must be >= 1".into()));
        }
        let mut v: Vec<Vec<i64>> = box_vectors(dim, max_abs)
            .into_iter()
            .filter(|v| is_canonical(v))
            .collect();
        v.sort();
        Self::from_integers(dim, v, include_constant)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|Omega_+|`.
    pub fn len(&self) -> usize {
        self.half_steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half_steps.is_empty()
    }

    pub fn include_constant(&self) -> bool {
        self.include_constant
    }

    pub fn half_steps(&self) -> &[Vec<i64>] {
        &self.half_steps
    }

    /// Frequency vector `k` in natural units.
    pub fn frequency(&self, k: usize) -> Vec<f64> {
        self.half_steps[k].iter().map(|&h| h as f64 / 2.0).collect()
    }

    /// Period per coordinate: `2 pi` for integer spectra, `4 pi` when some
    /// half-step is odd.
    pub fn period(&self) -> f64 {
        if self.half_steps.iter().flatten().any(|h| h % 2 != 0) {
            2.0 * TWO_PI
        } else {
            TWO_PI
        }
    }
}

fn box_vectors(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for prefix in &out {
            for c in -radius..=radius {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Normalized Fourier feature map `phi(x)`.
#[derive(Clone, Debug, Serialize)]
pub struct FeatureMap {
    frequencies: FrequencySet,
    p: usize,
    scale: f64,
}

impl FeatureMap {
    pub fn new(frequencies: FrequencySet) -> Self {
        let p = 2 * frequencies.len() + usize::from(frequencies.include_constant());
        Self {
            frequencies,
            p,
            scale: 1.0 / (p as f64).sqrt(),
        }
    }

    pub fn frequencies(&self) -> &FrequencySet {
        &self.frequencies
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.frequencies.dim()
    }

    pub fn period(&self) -> f64 {
        self.frequencies.period()
    }

    fn offset(&self) -> usize {
        usize::from(self.frequencies.include_constant())
    }

    /// Position of the cosine feature of frequency `k`; the sine follows it.
    pub fn cos_index(&self, k: usize) -> usize {
        self.offset() + 2 * k
    }

    pub fn sin_index(&self, k: usize) -> usize {
        self.cos_index(k) + 1
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn features_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_input(x)?;
        if out.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: out.len(),
            });
        }
        if self.frequencies.include_constant() {
            out[0] = self.scale;
        }
        let off = self.offset();
        for (k, h) in self.frequencies.half_steps().iter().enumerate() {
            let phase: f64 = h.iter().zip(x).map(|(&h, &xi)| 0.5 * h as f64 * xi).sum();
            let (s, c) = phase.sin_cos();
            out[off + 2 * k] = c * self.scale;
            out[off + 2 * k + 1] = s * self.scale;
        }
        Ok(())
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.p];
        self.features_into(x, &mut out)?;
        Ok(out)
    }

    /// `beta^T phi(x)`.
    pub fn eval(&self, beta: &WeightVector, x: &[f64]) -> Result<f64> {
        self.check_weights(beta)?;
        let phi = self.features(x)?;
        Ok(crate::numeric::dot(beta.as_slice(), &phi))
    }

    pub(crate) fn check_weights(&self, beta: &WeightVector) -> Result<()> {
        if beta.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: beta.len(),
            });
        }
        Ok(())
    }

    /// Data matrix `Phi` with `Phi[i][j] = phi(x_i)_j`.
    pub fn data_matrix(&self, inputs: &[Vec<f64>]) -> Result<RealMatrix> {
        let mut phi = RealMatrix::zeros(inputs.len(), self.p);
        let mut row = vec![0.0; self.p];
        for (i, x) in inputs.iter().enumerate() {
            self.features_into(x, &mut row)?;
            for (j, v) in row.iter().enumerate() {
                phi[(i, j)] = *v;
            }
        }
        Ok(phi)
    }

    /// `||phi(x)||^2`, identical for every x.
    pub fn feature_norm_sq(&self) -> f64 {
        (self.frequencies.len() + self.offset()) as f64 / self.p as f64
    }

    /// `||phi_i||_mu` of feature `i` under the uniform measure on one period.
    pub fn feature_l2_norm(&self, i: usize) -> f64 {
        if self.frequencies.include_constant() && i == 0 {
            self.scale
        } else {
            self.scale * std::f64::consts::FRAC_1_SQRT_2
        }
    }

    /// Exact `||f_a - f_b||_mu` via orthogonality of the trigonometric basis.
    pub fn parseval_distance(&self, a: &WeightVector, b: &WeightVector) -> Result<f64> {
        self.check_weights(a)?;
        self.check_weights(b)?;
        let sq: f64 = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .enumerate()
            .map(|(i, (x, y))| ((x - y) * self.feature_l2_norm(i)).powi(2))
            .sum();
        Ok(sq.sqrt())
    }

    /// `Var_x[f_beta]` under the uniform measure: `(||beta||^2 - beta_0^2) / (2p)`.
    pub fn function_variance(&self, beta: &WeightVector) -> Result<f64> {
        self.check_weights(beta)?;
        let constant = if self.frequencies.include_constant() {
            beta.as_slice()[0].powi(2)
        } else {
            0.0
        };
        Ok((beta.norm_sq() - constant) / (2.0 * self.p as f64))
    }

    /// Uniform samples over one period of this map.
    pub fn sample_inputs(&self, count: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
        let period = self.period();
        (0..count)
            .map(|_| (0..self.dim()).map(|_| rng.random::<f64>() * period).collect())
            .collect()
    }
}

/// Real weight vector aligned with a [`FeatureMap`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self(coefficients)
    }

    pub fn zeros(p: usize) -> Self {
        Self(vec![0.0; p])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &WeightVector) -> WeightVector {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &WeightVector) -> WeightVector {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> WeightVector {
        WeightVector(self.0.iter().map(|a| a * s).collect())
    }
}

/// Training inputs on the torus with scalar targets.
#[derive(Clone, Debug, Serialize)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    /// Validates that inputs lie in `[0, 2 pi)^d`, share one dimension and are
    /// pairwise separated by more than `1e-9`.
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        Self::with_domain(inputs, targets, TWO_PI)
    }

    /// Same as [`Dataset::new`] with inputs allowed in `[0, period)^d`.
    pub fn with_domain(inputs: Vec<Vec<f64>>, targets: Vec<f64>, period: f64) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidDataset("dataset needs at least one point".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let d = inputs[0].len();
        if d == 0 {
            return Err(Error::InvalidDataset("inputs must have dimension >= 1".into()));
        }
        for x in &inputs {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            if x.iter().any(|v| !(0.0..period).contains(v)) {
                return Err(Error::InvalidDataset(format!("input {x:?} outside [0, {period})")));
            }
        }
        for i in 0..inputs.len() {
            for j in (i + 1)..inputs.len() {
                let dist: f64 = inputs[i]
                    .iter()
                    .zip(&inputs[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if dist <= 1e-9 {
                    return Err(Error::InvalidDataset(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { inputs, targets })
    }

    /// Targets from a planted linear model `y_i = beta^T phi(x_i)`.
    pub fn planted(fm: &FeatureMap, inputs: Vec<Vec<f64>>, beta: &WeightVector) -> Result<Self> {
        let targets = inputs
            .iter()
            .map(|x| fm.eval(beta, x))
            .collect::<Result<Vec<_>>>()?;
        Self::with_domain(inputs, targets, fm.period())
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }
}

/// `M` i.i.d. uniform points of `[0, 2 pi)^d`.
pub fn sample_uniform_inputs(m: usize, d: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..d).map(|_| rng.random::<f64>() * TWO_PI).collect())
        .collect()
}
