//! The discrete-logarithm quantum model: a permutation unitary
//! `|i> -> |log_g i + 1>` on labels `1..N` of `Z_P^*` with `P = N + 1`,
//! measured with a single-bit `Z` observable after an `RY` product state.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::SeededRng;
use crate::stats::{variance_stderr, Summary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlpInstance {
    n: u32,
    modulus: u64,
    generator: u64,
    bit_index: u32,
    /// `log_table[i - 1] = log_g(i)` for labels `i = 1..N`.
    log_table: Vec<u64>,
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Multiplicative order of `g` modulo prime `p`, by walking its powers.
fn order(g: u64, p: u64) -> u64 {
    let mut x = g % p;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, g, p);
        k += 1;
    }
    k
}

impl DlpInstance {
    /// `P = 2^n + 1` must be prime; `g` is the smallest generator of `Z_P^*`.
    pub fn new(n: u32, bit_index: u32) -> Result<Self> {
        if !(1..=16).contains(&n) {
            return Err(Error::OutOfRange(format!("qubit count {n} outside 1..=16")));
        }
        if bit_index >= n {
            return Err(Error::OutOfRange(format!("bit index {bit_index} outside 0..{n}")));
        }
        let big_n = 1u64 << n;
        let modulus = big_n + 1;
        if !is_prime(modulus) {
            return Err(Error::CompositeModulus { n, modulus });
        }
        let generator = (2..modulus)
            .find(|&g| order(g, modulus) == big_n)
            .expect("a cyclic group has a generator");
        let mut log_table = vec![0u64; big_n as usize];
        let mut x = 1u64;
        for k in 0..big_n {
            log_table[(x - 1) as usize] = k;
            x = mul_mod(x, generator, modulus);
        }
        Ok(Self {
            n,
            modulus,
            generator,
            bit_index,
            log_table,
        })
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn bit_index(&self) -> u32 {
        self.bit_index
    }

    /// `log_g(label)` for `label` in `1..=N`.
    pub fn log(&self, label: u64) -> u64 {
        self.log_table[(label - 1) as usize]
    }

    pub fn generator_is_prime(&self) -> bool {
        is_prime(self.generator)
    }
}

/// `pi(i) = log_g(i) + 1` on labels `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlpPermutation {
    /// `image[i - 1] = pi(i)`.
    image: Vec<u64>,
}

impl DlpPermutation {
    pub fn new(inst: &DlpInstance) -> Self {
        Self {
            image: inst.log_table.iter().map(|l| l + 1).collect(),
        }
    }

    pub fn apply(&self, label: u64) -> u64 {
        self.image[(label - 1) as usize]
    }

    pub fn image(&self) -> &[u64] {
        &self.image
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.image.len();
        let mut seen = vec![false; n];
        for &v in &self.image {
            if v == 0 || v as usize > n || seen[v as usize - 1] {
                return false;
            }
            seen[v as usize - 1] = true;
        }
        true
    }
}

/// `d_i = (-1)^(bit b of pi(i + 1))` for basis index `i`.
pub fn dlp_observable_diag(inst: &DlpInstance) -> Vec<f64> {
    let perm = DlpPermutation::new(inst);
    (1..=inst.dim() as u64)
        .map(|label| sign_of_bit(perm.apply(label), inst.bit_index))
        .collect()
}

fn sign_of_bit(v: u64, bit: u32) -> f64 {
    if v >> bit & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn check_angles(inst: &DlpInstance, x: &[f64]) -> Result<()> {
    if x.len() != inst.n as usize {
        return Err(Error::DimensionMismatch {
            expected: inst.n as usize,
            got: x.len(),
        });
    }
    Ok(())
}

/// Amplitudes of `prod_k RY(x_k) |0>`; qubit `k` is bit `k` of the index.
fn product_state(x: &[f64]) -> Vec<f64> {
    let mut amp = vec![1.0];
    for (k, &xk) in x.iter().enumerate() {
        let (s, c) = (0.5 * xk).sin_cos();
        let mut next = vec![0.0; amp.len() * 2];
        for (i, a) in amp.iter().enumerate() {
            next[i] = a * c;
            next[i | 1 << k] = a * s;
        }
        amp = next;
    }
    amp
}

/// `<psi(x)| U^dag Z_b U |psi(x)>`: the state is permuted by `U` and the bit
/// of the permuted label is measured.
pub fn dlp_model_eval(inst: &DlpInstance, x: &[f64]) -> Result<f64> {
    check_angles(inst, x)?;
    let perm = DlpPermutation::new(inst);
    let psi = product_state(x);
    let mut permuted = vec![0.0; psi.len()];
    for (i, a) in psi.iter().enumerate() {
        permuted[(perm.apply(i as u64 + 1) - 1) as usize] = *a;
    }
    Ok(permuted
        .iter()
        .enumerate()
        .map(|(j, a)| a * a * sign_of_bit(j as u64 + 1, inst.bit_index))
        .sum())
}

/// `phi_y(x) = 2^-n prod_k (1 + (-1)^(y_k) cos x_k)`.
pub fn dlp_feature(y: usize, x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, xk)| {
            let sign = if y >> k & 1 == 1 { -1.0 } else { 1.0 };
            0.5 * (1.0 + sign * xk.cos())
        })
        .product()
}

/// `sum_y d_y phi_y(x)`.
pub fn dlp_expansion_eval(inst: &DlpInstance, diag: &[f64], x: &[f64]) -> Result<f64> {
    check_angles(inst, x)?;
    Ok(diag.iter().enumerate().map(|(y, d)| d * dlp_feature(y, x)).sum())
}

/// Largest gap between circuit evaluation and feature expansion over
/// uniform random angles.
pub fn dlp_expansion_check(inst: &DlpInstance, n_points: usize, rng: &mut SeededRng) -> Result<f64> {
    let diag = dlp_observable_diag(inst);
    let mut worst: f64 = 0.0;
    for _ in 0..n_points {
        let x: Vec<f64> = (0..inst.n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let gap = (dlp_model_eval(inst, &x)? - dlp_expansion_eval(inst, &diag, &x)?).abs();
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn corner(n: u32, index: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if index >> k & 1 == 1 { std::f64::consts::PI } else { 0.0 })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CornerMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and population variance of `f` over the `2^n` inputs in `{0, pi}^n`.
pub fn dlp_variance_exact(inst: &DlpInstance) -> Result<CornerMoments> {
    let values = (0..inst.dim())
        .map(|i| dlp_model_eval(inst, &corner(inst.n, i)))
        .collect::<Result<Vec<_>>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(CornerMoments { mean, variance })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContinuousVariance {
    pub variance: f64,
    pub stderr: f64,
}

/// Variance of `f` under uniform angles in `[0, 2 pi)^n`.
pub fn dlp_variance_monte_carlo(
    inst: &DlpInstance,
    n_mc: usize,
    rng: &mut SeededRng,
) -> Result<ContinuousVariance> {
    let values = (0..n_mc)
        .map(|_| {
            let x: Vec<f64> = (0..inst.n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            dlp_model_eval(inst, &x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuousVariance {
        variance: Summary::of(&values).variance,
        stderr: variance_stderr(&values),
    })
}

/// `E_{x in {0,pi}^n}[phi_y(x)^2]`, by enumeration.
pub fn dlp_feature_second_moment(inst: &DlpInstance, y: usize) -> f64 {
    (0..inst.dim())
        .map(|i| dlp_feature(y, &corner(inst.n, i)).powi(2))
        .sum::<f64>()
        / inst.dim() as f64
}

/// `|beta_y| 2^n ||phi_y||_mu` with the corner measure, maximized over `y`.
pub fn dlp_rff_obstruction(inst: &DlpInstance) -> f64 {
    let diag = dlp_observable_diag(inst);
    (0..inst.dim())
        .map(|y| diag[y].abs() * inst.dim() as f64 * dlp_feature_second_moment(inst, y).sqrt())
        .fold(0.0, f64::max)
}
