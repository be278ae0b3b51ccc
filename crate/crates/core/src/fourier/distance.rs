//! L2(mu) and sup-norm distances between real functions on the torus.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{FeatureMap, WeightVector, TWO_PI};
use crate::error::{Error, Result};
use crate::numeric::SeededRng;
use crate::stats::Summary;

/// A real function on `[0, period)^d`.
pub trait Model: Sync {
    fn dim(&self) -> usize;

    fn period(&self) -> f64 {
        TWO_PI
    }

    fn value(&self, x: &[f64]) -> f64;
}

/// `x -> beta^T phi(x)`.
pub struct LinearModel<'a> {
    fm: &'a FeatureMap,
    beta: &'a WeightVector,
}

impl<'a> LinearModel<'a> {
    pub fn new(fm: &'a FeatureMap, beta: &'a WeightVector) -> Result<Self> {
        fm.check_weights(beta)?;
        Ok(Self { fm, beta })
    }
}

impl Model for LinearModel<'_> {
    fn dim(&self) -> usize {
        self.fm.dim()
    }

    fn period(&self) -> f64 {
        self.fm.period()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.fm.eval(self.beta, x).expect("input dimension checked by caller")
    }
}

/// Wraps a closure as a [`Model`].
pub struct FnModel<F> {
    dim: usize,
    period: f64,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnModel<F> {
    pub fn new(dim: usize, period: f64, f: F) -> Self {
        Self { dim, period, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Model for FnModel<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn period(&self) -> f64 {
        self.period
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct L2Estimate {
    /// `sqrt` of the Monte Carlo mean of `(f - g)^2`.
    pub distance: f64,
    pub squared: f64,
    /// Standard error of `squared`.
    pub squared_stderr: f64,
}

fn common_domain(f: &dyn Model, g: &dyn Model) -> Result<(usize, f64)> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    Ok((f.dim(), f.period().max(g.period())))
}

/// Monte Carlo estimate of `||f - g||_mu` with `mu` uniform on one period.
pub fn l2_mu_distance(
    f: &dyn Model,
    g: &dyn Model,
    n_mc: usize,
    rng: &mut SeededRng,
) -> Result<L2Estimate> {
    if n_mc < 2 {
        return Err(Error::OutOfRange("l2_mu_distance needs n_mc >= 2".into()));
    }
    let (d, period) = common_domain(f, g)?;
    let mut x = vec![0.0; d];
    let sq: Vec<f64> = (0..n_mc)
        .map(|_| {
            for xi in x.iter_mut() {
                *xi = rng.random::<f64>() * period;
            }
            (f.value(&x) - g.value(&x)).powi(2)
        })
        .collect();
    let s = Summary::of(&sq);
    Ok(L2Estimate {
        distance: s.mean.sqrt(),
        squared: s.mean,
        squared_stderr: s.stderr,
    })
}

/// Lower bound on `sup |f - g|`.
///
/// For `d <= 3` this is the maximum over the regular grid with `grid` points
/// per coordinate, so doubling `grid` only adds points. Higher dimensions use
/// the first `grid^3` points of a fixed random sequence, refined by local
/// ascent from its first `4 * grid` points; both sets grow with `grid`.
pub fn sup_distance_grid(f: &dyn Model, g: &dyn Model, grid: usize) -> Result<f64> {
    Ok(sup_search(f, g, grid)?.0)
}

pub(crate) fn sup_search(f: &dyn Model, g: &dyn Model, grid: usize) -> Result<(f64, Vec<f64>)> {
    if grid == 0 {
        return Err(Error::OutOfRange("grid needs at least one point per dimension".into()));
    }
    let (d, period) = common_domain(f, g)?;
    let diff = |x: &[f64]| f.value(x) - g.value(x);
    if d <= 3 {
        let total = grid.pow(d as u32);
        let step = period / grid as f64;
        let point = |mut idx: usize| {
            let mut x = vec![0.0; d];
            for xi in x.iter_mut() {
                *xi = (idx % grid) as f64 * step;
                idx /= grid;
            }
            x
        };
        let (best, at) = (0..total)
            .into_par_iter()
            .map(|i| (diff(&point(i)).abs(), i))
            .reduce(|| (0.0, 0), pick_max);
        Ok((best, point(at)))
    } else {
        let count = grid.pow(3);
        let mut rng = SeededRng::new(0x5eed_5c47, d as u64);
        let pts: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..d).map(|_| rng.random::<f64>() * period).collect())
            .collect();
        let (best, at) = pts
            .par_iter()
            .enumerate()
            .map(|(i, x)| (diff(x).abs(), i))
            .reduce(|| (0.0, 0), pick_max);
        let starts = &pts[..(4 * grid).min(count)];
        let (refined, rx) = maximize_abs(&diff, starts, 200, period);
        if refined > best {
            Ok((refined, rx))
        } else {
            Ok((best, pts[at].clone()))
        }
    }
}

fn pick_max(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    // Ties resolve to the lower index so the result ignores scheduling.
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Multi-start local maximization of `|h|` by finite-difference gradient
/// ascent with backtracking. Returns the best value and its location; the
/// value is never below `|h|` at any start.
pub fn maximize_abs(
    h: &(dyn Fn(&[f64]) -> f64 + Sync),
    starts: &[Vec<f64>],
    steps: usize,
    period: f64,
) -> (f64, Vec<f64>) {
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|x0| ascend(h, x0.clone(), steps, period))
        .collect();
    results
        .into_iter()
        .fold((0.0, starts.first().cloned().unwrap_or_default()), |acc, r| {
            if r.0 > acc.0 {
                r
            } else {
                acc
            }
        })
}

fn ascend(
    h: &(dyn Fn(&[f64]) -> f64 + Sync),
    mut x: Vec<f64>,
    steps: usize,
    period: f64,
) -> (f64, Vec<f64>) {
    let eps = 1e-6 * period.max(1.0);
    let mut val = h(&x).abs();
    let mut t = 0.05 * period;
    let mut grad = vec![0.0; x.len()];
    for _ in 0..steps {
        let mut probe = x.clone();
        for i in 0..x.len() {
            probe[i] = x[i] + eps;
            let up = h(&probe).abs();
            probe[i] = x[i] - eps;
            let down = h(&probe).abs();
            probe[i] = x[i];
            grad[i] = (up - down) / (2.0 * eps);
        }
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn < 1e-14 {
            break;
        }
        loop {
            let cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + t * gi / gn).collect();
            let cv = h(&cand).abs();
            if cv > val {
                x = cand;
                val = cv;
                t *= 1.5;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return (val, x);
            }
        }
    }
    (val, x)
}
