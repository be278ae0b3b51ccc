use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is rank deficient: singular value {singular_value:e} below threshold {threshold:e}")]
    RankDeficient { singular_value: f64, threshold: f64 },

    #[error("kernel matrix is singular: lambda_min = {lambda_min:e}")]
    SingularKernel { lambda_min: f64 },

    #[error("step size {step:e} outside (0, {max:e}]")]
    StepOutOfRange { step: f64, max: f64 },

    #[error("weight vector does not interpolate the dataset (residual {residual:e})")]
    NotInterpolating { residual: f64 },

    #[error("could not find {needed} linearly independent feature points after {attempts} attempts")]
    IndependentPointsNotFound { needed: usize, attempts: usize },

    #[error("sampled feature index {index} has zero probability")]
    ZeroProbabilitySample { index: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid Golomb ruler: {0}")]
    InvalidRuler(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("observable must be traceless (trace {trace:e})")]
    NotTraceless { trace: f64 },

    #[error("frequency support mismatch: {0}")]
    SupportMismatch(String),

    #[error("FFT grid of {grid} points aliases frequencies up to {max_half_step} half-steps")]
    Aliasing { grid: usize, max_half_step: i64 },

    #[error("2^{n} + 1 = {modulus} is not prime")]
    CompositeModulus { n: u32, modulus: u64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
