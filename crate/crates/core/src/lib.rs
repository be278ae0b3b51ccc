//! Numerical laboratory for overparameterized Fourier regression and the
//! quantum Fourier models it is compared against.

pub mod dlp;
pub mod error;
pub mod fourier;
pub mod numeric;
pub mod perfect;
pub mod quantum;
pub mod rff;
pub mod stats;

pub use error::{Error, Result};
pub use fourier::{Dataset, FeatureMap, FrequencySet, KernelMatrix, WeightVector};
pub use numeric::{ComplexMatrix, RealMatrix, SeededRng};
pub use quantum::{DiagonalEncoding, GolombRuler, Observable, QuantumModel, QuantumModelCoeffs};
