//! Exact simulation of quantum Fourier models built from a diagonal encoding
//! layer, and the Haar-moment predictions for their weight vectors.

mod encoding;
mod model;
mod moments;
mod observable;

pub use encoding::{
    balanced_ternary_digits, ternary_redundancy_closed_form, ternary_sum_r2_closed_form,
    DiagonalEncoding, GolombRuler, RedundancyMap,
};
pub use model::{fft_coeffs_oracle, oracle_grid, FftCoeffs, QuantumModel, QuantumModelCoeffs};
pub use moments::{
    approx_design_norm_bound, beta_norm_variance_prediction, expected_beta_norm_reuploading,
    expected_beta_norm_simple, monte_carlo_norm_stats, weingarten_w2, weingarten_w4, ModelKind,
    NormPrediction, NormStats, ReuploadingPrediction,
};
pub use observable::Observable;
