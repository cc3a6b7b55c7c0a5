//! Systematic DFT frames.
//!
//! Builds BCH-DFT generator matrices (real and complex), their subframes and
//! systematic variants, analyses the eigen-structure of subframes, ranks
//! codeword patterns by the variance of the codevectors they produce and
//! simulates quantized encoding with linear reconstruction.
//!
//! Row indices are 0-based inside the library. Everything that faces a user
//! (pattern strings, index lists parsed from text) is 1-based and converted
//! at the boundary.

pub mod error;
pub mod frame;
pub mod linalg;
pub mod search;
pub mod sim;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use frame::{
    build_dft_matrix, build_generator, build_sigma, build_systematic, circular_distance,
    extract_subframe, FrameKind, FrameSpec, PatternMask,
};
pub use linalg::{
    determinant, eig_hermitian, inverse, is_circulant, is_toeplitz, Complex, ComplexMatrix,
    Spectrum,
};
pub use search::{canonical_pattern, enumerate_classes, rank_patterns, DedupMode, SearchResult};
pub use sim::{reconstruct, simulate, NoiseModel, SimReport};
pub use spectral::{
    check_theorem1, check_theorem2, codevector_variance, predicted_mse, sine_product_identity,
    spectrum_report, vandermonde_det, SpectrumReport,
};
