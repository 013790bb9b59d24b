//! Gaussian pre-smoothing and the numerical Morse analysis of smoothed
//! images.

mod gaussian;
mod morse;
mod transversality;

pub use gaussian::{gaussian_convolve, gaussian_weights, TRUNCATION_SIGMAS};
pub use morse::{
    find_critical_points, find_critical_points_in, morse_genericity_trial, CriticalKind, CriticalPoint, MorseReport,
    MorseTolerances,
};
pub use transversality::{transversality_determinant, transversality_matrix, TransversalityMatrix};
