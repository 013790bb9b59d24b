//! Image reconstruction by hypoelliptic diffusion on the bundle of planar
//! directions.
//!
//! A grayscale image is smoothed with a Gaussian, lifted to a function of
//! `(x, y, θ)` concentrated on the directions of its level lines, diffused with
//! the sub-Riemannian heat operator `(cosθ ∂x + sinθ ∂y)² + β² ∂θ²` and
//! projected back by taking the maximum over each fiber. The diffusion is
//! solved frequency by frequency after a spatial Fourier transform, which
//! turns it into one small periodic θ-problem per frequency.
//!
//! The crate also carries the machinery used to validate that solver
//! independently:
//!
//! * [`kernel`]: closed-form heat kernels on SE(2) and on the projective
//!   tangent bundle, written as Mathieu-function series;
//! * [`curves`]: curve cost functionals, the horizontal control system and
//!   cusp detection;
//! * [`smoothing`]: Gaussian pre-smoothing together with a numerical Morse
//!   analysis of the smoothed image.
//!
//! The [`pipeline`] module wires everything into the end-to-end
//! reconstruction used by the `hypoinpaint` binary.

pub mod curves;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod kernel;
pub mod lifting;
pub mod pipeline;
pub mod smoothing;

mod linalg;

pub use error::{Error, Result};
pub use grid::{AngleGrid, ComplexPlane, Image2D, LiftedField, Period};
