//! Closed-form heat kernels of the sub-Riemannian diffusion, written as
//! Mathieu-function series over the irreducible representations of SE(2).
//!
//! These are independent of the Fourier-space solver in
//! [`evolution`](crate::evolution) and serve as its reference.

mod group;
mod heat;
mod mathieu;

pub use group::{representation_apply, Se2};
pub use heat::{heat_kernel_ptr2, heat_kernel_se2, KernelQuadrature, Se2HeatKernel, KERNEL_PLANCHEREL};
pub use mathieu::{default_truncation, mathieu_basis, MathieuBasis, MathieuClass, MathieuFunction};
