use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Image2D;
use crate::{Error, Result};

/// Physical frequency (cycles per unit length) of bin `k` in a transform of
/// length `n` over spacing `h`; bins past the middle hold negative frequencies.
#[inline]
pub fn frequency(k: usize, n: usize, h: f64) -> f64 {
    let signed = if k <= (n - 1) / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    };
    signed / (n as f64 * h)
}

/// Whether bin `k` is the Nyquist bin, shared by `+n/2` and `-n/2`.
#[inline]
pub fn is_nyquist(k: usize, n: usize) -> bool {
    n.is_multiple_of(2) && k == n / 2
}

/// Planned 2-D transform for one `width × height` shape.
///
/// Forward uses the kernel `exp(-2πi⟨ξ, X⟩)` and no scaling; the inverse
/// divides by `width·height`, so `∂x` becomes multiplication by `2πiξ₁`.
#[derive(Clone)]
pub struct Fft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl Fft2 {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_fwd, &self.col_fwd);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_inv, &self.col_inv);
        let scale = 1.0 / (self.width * self.height) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], rows: &Arc<dyn Fft<f64>>, cols: &Arc<dyn Fft<f64>>) {
        let (w, h) = (self.width, self.height);
        assert_eq!(data.len(), w * h, "buffer does not match the planned shape");
        rows.process(data);
        let mut t = vec![Complex64::default(); w * h];
        transpose(data, &mut t, w, h);
        cols.process(&mut t);
        transpose(&t, data, h, w);
    }
}

// `src` is `rows × cols` row-major.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Spectrum of an [`Image2D`], same shape, wrap-around frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane {
    width: usize,
    height: usize,
    hx: f64,
    hy: f64,
    data: Vec<Complex64>,
}

impl ComplexPlane {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, kx: usize, ky: usize) -> Complex64 {
        self.data[ky * self.width + kx]
    }

    /// Physical frequency `(ξ₁, ξ₂)` of bin `(kx, ky)`.
    pub fn frequency(&self, kx: usize, ky: usize) -> (f64, f64) {
        (frequency(kx, self.width, self.hx), frequency(ky, self.height, self.hy))
    }
}

pub fn dft2_forward(img: &Image2D) -> ComplexPlane {
    let mut data: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft2::new(img.width(), img.height()).forward(&mut data);
    ComplexPlane {
        width: img.width(),
        height: img.height(),
        hx: img.hx(),
        hy: img.hy(),
        data,
    }
}

/// Inverse transform; the imaginary part of the result is dropped.
pub fn dft2_inverse(p: &ComplexPlane) -> Result<Image2D> {
    let mut data = p.data.clone();
    Fft2::new(p.width, p.height).inverse(&mut data);
    let real: Vec<f64> = data.iter().map(|c| c.re).collect();
    if real.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            what: "inverse DFT",
            residual: f64::NAN,
        });
    }
    Image2D::with_spacing(p.width, p.height, p.hx, p.hy, real)
}
