//! Numeric containers shared by every stage: images, lifted fields over
//! `(x, y, θ)`, the periodic angle grid, and spectra.

mod calculus;
mod fourier;

pub use calculus::{gradient, hessian, GradientField, HessianField};
pub use fourier::{dft2_forward, dft2_inverse, frequency, is_nyquist, ComplexPlane, Fft2};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Grayscale image on a uniform grid, row-major, pixel `(ix, iy)` sitting at
/// `(ix·hx, iy·hy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    width: usize,
    height: usize,
    hx: f64,
    hy: f64,
    data: Vec<f64>,
}

impl Image2D {
    /// Unit-spaced image.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_spacing(width, height, 1.0, 1.0, data)
    }

    pub fn with_spacing(width: usize, height: usize, hx: f64, hy: f64, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if width * height != data.len() {
            return Err(Error::invalid(format!(
                "image is {width}x{height} but {} samples were given",
                data.len()
            )));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(Error::invalid("pixel spacing must be strictly positive"));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite intensity at sample {i}")));
        }
        Ok(Self {
            width,
            height,
            hx,
            hy,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            hx: 1.0,
            hy: 1.0,
            data: vec![0.0; width * height],
        }
    }

    /// Samples `f(ix, iy)` over every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        hx: f64,
        hy: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for iy in 0..height {
            for ix in 0..width {
                data.push(f(ix, iy));
            }
        }
        Self::with_spacing(width, height, hx, hy, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable samples. Callers must keep them finite.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.width + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.data[iy * self.width + ix] = v;
    }

    pub fn same_shape(&self, other: &Image2D) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image2D {
        Image2D {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Same footprint, different samples.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Image2D> {
        Image2D::with_spacing(self.width, self.height, self.hx, self.hy, data)
    }

    /// Surrounds the image with `pad` zero pixels on every side.
    pub fn pad_zero(&self, pad: usize) -> Image2D {
        let w = self.width + 2 * pad;
        let h = self.height + 2 * pad;
        let mut data = vec![0.0; w * h];
        for iy in 0..self.height {
            let src = &self.data[iy * self.width..(iy + 1) * self.width];
            let row = (iy + pad) * w + pad;
            data[row..row + self.width].copy_from_slice(src);
        }
        Image2D {
            width: w,
            height: h,
            data,
            ..*self
        }
    }

    /// Window `[x0, x0 + width) × [y0, y0 + height)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Image2D> {
        if x0 + width > self.width || y0 + height > self.height || width == 0 || height == 0 {
            return Err(Error::invalid("crop window outside the image"));
        }
        let mut data = Vec::with_capacity(width * height);
        for iy in y0..y0 + height {
            data.extend_from_slice(&self.data[iy * self.width + x0..iy * self.width + x0 + width]);
        }
        Ok(Image2D {
            width,
            height,
            data,
            ..*self
        })
    }

    /// Quarter turn counter-clockwise in the `(x, y)` frame: the pixel at
    /// `(ix, iy)` moves to `(n-1-iy, ix)`. Square images only.
    pub fn rotate_quarter(&self) -> Result<Image2D> {
        if self.width != self.height {
            return Err(Error::invalid("quarter turn needs a square image"));
        }
        let n = self.width;
        let mut out = self.clone();
        for iy in 0..n {
            for ix in 0..n {
                out.set(n - 1 - iy, ix, self.get(ix, iy));
            }
        }
        Ok(out)
    }
}

/// Period of the angular fiber: π for unoriented directions, 2π on SE(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Pi,
    TwoPi,
}

impl Period {
    pub fn value(self) -> f64 {
        match self {
            Period::Pi => PI,
            Period::TwoPi => 2.0 * PI,
        }
    }

    /// Reduces an angle into `[0, period)`.
    pub fn wrap(self, angle: f64) -> f64 {
        let p = self.value();
        let r = angle.rem_euclid(p);
        // rem_euclid can round up to p itself
        if r >= p {
            0.0
        } else {
            r
        }
    }

    /// Signed circular difference `a - b` reduced into `[-period/2, period/2)`.
    pub fn signed_diff(self, a: f64, b: f64) -> f64 {
        let p = self.value();
        (a - b + 0.5 * p).rem_euclid(p) - 0.5 * p
    }
}

/// Uniform half-open grid `θ_k = k·period/n_theta`, `k = 0..n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleGrid {
    n_theta: usize,
    period: Period,
}

impl AngleGrid {
    pub fn new(n_theta: usize, period: Period) -> Result<Self> {
        if n_theta < 4 {
            return Err(Error::invalid(format!("need at least 4 angle nodes, got {n_theta}")));
        }
        Ok(Self { n_theta, period })
    }

    pub fn len(&self) -> usize {
        self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period.value() / self.n_theta as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_theta).map(move |k| self.node(k))
    }

    /// Number of bins a rotation by `angle` moves the grid, if it is a whole
    /// number of bins.
    pub fn bins_for(&self, angle: f64) -> Option<usize> {
        let b = angle / self.spacing();
        let r = b.round();
        ((b - r).abs() < 1e-9).then(|| (r as i64).rem_euclid(self.n_theta as i64) as usize)
    }
}

/// Real field over `(x, y, θ)`; θ varies fastest in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedField {
    width: usize,
    height: usize,
    hx: f64,
    hy: f64,
    angles: AngleGrid,
    data: Vec<f64>,
}

impl LiftedField {
    pub fn zeros(width: usize, height: usize, hx: f64, hy: f64, angles: AngleGrid) -> Self {
        Self {
            width,
            height,
            hx,
            hy,
            angles,
            data: vec![0.0; width * height * angles.len()],
        }
    }

    /// Zero field over the footprint of `img`.
    pub fn zeros_like(img: &Image2D, angles: AngleGrid) -> Self {
        Self::zeros(img.width, img.height, img.hx, img.hy, angles)
    }

    pub fn from_data(width: usize, height: usize, hx: f64, hy: f64, angles: AngleGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * angles.len() {
            return Err(Error::invalid("lifted field payload does not match its shape"));
        }
        if !(hx > 0.0 && hy > 0.0) {
            return Err(Error::invalid("pixel spacing must be strictly positive"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("lifted field contains non-finite values"));
        }
        Ok(Self {
            width,
            height,
            hx,
            hy,
            angles,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn angles(&self) -> AngleGrid {
        self.angles
    }

    pub fn n_theta(&self) -> usize {
        self.angles.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, ix: usize, iy: usize) -> usize {
        (iy * self.width + ix) * self.angles.len()
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize, k: usize) -> f64 {
        self.data[self.offset(ix, iy) + k]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, k: usize, v: f64) {
        let o = self.offset(ix, iy);
        self.data[o + k] = v;
    }

    pub fn fiber(&self, ix: usize, iy: usize) -> &[f64] {
        let o = self.offset(ix, iy);
        &self.data[o..o + self.angles.len()]
    }

    pub fn fiber_mut(&mut self, ix: usize, iy: usize) -> &mut [f64] {
        let o = self.offset(ix, iy);
        let n = self.angles.len();
        &mut self.data[o..o + n]
    }

    /// Plain sum of all samples.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Riemann sum of the field against `dx dy dθ`.
    pub fn mass(&self) -> f64 {
        self.sum() * self.hx * self.hy * self.angles.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Surrounds the spatial footprint with `pad` zero pixels on every side.
    pub fn pad_zero(&self, pad: usize) -> LiftedField {
        let n = self.angles.len();
        let w = self.width + 2 * pad;
        let h = self.height + 2 * pad;
        let mut out = LiftedField::zeros(w, h, self.hx, self.hy, self.angles);
        for iy in 0..self.height {
            let src = &self.data[iy * self.width * n..(iy + 1) * self.width * n];
            let dst = ((iy + pad) * w + pad) * n;
            out.data[dst..dst + self.width * n].copy_from_slice(src);
        }
        out
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<LiftedField> {
        if x0 + width > self.width || y0 + height > self.height || width == 0 || height == 0 {
            return Err(Error::invalid("crop window outside the field"));
        }
        let n = self.angles.len();
        let mut data = Vec::with_capacity(width * height * n);
        for iy in y0..y0 + height {
            let start = (iy * self.width + x0) * n;
            data.extend_from_slice(&self.data[start..start + width * n]);
        }
        Ok(LiftedField {
            width,
            height,
            data,
            ..*self
        })
    }

    /// Same shape, new samples.
    pub(crate) fn with_data_unchecked(&self, data: Vec<f64>) -> LiftedField {
        debug_assert_eq!(data.len(), self.data.len());
        LiftedField { data, ..*self }
    }

    /// One θ-layer as an image.
    pub fn layer(&self, k: usize) -> Image2D {
        let n = self.angles.len();
        Image2D {
            width: self.width,
            height: self.height,
            hx: self.hx,
            hy: self.hy,
            data: self.data.iter().skip(k).step_by(n).copied().collect(),
        }
    }
}
