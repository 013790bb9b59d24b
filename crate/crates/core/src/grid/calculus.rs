use super::Image2D;
use crate::{Error, Result};

/// Partial derivatives `∂x f`, `∂y f` sampled on the image grid.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub dx: Image2D,
    pub dy: Image2D,
}

impl GradientField {
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.dx.get(ix, iy), self.dy.get(ix, iy))
    }

    pub fn max_norm(&self) -> f64 {
        self.dx
            .data()
            .iter()
            .zip(self.dy.data())
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }
}

/// Second derivatives, obtained by differentiating the discrete gradient once
/// more. The mixed term is symmetrized.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub dxx: Image2D,
    pub dxy: Image2D,
    pub dyy: Image2D,
}

impl HessianField {
    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> [f64; 3] {
        [self.dxx.get(ix, iy), self.dxy.get(ix, iy), self.dyy.get(ix, iy)]
    }
}

// Second-order stencil along one line of samples with stride `stride`.
fn diff_line(src: &[f64], dst: &mut [f64], n: usize, stride: usize, offset: usize, h: f64) {
    let at = |i: usize| src[offset + i * stride];
    let inv = 1.0 / (2.0 * h);
    dst[offset] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv;
    for i in 1..n - 1 {
        dst[offset + i * stride] = (at(i + 1) - at(i - 1)) * inv;
    }
    dst[offset + (n - 1) * stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv;
}

fn diff_x(img: &Image2D) -> Image2D {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    for iy in 0..h {
        diff_line(img.data(), &mut out, w, 1, iy * w, img.hx());
    }
    img.with_data(out).expect("derivative of a finite image is finite")
}

fn diff_y(img: &Image2D) -> Image2D {
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0; w * h];
    for ix in 0..w {
        diff_line(img.data(), &mut out, h, w, ix, img.hy());
    }
    img.with_data(out).expect("derivative of a finite image is finite")
}

/// Central differences inside, second-order one-sided stencils on the border.
pub fn gradient(img: &Image2D) -> Result<GradientField> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::invalid(format!(
            "gradient needs at least 3x3 pixels, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(GradientField {
        dx: diff_x(img),
        dy: diff_y(img),
    })
}

pub fn hessian(grad: &GradientField) -> HessianField {
    let dxx = diff_x(&grad.dx);
    let dyy = diff_y(&grad.dy);
    let a = diff_y(&grad.dx);
    let b = diff_x(&grad.dy);
    let dxy = a
        .with_data(a.data().iter().zip(b.data()).map(|(p, q)| 0.5 * (p + q)).collect())
        .expect("finite");
    HessianField { dxx, dxy, dyy }
}
