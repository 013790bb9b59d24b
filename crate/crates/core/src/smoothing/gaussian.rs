use crate::grid::Image2D;
use crate::{Error, Result};

/// Kernel support radius in standard deviations.
pub const TRUNCATION_SIGMAS: f64 = 4.0;

/// Sampled 1-D Gaussian of standard deviation `sigma` (same units as `h`),
/// truncated at 4σ and renormalized to unit discrete mass. Index `r` of the
/// result is the offset `r - radius`.
pub fn gaussian_weights(sigma: f64, h: f64) -> Vec<f64> {
    let radius = (TRUNCATION_SIGMAS * sigma / h).ceil() as i64;
    let mut w: Vec<f64> = (-radius..=radius)
        .map(|i| {
            let x = i as f64 * h;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Separable convolution with the Gaussian of standard deviations
/// `(sigma_x, sigma_y)`, given in the image's length units. The image is
/// taken to be zero outside its domain; the output has the same footprint.
pub fn gaussian_convolve(img: &Image2D, sigma_x: f64, sigma_y: f64) -> Result<Image2D> {
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(Error::invalid(format!(
            "Gaussian widths must be positive, got ({sigma_x}, {sigma_y})"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let kx = gaussian_weights(sigma_x, img.hx());
    let ky = gaussian_weights(sigma_y, img.hy());
    let (rx, ry) = ((kx.len() / 2) as isize, (ky.len() / 2) as isize);
    let src = img.data();

    let mut tmp = vec![0.0; w * h];
    for iy in 0..h {
        let row = &src[iy * w..(iy + 1) * w];
        for ix in 0..w {
            let lo = (ix as isize - rx).max(0) as usize;
            let hi = ((ix as isize + rx) as usize).min(w - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += kx[(j as isize - ix as isize + rx) as usize] * row[j];
            }
            tmp[iy * w + ix] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for iy in 0..h {
        let lo = (iy as isize - ry).max(0) as usize;
        let hi = ((iy as isize + ry) as usize).min(h - 1);
        for j in lo..=hi {
            let wgt = ky[(j as isize - iy as isize + ry) as usize];
            let src_row = &tmp[j * w..(j + 1) * w];
            let dst_row = &mut out[iy * w..(iy + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += wgt * s;
            }
        }
    }
    img.with_data(out)
}
