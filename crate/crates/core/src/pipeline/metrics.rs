use super::mask::Mask;
use crate::{Error, Image2D, Result};

/// `10·log₁₀(1/MSE)` over the pixels selected by `mask` (all pixels when
/// `None`); `+∞` when the images agree there.
pub fn psnr(a: &Image2D, b: &Image2D, mask: Option<&Mask>) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::invalid("PSNR needs images of the same size"));
    }
    if let Some(m) = mask {
        if !m.matches(a) {
            return Err(Error::invalid("PSNR mask does not match the images"));
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, (x, y)) in a.data().iter().zip(b.data()).enumerate() {
        if mask.is_none_or(|m| m.data()[i]) {
            sum += (x - y) * (x - y);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::invalid("PSNR mask selects no pixels"));
    }
    let mse = sum / count as f64;
    Ok(if mse == 0.0 { f64::INFINITY } else { -10.0 * mse.log10() })
}
