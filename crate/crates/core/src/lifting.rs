//! Lifting an image to the bundle of directions: each pixel is spread over
//! the θ-bins around the direction of its level line.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::{gradient, hessian, GradientField, HessianField};
use crate::{AngleGrid, Error, Image2D, LiftedField, Period, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftParams {
    /// Half-width of the angular window, in radians.
    pub epsilon: f64,
    pub n_theta: usize,
    pub period: Period,
    /// Gradient magnitude below which a pixel has no level direction.
    /// `None` picks `1e-3 · max|∇f|`, floored at rounding level.
    pub zero_grad_tol: Option<f64>,
}

impl LiftParams {
    /// Window half-width of one bin.
    pub fn new(n_theta: usize, period: Period) -> Self {
        Self {
            epsilon: period.value() / n_theta as f64,
            n_theta,
            period,
            zero_grad_tol: None,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn angles(&self) -> Result<AngleGrid> {
        AngleGrid::new(self.n_theta, self.period)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.angles()?;
        let p = self.period.value();
        if !(self.epsilon > 0.0 && self.epsilon < 0.5 * p) {
            return Err(Error::invalid(format!(
                "epsilon {} must lie in (0, {})",
                self.epsilon,
                0.5 * p
            )));
        }
        if self.epsilon < grid.spacing() * (1.0 - 1e-9) {
            return Err(Error::invalid(format!(
                "epsilon {} is narrower than one angle bin ({})",
                self.epsilon,
                grid.spacing()
            )));
        }
        if let Some(t) = self.zero_grad_tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::invalid("zero_grad_tol must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Direction of the level line through a point with gradient `g`, i.e.
/// `arg(g) − π/2` reduced into `[0, period)`. `None` when `|g| ≤ tol`.
pub fn level_direction(g: (f64, f64), period: Period, tol: f64) -> Option<f64> {
    if g.0.hypot(g.1) <= tol {
        return None;
    }
    Some(period.wrap(g.1.atan2(g.0) - 0.5 * std::f64::consts::PI))
}

/// Bins `k` with `θ_k − dir ∈ [−ε, ε)`, as a range of possibly negative
/// indices to be taken modulo `n_theta`.
fn window(dir: f64, eps: f64, grid: &AngleGrid) -> std::ops::Range<i64> {
    let h = grid.spacing();
    let snap = |v: f64| {
        let r = v.round();
        if (v - r).abs() < 1e-9 {
            r
        } else {
            v
        }
    };
    let lo = snap((dir - eps) / h).ceil() as i64;
    let hi = snap((dir + eps) / h).ceil() as i64;
    lo..hi
}

/// Lifted image: `f/(2ε)` on the bins within `ε` of the level direction,
/// and on every bin where the gradient vanishes.
pub fn lift_image(f: &Image2D, p: &LiftParams) -> Result<LiftedField> {
    p.validate()?;
    let grad = gradient(f)?;
    let tol = p.zero_grad_tol.unwrap_or_else(|| default_zero_grad_tol(f, &grad));
    lift_with_gradient(f, &grad, p, tol)
}

/// `1e-3 · max|∇f|`, but never below the size of rounding noise in the
/// difference quotients.
pub fn default_zero_grad_tol(f: &Image2D, grad: &GradientField) -> f64 {
    let amplitude = f.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (1e-3 * grad.max_norm()).max(1e-12 * amplitude / f.hx().min(f.hy()))
}

/// Lift using a gradient field computed elsewhere, e.g. from a different
/// image that fixes the window geometry.
pub fn lift_with_gradient(f: &Image2D, grad: &GradientField, p: &LiftParams, tol: f64) -> Result<LiftedField> {
    p.validate()?;
    if !f.same_shape(&grad.dx) {
        return Err(Error::invalid("gradient field does not match the image"));
    }
    let grid = p.angles()?;
    let n = grid.len();
    let w = f.width();
    let scale = 1.0 / (2.0 * p.epsilon);
    let mut out = LiftedField::zeros_like(f, grid);
    out.data_mut().par_chunks_mut(w * n).enumerate().for_each(|(iy, row)| {
        for ix in 0..w {
            let v = f.get(ix, iy) * scale;
            let fiber = &mut row[ix * n..(ix + 1) * n];
            match level_direction(grad.at(ix, iy), p.period, tol) {
                None => fiber.fill(v),
                Some(dir) => {
                    for k in window(dir, p.epsilon, &grid) {
                        fiber[k.rem_euclid(n as i64) as usize] = v;
                    }
                }
            }
        }
    });
    Ok(out)
}

/// Differential of `g(x, y, θ) = cosθ ∂x f + sinθ ∂y f` on the lifted
/// support `{g = 0}`.
#[derive(Debug, Clone)]
pub struct SupportProbe {
    grad: GradientField,
    hess: HessianField,
    support_tol: f64,
    rank_tol: f64,
}

impl SupportProbe {
    pub fn new(f: &Image2D) -> Result<Self> {
        let grad = gradient(f)?;
        let hess = hessian(&grad);
        let gmax = grad.max_norm();
        let hmax = [&hess.dxx, &hess.dxy, &hess.dyy]
            .iter()
            .map(|l| l.data().iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max);
        Ok(Self {
            grad,
            hess,
            support_tol: 1e-3 * gmax,
            rank_tol: 1e-8 * (gmax + hmax),
        })
    }

    pub fn g(&self, ix: usize, iy: usize, theta: f64) -> f64 {
        let (fx, fy) = self.grad.at(ix, iy);
        theta.cos() * fx + theta.sin() * fy
    }

    /// `(∂x g, ∂y g, ∂θ g)` at a grid pixel.
    pub fn differential(&self, ix: usize, iy: usize, theta: f64) -> [f64; 3] {
        let (c, s) = (theta.cos(), theta.sin());
        let (fx, fy) = self.grad.at(ix, iy);
        let [fxx, fxy, fyy] = self.hess.at(ix, iy);
        [c * fxx + s * fxy, c * fxy + s * fyy, -s * fx + c * fy]
    }

    /// Numerical rank (0 or 1) of the differential at a support point.
    pub fn rank(&self, ix: usize, iy: usize, theta: f64) -> Result<usize> {
        if ix >= self.grad.dx.width() || iy >= self.grad.dx.height() {
            return Err(Error::invalid("pixel outside the image"));
        }
        let g = self.g(ix, iy, theta);
        if g.abs() > self.support_tol {
            return Err(Error::invalid(format!(
                "({ix}, {iy}, {theta}) is off the lifted support: g = {g:e}"
            )));
        }
        let d = self.differential(ix, iy, theta);
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(usize::from(norm > self.rank_tol))
    }
}

/// Rank of `dg` at `(ix, iy, θ)`; rank 1 means the lifted support is a
/// smooth surface there.
pub fn lifted_support_rank(f: &Image2D, ix: usize, iy: usize, theta: f64) -> Result<usize> {
    SupportProbe::new(f)?.rank(ix, iy, theta)
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpHeader {
    width: usize,
    height: usize,
    n_theta: usize,
    period: Period,
    spacing: [f64; 2],
}

/// One JSON header line followed by little-endian `f32` samples, θ fastest.
pub fn write_lift_dump(field: &LiftedField, mut out: impl Write) -> std::io::Result<()> {
    let header = DumpHeader {
        width: field.width(),
        height: field.height(),
        n_theta: field.n_theta(),
        period: field.angles().period(),
        spacing: [field.hx(), field.hy()],
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(4 * field.data().len());
    for v in field.data() {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()
}

pub fn read_lift_dump(mut input: impl Read) -> Result<LiftedField> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::format(0, format!("read failed: {e}")))?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(bytes.len(), "missing header line"))?;
    let header: DumpHeader =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| Error::format(e.column().saturating_sub(1), e.to_string()))?;
    let angles = AngleGrid::new(header.n_theta, header.period)?;
    let count = header.width * header.height * header.n_theta;
    let payload = &bytes[nl + 1..];
    if payload.len() != 4 * count {
        return Err(Error::format(
            nl + 1 + payload.len().min(4 * count),
            format!("expected {} payload bytes, found {}", 4 * count, payload.len()),
        ));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    LiftedField::from_data(
        header.width,
        header.height,
        header.spacing[0],
        header.spacing[1],
        angles,
        data,
    )
}

pub fn save_lift_dump(field: &LiftedField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_lift_dump(field, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_lift_dump(path: impl AsRef<Path>) -> Result<LiftedField> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_lift_dump(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn ramp(n: usize) -> Image2D {
        Image2D::from_fn(n, n, 1.0, 1.0, |ix, _| ix as f64 / n as f64).unwrap()
    }

    #[test]
    fn level_direction_examples() {
        let d = |g| level_direction(g, Period::Pi, 0.0).unwrap();
        assert!((d((1.0, 0.0)) - PI / 2.0).abs() < 1e-15);
        assert!(d((0.0, 1.0)).abs() < 1e-15);
        assert!((d((1.0, 1.0)) - 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(level_direction((1e-4, 0.0), Period::Pi, 1e-3), None);
        let two = level_direction((-1.0, 0.0), Period::TwoPi, 0.0).unwrap();
        assert!((two - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_image_lifts_to_constant() {
        let p = LiftParams::new(16, Period::Pi);
        let f = Image2D::from_fn(8, 8, 1.0, 1.0, |_, _| 0.6).unwrap();
        let l = lift_image(&f, &p).unwrap();
        let want = 0.6 / (2.0 * p.epsilon);
        assert!(l.data().iter().all(|v| (v - want).abs() < 1e-14));
    }

    #[test]
    fn ramp_concentrates_on_vertical_direction() {
        let p = LiftParams::new(16, Period::Pi);
        let f = ramp(12);
        let l = lift_image(&f, &p).unwrap();
        let grid = p.angles().unwrap();
        for iy in 0..12 {
            for ix in 1..12 {
                let fib = l.fiber(ix, iy);
                for (k, v) in fib.iter().enumerate() {
                    let near = Period::Pi.signed_diff(grid.node(k), PI / 2.0);
                    if (-p.epsilon..p.epsilon).contains(&near) {
                        assert!((v - f.get(ix, iy) / (2.0 * p.epsilon)).abs() < 1e-14);
                    } else {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn window_covers_two_epsilon_worth_of_bins() {
        let grid = AngleGrid::new(32, Period::Pi).unwrap();
        let h = grid.spacing();
        for &(eps_bins, dir) in &[(1.0, 0.0), (1.0, 0.37), (2.0, 3.1), (3.0, 7.0 * h)] {
            let r = window(dir, eps_bins * h, &grid);
            assert_eq!(r.end - r.start, (2.0 * eps_bins) as i64, "dir {dir}");
        }
    }

    #[test]
    fn theta_integral_recovers_intensity() {
        let f = Image2D::from_fn(16, 16, 1.0, 1.0, |ix, iy| 0.2 + 0.03 * ix as f64 + 0.01 * iy as f64).unwrap();
        for n in [16, 32, 64] {
            let p = LiftParams::new(n, Period::Pi).with_epsilon(PI / 8.0);
            let l = lift_image(&f, &p).unwrap();
            let h = l.angles().spacing();
            for (ix, iy) in [(3, 4), (8, 8), (12, 2)] {
                let integral: f64 = l.fiber(ix, iy).iter().sum::<f64>() * h;
                let v = f.get(ix, iy);
                assert!((integral - v).abs() <= v * h / (2.0 * p.epsilon) + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(LiftParams::new(16, Period::Pi).with_epsilon(0.01).validate().is_err());
        assert!(LiftParams::new(16, Period::Pi).with_epsilon(2.0).validate().is_err());
        assert!(LiftParams::new(16, Period::Pi).validate().is_ok());
    }

    #[test]
    fn support_rank_examples() {
        assert_eq!(lifted_support_rank(&ramp(9), 4, 4, PI / 2.0).unwrap(), 1);
        assert!(lifted_support_rank(&ramp(9), 4, 4, 0.3).is_err());
        let bowl = Image2D::from_fn(9, 9, 1.0, 1.0, |ix, iy| {
            let (x, y) = (ix as f64 - 4.0, iy as f64 - 4.0);
            x * x + y * y
        })
        .unwrap();
        for th in [0.0, 0.7, 2.0] {
            assert_eq!(lifted_support_rank(&bowl, 4, 4, th).unwrap(), 1);
        }
    }

    #[test]
    fn dump_round_trip() {
        let p = LiftParams::new(8, Period::TwoPi);
        let f = Image2D::with_spacing(5, 3, 0.5, 0.25, (0..15).map(|i| i as f64 / 16.0).collect()).unwrap();
        let l = lift_image(&f, &p).unwrap();
        let mut buf = Vec::new();
        write_lift_dump(&l, &mut buf).unwrap();
        let back = read_lift_dump(buf.as_slice()).unwrap();
        assert_eq!(back.angles(), l.angles());
        assert_eq!((back.width(), back.height(), back.hx(), back.hy()), (5, 3, 0.5, 0.25));
        for (a, b) in back.data().iter().zip(l.data()) {
            assert_eq!(*a, *b as f32 as f64);
        }
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_lift_dump(buf.as_slice()), Err(Error::Format { .. })));
    }
}
