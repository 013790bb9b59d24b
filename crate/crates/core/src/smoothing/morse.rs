use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gaussian::{gaussian_convolve, TRUNCATION_SIGMAS};
use crate::grid::{gradient, hessian, GradientField, HessianField, Image2D};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

/// A zero of the discrete gradient. `x`, `y` are fractional pixel indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    pub kind: CriticalKind,
    pub hessian_det: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorseTolerances {
    pub grad_tol: f64,
    pub det_tol: f64,
}

impl MorseTolerances {
    /// Tolerances scaled by the intensity range and the pixel spacing.
    pub fn for_image(img: &Image2D) -> Self {
        let range = img.max() - img.min();
        let h = img.hx().min(img.hy());
        Self {
            grad_tol: 1e-6 * range / h,
            det_tol: 1e-8 * range * range / (img.hx() * img.hy()).powi(2),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MorseReport {
    pub points: Vec<CriticalPoint>,
    pub is_morse: bool,
    pub tolerances: MorseTolerances,
    /// Scanned pixel window `[x0, x1] × [y0, y1]`, inclusive.
    pub window: [usize; 4],
}

impl MorseReport {
    pub fn count(&self, kind: CriticalKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }
}

/// Scans the whole image.
pub fn find_critical_points(img: &Image2D, grad_tol: f64, det_tol: f64) -> Result<MorseReport> {
    find_critical_points_in(img, MorseTolerances { grad_tol, det_tol }, 0)
}

/// Scans the pixels at least `margin` away from the border.
pub fn find_critical_points_in(img: &Image2D, tol: MorseTolerances, margin: usize) -> Result<MorseReport> {
    if img.width() < 5 || img.height() < 5 {
        return Err(Error::invalid("critical point search needs at least 5x5 pixels"));
    }
    if 2 * margin + 2 > img.width().min(img.height()) {
        return Err(Error::invalid(format!("margin {margin} leaves no interior window")));
    }
    let grad = gradient(img)?;
    let hess = hessian(&grad);
    let (x0, y0) = (margin, margin);
    let (x1, y1) = (img.width() - 1 - margin, img.height() - 1 - margin);

    let mut points: Vec<CriticalPoint> = Vec::new();
    for j in y0..y1 {
        for i in x0..x1 {
            if let Some(p) = scan_cell(&grad, &hess, i, j, &tol) {
                let seen = points
                    .iter()
                    .any(|q| (q.x - p.x).abs() < 1e-3 && (q.y - p.y).abs() < 1e-3);
                if !seen {
                    points.push(p);
                }
            }
        }
    }
    let is_morse = points.iter().all(|p| p.kind != CriticalKind::Degenerate);
    Ok(MorseReport {
        points,
        is_morse,
        tolerances: tol,
        window: [x0, x1, y0, y1],
    })
}

fn straddles_zero(v: [f64; 4]) -> bool {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

fn bilinear(c: [f64; 4], s: f64, t: f64) -> f64 {
    c[0] * (1.0 - s) * (1.0 - t) + c[1] * s * (1.0 - t) + c[2] * (1.0 - s) * t + c[3] * s * t
}

// (∂s, ∂t) of the bilinear interpolant.
fn bilinear_grad(c: [f64; 4], s: f64, t: f64) -> (f64, f64) {
    (
        (c[1] - c[0]) * (1.0 - t) + (c[3] - c[2]) * t,
        (c[2] - c[0]) * (1.0 - s) + (c[3] - c[1]) * s,
    )
}

fn corners(img: &Image2D, i: usize, j: usize) -> [f64; 4] {
    [
        img.get(i, j),
        img.get(i + 1, j),
        img.get(i, j + 1),
        img.get(i + 1, j + 1),
    ]
}

/// Damped Newton (Levenberg–Marquardt) iteration on the bilinear
/// interpolant of the discrete gradient, started at the cell center. The
/// damping only matters where the Jacobian is nearly singular, so degenerate
/// candidates are still located instead of being abandoned.
fn scan_cell(
    grad: &GradientField,
    hess: &HessianField,
    i: usize,
    j: usize,
    tol: &MorseTolerances,
) -> Option<CriticalPoint> {
    let gx = corners(&grad.dx, i, j);
    let gy = corners(&grad.dy, i, j);
    if !(straddles_zero(gx) && straddles_zero(gy)) {
        return None;
    }
    let (mut s, mut t) = (0.5, 0.5);
    let mut converged = false;
    for _ in 0..200 {
        let fx = bilinear(gx, s, t);
        let fy = bilinear(gy, s, t);
        let (a, b) = bilinear_grad(gx, s, t);
        let (c, d) = bilinear_grad(gy, s, t);
        // Normal equations (JᵀJ + μI) δ = −Jᵀ F.
        let mu = 1e-12 * (a * a + b * b + c * c + d * d) + f64::MIN_POSITIVE;
        let (n11, n12, n22) = (a * a + c * c + mu, a * b + c * d, b * b + d * d + mu);
        let (r1, r2) = (-(a * fx + c * fy), -(b * fx + d * fy));
        let det = n11 * n22 - n12 * n12;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let ds = (n22 * r1 - n12 * r2) / det;
        let dt = (n11 * r2 - n12 * r1) / det;
        s += ds;
        t += dt;
        if !(-0.5..=1.5).contains(&s) || !(-0.5..=1.5).contains(&t) {
            return None;
        }
        if ds.hypot(dt) < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged && bilinear(gx, s, t).hypot(bilinear(gy, s, t)) > tol.grad_tol {
        return None;
    }
    let eps = 1e-9;
    if !(-eps..=1.0 + eps).contains(&s) || !(-eps..=1.0 + eps).contains(&t) {
        return None;
    }
    let (s, t) = (s.clamp(0.0, 1.0), t.clamp(0.0, 1.0));
    let gradient_norm = bilinear(gx, s, t).hypot(bilinear(gy, s, t));
    if gradient_norm > tol.grad_tol {
        return None;
    }
    let hxx = bilinear(corners(&hess.dxx, i, j), s, t);
    let hxy = bilinear(corners(&hess.dxy, i, j), s, t);
    let hyy = bilinear(corners(&hess.dyy, i, j), s, t);
    let det = hxx * hyy - hxy * hxy;
    let trace = hxx + hyy;
    let kind = if det.abs() <= tol.det_tol {
        CriticalKind::Degenerate
    } else if det < 0.0 {
        CriticalKind::Saddle
    } else if trace > 0.0 {
        CriticalKind::Minimum
    } else {
        CriticalKind::Maximum
    };
    Some(CriticalPoint {
        x: i as f64 + s,
        y: j as f64 + t,
        kind,
        hessian_det: det,
        gradient_norm,
    })
}

/// Fraction of smoothed uniform-noise images that are Morse on the window
/// `4σ` away from the border. Trial `i` draws from stream `i` of a ChaCha
/// generator seeded with `seed`, so the result does not depend on scheduling.
pub fn morse_genericity_trial(n_trials: usize, image_size: usize, sigma: f64, seed: u64) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let margin = (TRUNCATION_SIGMAS * sigma).ceil() as usize;
    let passed: Result<Vec<bool>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let noise: Vec<f64> = (0..image_size * image_size).map(|_| rng.gen::<f64>()).collect();
            let img = Image2D::new(image_size, image_size, noise)?;
            let smooth = gaussian_convolve(&img, sigma, sigma)?;
            let tol = MorseTolerances::for_image(&smooth);
            Ok(find_critical_points_in(&smooth, tol, margin)?.is_morse)
        })
        .collect();
    let passed = passed?;
    Ok(passed.iter().filter(|&&ok| ok).count() as f64 / n_trials as f64)
}
