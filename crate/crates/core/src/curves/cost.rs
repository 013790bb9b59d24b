use serde::Serialize;

use super::PlanarCurve;
use crate::{Error, Result};

/// Finite-difference weights for derivatives `0..=2` at `z` from arbitrary
/// distinct nodes.
fn fornberg(z: f64, nodes: &[f64]) -> [Vec<f64>; 3] {
    let n = nodes.len();
    let mut c = vec![[0.0f64; 3]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    [
        c.iter().map(|w| w[0]).collect(),
        c.iter().map(|w| w[1]).collect(),
        c.iter().map(|w| w[2]).collect(),
    ]
}

/// First and second derivatives of a sampled curve by five-point stencils
/// (centered in the interior, shifted at the ends).
#[derive(Debug, Clone, Serialize)]
pub struct CurveDerivatives {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub ddx: Vec<f64>,
    pub ddy: Vec<f64>,
}

impl CurveDerivatives {
    pub fn speed(&self, i: usize) -> f64 {
        self.dx[i].hypot(self.dy[i])
    }

    /// Signed curvature `(ẋÿ − ẏẍ)/(ẋ² + ẏ²)^{3/2}`.
    pub fn curvature(&self, i: usize) -> f64 {
        (self.dx[i] * self.ddy[i] - self.dy[i] * self.ddx[i]) / self.speed(i).powi(3)
    }
}

pub fn derivatives(c: &PlanarCurve) -> CurveDerivatives {
    let n = c.len();
    let width = n.min(5);
    let mut d = CurveDerivatives {
        dx: vec![0.0; n],
        dy: vec![0.0; n],
        ddx: vec![0.0; n],
        ddy: vec![0.0; n],
    };
    for i in 0..n {
        let start = i.saturating_sub(width / 2).min(n - width);
        let nodes = &c.t()[start..start + width];
        let [_, w1, w2] = fornberg(c.t()[i], nodes);
        // Differences against the center keep offsets out of the sums.
        let (x0, y0) = (c.x()[i], c.y()[i]);
        for (k, (a, b)) in w1.iter().zip(&w2).enumerate() {
            let (x, y) = (c.x()[start + k] - x0, c.y()[start + k] - y0);
            d.dx[i] += a * x;
            d.dy[i] += a * y;
            d.ddx[i] += b * x;
            d.ddy[i] += b * y;
        }
    }
    d
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2)
        .zip(f.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1]))
        .sum()
}

fn checked_derivatives(c: &PlanarCurve) -> Result<CurveDerivatives> {
    let d = derivatives(c);
    let vmax = (0..c.len()).map(|i| d.speed(i)).fold(0.0, f64::max);
    if vmax == 0.0 {
        return Err(Error::CuspCandidate { index: 0 });
    }
    if let Some(index) = (0..c.len()).find(|&i| d.speed(i) <= 1e-6 * vmax) {
        return Err(Error::CuspCandidate { index });
    }
    Ok(d)
}

/// `J_β[γ] = ∫ √(‖γ̇‖² + β²‖γ̇‖²K²) dt`.
pub fn cost_j(c: &PlanarCurve, beta: f64) -> Result<f64> {
    let d = checked_derivatives(c)?;
    let f: Vec<f64> = (0..c.len())
        .map(|i| {
            let v = d.speed(i);
            let k = d.curvature(i);
            (v * v + beta * beta * v * v * k * k).sqrt()
        })
        .collect();
    Ok(trapezoid(c.t(), &f))
}

/// `E_β[γ] = ∫ (‖γ̇‖² + β²‖γ̇‖²K²) dt` in the given parametrization.
pub fn energy(c: &PlanarCurve, beta: f64) -> Result<f64> {
    let d = checked_derivatives(c)?;
    let f: Vec<f64> = (0..c.len())
        .map(|i| {
            let v = d.speed(i);
            let k = d.curvature(i);
            v * v + beta * beta * v * v * k * k
        })
        .collect();
    Ok(trapezoid(c.t(), &f))
}

/// `(J_β[βγ], β²·J[γ])`: cost of the curve scaled by `β` against the
/// quadratic homothety law.
pub fn homothety_check(c: &PlanarCurve, beta: f64) -> Result<(f64, f64)> {
    Ok((cost_j(&c.scaled(beta), beta)?, beta * beta * cost_j(c, 1.0)?))
}

/// `(J_β[βγ], β·J[γ])`: the scaling law the cost actually obeys, since
/// speed scales by `β` and curvature by `1/β`.
pub fn cost_scaling_check(c: &PlanarCurve, beta: f64) -> Result<(f64, f64)> {
    Ok((cost_j(&c.scaled(beta), beta)?, beta * cost_j(c, 1.0)?))
}

/// `(E_β[βγ], β²·E[γ])`.
pub fn energy_homothety_check(c: &PlanarCurve, beta: f64) -> Result<(f64, f64)> {
    Ok((energy(&c.scaled(beta), beta)?, beta * beta * energy(c, 1.0)?))
}
