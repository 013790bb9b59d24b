//! Planar curves, their lifts to the bundle of directions, and the cost
//! functionals measuring curvature-penalized length.

mod control;
mod cost;
mod io;

pub use control::{detect_cusps, integrate_control_system, lift_curve};
pub use cost::{
    cost_j, cost_scaling_check, derivatives, energy, energy_homothety_check, homothety_check, CurveDerivatives,
};
pub use io::{parse_curve, read_curve, write_curve, write_lifted_curve, CurveFile};

use serde::Serialize;

use crate::{Error, Period, Result};

/// Samples `(x_i, y_i)` at strictly increasing parameters `t_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarCurve {
    t: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PlanarCurve {
    pub fn new(t: Vec<f64>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != x.len() || t.len() != y.len() {
            return Err(Error::invalid("curve coordinate arrays differ in length"));
        }
        if t.len() < 3 {
            return Err(Error::invalid(format!(
                "a curve needs at least 3 samples, got {}",
                t.len()
            )));
        }
        if t.iter().chain(&x).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("curve samples must be finite"));
        }
        if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "parameter not strictly increasing at sample {}",
                i + 1
            )));
        }
        Ok(Self { t, x, y })
    }

    /// `n` samples of `f` at uniform parameters in `[t0, t1]`.
    pub fn from_fn(n: usize, t0: f64, t1: f64, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("a curve needs at least 3 samples"));
        }
        let t: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let (x, y) = t.iter().map(|&s| f(s)).unzip();
        Self::new(t, x, y)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Image under `p ↦ s·p`.
    pub fn scaled(&self, s: f64) -> PlanarCurve {
        PlanarCurve {
            t: self.t.clone(),
            x: self.x.iter().map(|v| s * v).collect(),
            y: self.y.iter().map(|v| s * v).collect(),
        }
    }

    /// Image under rotation by `angle` followed by translation.
    pub fn rototranslated(&self, angle: f64, dx: f64, dy: f64) -> PlanarCurve {
        let (s, c) = angle.sin_cos();
        PlanarCurve {
            t: self.t.clone(),
            x: self.x.iter().zip(&self.y).map(|(x, y)| c * x - s * y + dx).collect(),
            y: self.x.iter().zip(&self.y).map(|(x, y)| s * x + c * y + dy).collect(),
        }
    }
}

/// Samples `(x_i, y_i, θ_i)` of a curve in the bundle, with `θ_i` reduced
/// into `[0, period)` and the velocity `(ẋ, ẏ, θ̇)` at every node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedCurve {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub theta: Vec<f64>,
    pub period: Period,
    pub velocity: Vec<[f64; 3]>,
}

impl LiftedCurve {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// θ made continuous by removing whole-period jumps.
    pub fn unwrapped_theta(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.theta.len());
        for (i, &th) in self.theta.iter().enumerate() {
            if i == 0 {
                out.push(th);
            } else {
                let prev: f64 = out[i - 1];
                out.push(prev + self.period.signed_diff(th, prev));
            }
        }
        out
    }

    pub fn planar(&self) -> Result<PlanarCurve> {
        PlanarCurve::new(self.t.clone(), self.x.clone(), self.y.clone())
    }
}
