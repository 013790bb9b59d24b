use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group::Se2;
use super::mathieu::{default_truncation, mathieu_basis, MathieuFunction};
use crate::linalg::gauss_legendre;
use crate::{Error, Result};

/// Plancherel factor of the spectral formula when the Mathieu functions have
/// unit `L²(S¹)` norm: the kernel is a density against `dx dy dθ`.
pub const KERNEL_PLANCHEREL: f64 = 1.0 / (4.0 * PI * PI);

const IMAG_TOLERANCE: f64 = 1e-6;

/// Truncation of the spectral integral and sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuadrature {
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// Highest Mathieu order kept in each of the `ce` and `se` sums.
    pub n_max: usize,
    pub n_alpha: usize,
}

impl KernelQuadrature {
    /// `λ_max = 40/√t`, 200 Gauss–Legendre nodes, orders up to 20, 256
    /// angle nodes.
    pub fn for_time(t: f64) -> Self {
        Self {
            lambda_max: 40.0 / t.sqrt(),
            n_lambda: 200,
            n_max: 20,
            n_alpha: 256,
        }
    }

    /// Every truncation parameter doubled.
    pub fn refined(&self) -> Self {
        Self {
            lambda_max: 2.0 * self.lambda_max,
            n_lambda: 2 * self.n_lambda,
            n_max: 2 * self.n_max,
            n_alpha: 2 * self.n_alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::invalid("lambda_max must be positive"));
        }
        if self.n_lambda == 0 || self.n_max == 0 || self.n_alpha == 0 {
            return Err(Error::invalid("quadrature counts must be at least 1"));
        }
        Ok(())
    }
}

struct Term {
    decay: f64,
    function: MathieuFunction,
    samples: Vec<f64>,
}

struct Node {
    lambda: f64,
    weight: f64,
    terms: Vec<Term>,
}

/// Heat kernel `p_t` of `X₁² + β² X₂²` on SE(2) with everything that does
/// not depend on the evaluation point precomputed.
pub struct Se2HeatKernel {
    t: f64,
    beta: f64,
    quad: KernelQuadrature,
    nodes: Vec<Node>,
    cos_table: Vec<Vec<f64>>,
    sin_table: Vec<Vec<f64>>,
    peak: f64,
}

impl std::fmt::Debug for Se2HeatKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Se2HeatKernel")
            .field("t", &self.t)
            .field("beta", &self.beta)
            .field("quad", &self.quad)
            .field("peak", &self.peak)
            .finish()
    }
}

impl Se2HeatKernel {
    /// In the representation `λ`, `X₁ ↦ iλ cos α` and `X₂ ↦ d/dα`, so the
    /// generator is `β²(d² − 2q cos 2α) − λ²/2` with `q = λ²/(4β²)`; its
    /// eigenvalues are `−λ²/2 − β² a_n(q)` and `−λ²/2 − β² b_n(q)`.
    pub fn new(t: f64, beta: f64, quad: KernelQuadrature) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("kernel time must be positive, got {t}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be positive, got {beta}")));
        }
        quad.validate()?;
        let (lambdas, weights) = gauss_legendre(quad.n_lambda, 0.0, quad.lambda_max);
        let nodes: Result<Vec<Node>> = lambdas
            .par_iter()
            .zip(&weights)
            .map(|(&lambda, &w)| {
                let q = lambda * lambda / (4.0 * beta * beta);
                let basis = mathieu_basis(q, quad.n_max, default_truncation(q, quad.n_max))?;
                let terms = basis
                    .ce
                    .into_iter()
                    .chain(basis.se)
                    .map(|function| Term {
                        decay: ((-0.5 * lambda * lambda - beta * beta * function.characteristic) * t).exp(),
                        samples: function.sample(quad.n_alpha),
                        function,
                    })
                    .collect();
                Ok(Node {
                    lambda,
                    weight: w * lambda * KERNEL_PLANCHEREL,
                    terms,
                })
            })
            .collect();
        let mut nodes = nodes?;
        // Each inner product is bounded by 1, so terms far below the
        // largest weight cannot matter.
        let top = nodes
            .iter()
            .flat_map(|n| n.terms.iter().map(move |term| n.weight * term.decay))
            .fold(0.0, f64::max);
        for node in &mut nodes {
            let w = node.weight;
            node.terms.retain(|term| w * term.decay > 1e-18 * top);
        }
        let max_freq = nodes
            .iter()
            .flat_map(|n| n.terms.iter())
            .map(|term| term.function.class.frequency(term.function.coeffs.len()))
            .max()
            .unwrap_or(1);
        let alphas: Vec<f64> = (0..quad.n_alpha)
            .map(|j| 2.0 * PI * j as f64 / quad.n_alpha as f64)
            .collect();
        let cos_table = (0..=max_freq)
            .map(|f| alphas.iter().map(|a| (f as f64 * a).cos()).collect())
            .collect();
        let sin_table = (0..=max_freq)
            .map(|f| alphas.iter().map(|a| (f as f64 * a).sin()).collect())
            .collect();
        let mut kernel = Self {
            t,
            beta,
            quad,
            nodes,
            cos_table,
            sin_table,
            peak: 0.0,
        };
        kernel.peak = kernel.evaluate_complex(&Se2::IDENTITY).re.abs();
        Ok(kernel)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn quadrature(&self) -> KernelQuadrature {
        self.quad
    }

    /// Samples of `ψ(α_j + θ)` for a Mathieu function `ψ`.
    fn shifted(&self, term: &Term, theta: f64) -> Vec<f64> {
        let n = self.quad.n_alpha;
        let step = theta * n as f64 / (2.0 * PI);
        let whole = step.round();
        if (step - whole).abs() < 1e-12 {
            let k = (whole as i64).rem_euclid(n as i64) as usize;
            return (0..n).map(|j| term.samples[(j + k) % n]).collect();
        }
        let f = &term.function;
        let mut out = vec![0.0; n];
        for (m, c) in f.coeffs.iter().enumerate() {
            let freq = f.class.frequency(m);
            let (s, co) = (freq as f64 * theta).sin_cos();
            let (ct, st) = (&self.cos_table[freq], &self.sin_table[freq]);
            if f.class.is_cosine() {
                let scale = if freq == 0 {
                    1.0 / (2.0 * PI).sqrt()
                } else {
                    1.0 / PI.sqrt()
                };
                for j in 0..n {
                    out[j] += c * scale * (co * ct[j] - s * st[j]);
                }
            } else {
                let scale = 1.0 / PI.sqrt();
                for j in 0..n {
                    out[j] += c * scale * (s * ct[j] + co * st[j]);
                }
            }
        }
        out
    }

    /// The truncated spectral sum before taking the real part.
    pub fn evaluate_complex(&self, g: &Se2) -> Complex64 {
        let n = self.quad.n_alpha;
        let da = 2.0 * PI / n as f64;
        let parts: Vec<Complex64> = self
            .nodes
            .par_iter()
            .map(|node| {
                let phase: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let arg = g.x * self.cos_table[1][j] - g.y * self.sin_table[1][j];
                        Complex64::from_polar(1.0, node.lambda * arg)
                    })
                    .collect();
                let mut acc = Complex64::default();
                for term in &node.terms {
                    let shifted = self.shifted(term, g.theta);
                    let mut inner = Complex64::default();
                    for j in 0..n {
                        inner += phase[j] * (term.samples[j] * shifted[j]);
                    }
                    acc += inner * (term.decay * da);
                }
                acc * node.weight
            })
            .collect();
        parts.into_iter().sum()
    }

    /// `p_t(g)`; fails when the imaginary part is not negligible.
    pub fn evaluate(&self, g: &Se2) -> Result<f64> {
        let c = self.evaluate_complex(g);
        let residue = c.im.abs() / (c.re.abs() + 1e-6 * self.peak);
        if residue.is_nan() || residue > IMAG_TOLERANCE {
            return Err(Error::NumericalFailure {
                what: "heat kernel (imaginary residue)",
                residual: residue,
            });
        }
        Ok(c.re)
    }

    /// Kernel on the projective tangent bundle:
    /// `P_t(g, ḡ) = p_t(ḡ⁻¹ g) + p_t(ḡ⁻¹ g Π)` with `Π` the half-turn.
    pub fn evaluate_ptr2(&self, g: &Se2, gbar: &Se2) -> Result<f64> {
        let rel = gbar.inverse() * *g;
        Ok(self.evaluate(&rel)? + self.evaluate(&(rel * Se2::PI_ROTATION))?)
    }
}

/// `p_t(g)` for `β = 1`. Builds the spectral tables on every call; use
/// [`Se2HeatKernel`] for repeated evaluation.
pub fn heat_kernel_se2(g: &Se2, t: f64, quad: &KernelQuadrature) -> Result<f64> {
    Se2HeatKernel::new(t, 1.0, *quad)?.evaluate(g)
}

/// `P_t(g, ḡ)` for `β = 1`.
pub fn heat_kernel_ptr2(g: &Se2, gbar: &Se2, t: f64, quad: &KernelQuadrature) -> Result<f64> {
    Se2HeatKernel::new(t, 1.0, *quad)?.evaluate_ptr2(g, gbar)
}
