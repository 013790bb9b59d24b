//! The 6×6 moment system behind the genericity of Gaussian-smoothed images.
//!
//! Perturbing an image by `δI = P/G` with `P` a quadratic polynomial supported
//! on `Q = [−ε, ε]²` changes the jet `(f, ∂x f, ∂y f, ∂xx f, ∂xy f, ∂yy f)` at
//! the origin by the moments `∫_Q m_j · D_k G / G`. Every ratio `D_k G / G` is
//! a polynomial, so the integrands are polynomial and Gauss–Legendre
//! quadrature is exact once it has enough nodes.

use nalgebra::Matrix6;
use serde::Serialize;

use crate::linalg::gauss_legendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct TransversalityMatrix {
    /// Row `k`: derivative `D_k` in the order `1, ∂x, ∂y, ∂xx, ∂xy, ∂yy`.
    /// Column `j`: monomial `1, x, y, x², xy, y²`.
    pub entries: [[f64; 6]; 6],
    pub determinant: f64,
    /// Relative change of the determinant between `n` and `2n` nodes.
    pub residual: f64,
    pub nodes_per_axis: usize,
}

/// `D_k G / G` evaluated at the origin for a Gaussian centred at `(x̄, ȳ)`.
fn derivative_ratios(xb: f64, yb: f64, sx: f64, sy: f64) -> [f64; 6] {
    let (sx2, sy2) = (sx * sx, sy * sy);
    [
        1.0,
        xb / sx2,
        yb / sy2,
        xb * xb / (sx2 * sx2) - 1.0 / sx2,
        xb * yb / (sx2 * sy2),
        yb * yb / (sy2 * sy2) - 1.0 / sy2,
    ]
}

fn monomials(x: f64, y: f64) -> [f64; 6] {
    [1.0, x, y, x * x, x * y, y * y]
}

fn assemble(eps: f64, sx: f64, sy: f64, n: usize) -> [[f64; 6]; 6] {
    let (nodes, weights) = gauss_legendre(n, -eps, eps);
    let mut m = [[0.0; 6]; 6];
    for (&x, &wx) in nodes.iter().zip(&weights) {
        for (&y, &wy) in nodes.iter().zip(&weights) {
            let d = derivative_ratios(x, y, sx, sy);
            let p = monomials(x, y);
            for k in 0..6 {
                for j in 0..6 {
                    m[k][j] += wx * wy * d[k] * p[j];
                }
            }
        }
    }
    m
}

fn determinant(m: &[[f64; 6]; 6]) -> f64 {
    Matrix6::from_fn(|i, j| m[i][j]).determinant()
}

/// Assembles the moment matrix, doubling the node count until the
/// determinant settles.
pub fn transversality_matrix(eps: f64, sigma_x: f64, sigma_y: f64) -> Result<TransversalityMatrix> {
    for (name, v) in [("epsilon", eps), ("sigma_x", sigma_x), ("sigma_y", sigma_y)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let mut n = 4;
    let mut prev = determinant(&assemble(eps, sigma_x, sigma_y, n));
    let mut residual = f64::INFINITY;
    while n <= 64 {
        n *= 2;
        let entries = assemble(eps, sigma_x, sigma_y, n);
        let det = determinant(&entries);
        residual = ((det - prev) / det).abs();
        if residual < 1e-10 {
            return Ok(TransversalityMatrix {
                entries,
                determinant: det,
                residual,
                nodes_per_axis: n,
            });
        }
        prev = det;
    }
    Err(Error::NumericalFailure {
        what: "transversality quadrature",
        residual,
    })
}

pub fn transversality_determinant(eps: f64, sigma_x: f64, sigma_y: f64) -> Result<f64> {
    Ok(transversality_matrix(eps, sigma_x, sigma_y)?.determinant)
}
