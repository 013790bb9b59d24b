//! Periodic Mathieu functions `ce_n`, `se_n` of `y'' + (a − 2q cos 2α) y = 0`
//! by diagonalizing the equation in a truncated trigonometric basis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::{Error, Result};

/// The four symmetry classes of 2π-periodic solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MathieuClass {
    /// `ce_{2k}`: cosines of even order, including the constant.
    EvenCos,
    /// `ce_{2k+1}`
    OddCos,
    /// `se_{2k+1}`
    OddSin,
    /// `se_{2k+2}`
    EvenSin,
}

impl MathieuClass {
    /// Frequency of the `m`-th basis function of the class.
    pub fn frequency(self, m: usize) -> usize {
        match self {
            MathieuClass::EvenCos => 2 * m,
            MathieuClass::OddCos | MathieuClass::OddSin => 2 * m + 1,
            MathieuClass::EvenSin => 2 * m + 2,
        }
    }

    pub fn is_cosine(self) -> bool {
        matches!(self, MathieuClass::EvenCos | MathieuClass::OddCos)
    }

    /// Unit-norm basis function on `L²(0, 2π)`.
    pub fn basis(self, m: usize, alpha: f64) -> f64 {
        let f = self.frequency(m) as f64;
        if self.is_cosine() {
            if f == 0.0 {
                1.0 / (2.0 * PI).sqrt()
            } else {
                (f * alpha).cos() / PI.sqrt()
            }
        } else {
            (f * alpha).sin() / PI.sqrt()
        }
    }

    /// Symmetric matrix of `−d²/dα² + 2q cos 2α` in the class basis.
    pub fn matrix(self, q: f64, size: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(size, size);
        for m in 0..size {
            a[(m, m)] = (self.frequency(m) as f64).powi(2);
            if m + 1 < size {
                a[(m, m + 1)] = q;
                a[(m + 1, m)] = q;
            }
        }
        match self {
            MathieuClass::EvenCos if size > 1 => {
                a[(0, 1)] = 2f64.sqrt() * q;
                a[(1, 0)] = 2f64.sqrt() * q;
            }
            MathieuClass::OddCos => a[(0, 0)] += q,
            MathieuClass::OddSin => a[(0, 0)] -= q,
            _ => {}
        }
        a
    }
}

/// One Mathieu function: characteristic value and basis coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct MathieuFunction {
    pub order: usize,
    pub class: MathieuClass,
    pub characteristic: f64,
    pub coeffs: Vec<f64>,
    /// `‖A v − a v‖₂` of the truncated eigenproblem.
    pub residual: f64,
}

impl MathieuFunction {
    pub fn eval(&self, alpha: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * self.class.basis(m, alpha))
            .sum()
    }

    /// Samples on `n` uniform nodes `2πj/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(2.0 * PI * j as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MathieuBasis {
    pub q: f64,
    pub order_max: usize,
    /// Basis size per symmetry class.
    pub truncation: usize,
    /// `a_n(q)`, `n = 0..=order_max`.
    pub char_a: Vec<f64>,
    /// `b_n(q)`, `n = 1..=order_max` (index 0 holds `b_1`).
    pub char_b: Vec<f64>,
    /// `ce_0 ..= ce_{order_max}`.
    pub ce: Vec<MathieuFunction>,
    /// `se_1 ..= se_{order_max}`.
    pub se: Vec<MathieuFunction>,
}

/// Basis size per class that resolves orders up to `order_max` at `q`.
pub fn default_truncation(q: f64, order_max: usize) -> usize {
    order_max / 2 + 12 + (4.0 * q.powf(0.25)).ceil() as usize
}

fn solve_class(
    class: MathieuClass,
    q: f64,
    size: usize,
    count: usize,
    first_order: usize,
) -> Result<Vec<MathieuFunction>> {
    let a = class.matrix(q, size);
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000).ok_or(Error::NumericalFailure {
        what: "Mathieu eigenproblem",
        residual: f64::NAN,
    })?;
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut out = Vec::with_capacity(count);
    for (rank, &i) in order.iter().take(count).enumerate() {
        let value = eig.eigenvalues[i];
        let mut v = eig.eigenvectors.column(i).into_owned();
        if !value.is_finite() || v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NumericalFailure {
                what: "Mathieu eigenproblem",
                residual: f64::NAN,
            });
        }
        v /= v.norm();
        let big = v.amax();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12 * big) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        let residual = (&a * &v - &v * value).norm();
        out.push(MathieuFunction {
            order: first_order + 2 * rank,
            class,
            characteristic: value,
            coeffs: v.iter().copied().collect(),
            residual,
        });
    }
    Ok(out)
}

/// Characteristic values and unit-norm coefficient vectors for all
/// `ce_n`, `n ≤ order_max`, and `se_n`, `1 ≤ n ≤ order_max`, using
/// `truncation` basis functions per class.
pub fn mathieu_basis(q: f64, order_max: usize, truncation: usize) -> Result<MathieuBasis> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::invalid(format!(
            "Mathieu parameter must be finite and non-negative, got {q}"
        )));
    }
    let need = order_max / 2 + 1;
    if truncation < need + 1 {
        return Err(Error::invalid(format!(
            "truncation {truncation} too small for order {order_max} (need > {need})"
        )));
    }
    let even_cos = solve_class(MathieuClass::EvenCos, q, truncation, order_max / 2 + 1, 0)?;
    let odd_cos = solve_class(MathieuClass::OddCos, q, truncation, order_max.div_ceil(2), 1)?;
    let odd_sin = solve_class(MathieuClass::OddSin, q, truncation, order_max.div_ceil(2), 1)?;
    let even_sin = solve_class(MathieuClass::EvenSin, q, truncation, order_max / 2, 2)?;

    let mut ce: Vec<MathieuFunction> = even_cos.into_iter().chain(odd_cos).collect();
    ce.sort_by_key(|f| f.order);
    let mut se: Vec<MathieuFunction> = odd_sin.into_iter().chain(even_sin).collect();
    se.sort_by_key(|f| f.order);
    Ok(MathieuBasis {
        q,
        order_max,
        truncation,
        char_a: ce.iter().map(|f| f.characteristic).collect(),
        char_b: se.iter().map(|f| f.characteristic).collect(),
        ce,
        se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_q_reduces_to_trigonometric_basis() {
        let b = mathieu_basis(0.0, 8, 12).unwrap();
        for (n, a) in b.char_a.iter().enumerate() {
            assert!((a - (n * n) as f64).abs() < 1e-10);
        }
        for (i, v) in b.char_b.iter().enumerate() {
            assert!((v - ((i + 1) * (i + 1)) as f64).abs() < 1e-10);
        }
        let ce0 = b.ce[0].sample(16);
        assert!(ce0.iter().all(|v| (v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12));
    }

    #[test]
    fn shape_and_finiteness() {
        let b = mathieu_basis(3.7, 20, 30).unwrap();
        assert_eq!(b.char_a.len(), 21);
        assert_eq!(b.char_b.len(), 20);
        assert!(b.char_a.iter().chain(&b.char_b).all(|v| v.is_finite()));
    }

    #[test]
    fn known_characteristic_values() {
        // Tabulated values at q = 1.
        let b = mathieu_basis(1.0, 2, 20).unwrap();
        assert!((b.char_a[0] - (-0.455_138_604_107_414_3)).abs() < 1e-12);
        assert!((b.char_b[0] - (-0.110_248_816_992_095_6)).abs() < 1e-12);
        assert!((b.char_a[1] - 1.859_108_072_514_364).abs() < 1e-12);
    }

    #[test]
    fn truncation_doubling_is_stable() {
        for q in [1.0, 50.0, 800.0] {
            let m = default_truncation(q, 20);
            let a = mathieu_basis(q, 20, m).unwrap();
            let b = mathieu_basis(q, 20, 2 * m).unwrap();
            for (x, y) in a.char_a.iter().zip(&b.char_a).chain(a.char_b.iter().zip(&b.char_b)) {
                assert!((x - y).abs() <= 1e-10 * (1.0 + q), "q={q}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn interlacing_and_unit_norm() {
        let b = mathieu_basis(5.0, 10, 30).unwrap();
        for n in 1..=10 {
            assert!(b.char_a[n - 1] < b.char_b[n - 1]);
            assert!(b.char_b[n - 1] <= b.char_a[n] + 1e-12);
        }
        // Norm by trapezoid quadrature of the sampled function.
        for f in b.ce.iter().chain(&b.se) {
            let n = 256;
            let norm2: f64 = f.sample(n).iter().map(|v| v * v).sum::<f64>() * 2.0 * PI / n as f64;
            assert!((norm2 - 1.0).abs() < 1e-10);
            assert!(f.residual < 1e-10);
        }
    }

    #[test]
    fn functions_solve_the_equation() {
        let b = mathieu_basis(2.0, 4, 24).unwrap();
        let f = &b.se[2];
        let h = 1e-3;
        for &x in &[0.3, 1.1, 2.9] {
            let d2 = (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h);
            let r = d2 + (f.characteristic - 2.0 * b.q * (2.0 * x).cos()) * f.eval(x);
            assert!(r.abs() < 1e-4, "{r}");
        }
    }

    #[test]
    fn sign_convention() {
        let b = mathieu_basis(10.0, 6, 24).unwrap();
        for f in b.ce.iter().chain(&b.se) {
            let big = f.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let first = f.coeffs.iter().find(|c| c.abs() > 1e-12 * big).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn negative_q_rejected() {
        assert!(mathieu_basis(-1.0, 4, 10).is_err());
        assert!(mathieu_basis(1.0, 20, 5).is_err());
    }
}
