//! The rototranslation group SE(2) and its unitary representations on
//! `L²(S¹)`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// `(x, y, θ)` acting by `p ↦ R_θ p + (x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Se2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Se2 {
    pub const IDENTITY: Se2 = Se2 {
        x: 0.0,
        y: 0.0,
        theta: 0.0,
    };

    /// Half-turn about the origin.
    pub const PI_ROTATION: Se2 = Se2 {
        x: 0.0,
        y: 0.0,
        theta: PI,
    };

    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    /// `self · other`
    pub fn compose(&self, other: &Se2) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2 {
            x: self.x + c * other.x - s * other.y,
            y: self.y + s * other.x + c * other.y,
            theta: self.theta + other.theta,
        }
    }

    pub fn inverse(&self) -> Se2 {
        let (s, c) = self.theta.sin_cos();
        Se2 {
            x: -c * self.x - s * self.y,
            y: s * self.x - c * self.y,
            theta: -self.theta,
        }
    }
}

impl std::ops::Mul for Se2 {
    type Output = Se2;

    fn mul(self, rhs: Se2) -> Se2 {
        self.compose(&rhs)
    }
}

/// `(X^λ(g) ψ)(α) = e^{iλ(x cos α − y sin α)} ψ(α + θ)` for `ψ` sampled on
/// `n` uniform nodes `2πj/n`. Shifts that are not whole nodes go through
/// the trigonometric interpolant.
pub fn representation_apply(g: &Se2, lambda: f64, psi: &[Complex64]) -> Vec<Complex64> {
    let n = psi.len();
    let shifted = shift(psi, g.theta);
    (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            Complex64::from_polar(1.0, lambda * (g.x * a.cos() - g.y * a.sin())) * shifted[j]
        })
        .collect()
}

/// Samples of `ψ(· + θ)`.
pub(crate) fn shift(psi: &[Complex64], theta: f64) -> Vec<Complex64> {
    let n = psi.len();
    if n == 0 {
        return Vec::new();
    }
    let step = theta * n as f64 / (2.0 * PI);
    let whole = step.round();
    if (step - whole).abs() < 1e-12 {
        let k = (whole as i64).rem_euclid(n as i64) as usize;
        return (0..n).map(|j| psi[(j + k) % n]).collect();
    }
    let mut planner = FftPlanner::new();
    let mut spec = psi.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    for (k, c) in spec.iter_mut().enumerate() {
        if n.is_multiple_of(2) && k == n / 2 {
            // Shared ±n/2 mode: shift its real cosine interpolant.
            *c *= (0.5 * n as f64 * theta).cos();
        } else {
            let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            *c *= Complex64::from_polar(1.0, freq * theta);
        }
    }
    planner.plan_fft_inverse(n).process(&mut spec);
    spec.iter().map(|c| c / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_group(rng: &mut ChaCha8Rng) -> Se2 {
        Se2::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-PI..PI),
        )
    }

    fn band_limited(rng: &mut ChaCha8Rng, n: usize, band: i64) -> Vec<Complex64> {
        let coeffs: Vec<(i64, Complex64)> = (-band..=band)
            .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        (0..n)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / n as f64;
                coeffs
                    .iter()
                    .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * a))
                    .sum()
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b, c) = (random_group(&mut rng), random_group(&mut rng), random_group(&mut rng));
            let l = (a * b) * c;
            let r = a * (b * c);
            assert!((l.x - r.x).abs() < 1e-12 && (l.y - r.y).abs() < 1e-12 && (l.theta - r.theta).abs() < 1e-12);
            let e = a * a.inverse();
            assert!(e.x.abs() < 1e-12 && e.y.abs() < 1e-12 && e.theta.abs() < 1e-12);
        }
    }

    #[test]
    fn identity_and_pure_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = band_limited(&mut rng, 64, 10);
        assert!(max_diff(&representation_apply(&Se2::IDENTITY, 3.0, &psi), &psi) < 1e-15);
        let th = 2.0 * PI * 5.0 / 64.0;
        let out = representation_apply(&Se2::new(0.0, 0.0, th), 3.0, &psi);
        for j in 0..64 {
            assert!((out[j] - psi[(j + 5) % 64]).norm() < 1e-15);
        }
        // Off-grid shift of a band-limited function is exact.
        let th = 0.123;
        let out = representation_apply(&Se2::new(0.0, 0.0, th), 3.0, &psi);
        let direct = shift(&psi, th);
        assert!(max_diff(&out, &direct) < 1e-15);
        let twice = shift(&shift(&psi, th), -th);
        assert!(max_diff(&twice, &psi) < 1e-12);
    }

    #[test]
    fn representation_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 256;
        for _ in 0..10 {
            let g1 = random_group(&mut rng);
            let g2 = random_group(&mut rng);
            let lambda = rng.gen_range(0.5..6.0);
            let psi = band_limited(&mut rng, n, 20);
            let lhs = representation_apply(&g1, lambda, &representation_apply(&g2, lambda, &psi));
            let rhs = representation_apply(&(g1 * g2), lambda, &psi);
            assert!(max_diff(&lhs, &rhs) < 1e-9, "{}", max_diff(&lhs, &rhs));
        }
    }

    #[test]
    fn representation_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = band_limited(&mut rng, 128, 15);
        let out = representation_apply(&random_group(&mut rng), 4.0, &psi);
        let n2 = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((n2(&out) / n2(&psi) - 1.0).abs() < 1e-12);
    }
}
