//! Small dense helpers for the per-frequency θ-problems.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

/// `exp(A)` for a small complex matrix: scaling and squaring around a
/// degree-13 Padé approximant.
pub(crate) fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(0.5f64.powi(s), 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(B[k], 0.0);
    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9)) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8)) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is invertible after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Dense periodic second-difference matrix over `n` nodes of spacing `h`.
pub(crate) fn periodic_second_difference(n: usize, h: f64) -> DMatrix<f64> {
    let inv = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * inv
        } else if (i + 1) % n == j || (j + 1) % n == i {
            inv
        } else {
            0.0
        }
    })
}

/// Gauss–Legendre nodes and weights on `[a, b]`, by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = mid - half * z;
        nodes[n - 1 - i] = mid + half * z;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal_and_rotation() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(-3.0, 0.0),
            Complex64::new(0.5, 2.0),
        ]));
        let e = expm(&d);
        assert!((e[(0, 0)] - Complex64::new((-3.0f64).exp(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 1)] - Complex64::new(0.5, 2.0).exp()).norm() < 1e-12);

        // exp of 20·[[0,-1],[1,0]] is a rotation by 20 rad: needs squaring.
        let t = 20.0;
        let r = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-t, 0.0),
                Complex64::new(t, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let e = expm(&r);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-11);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-11);
    }

    #[test]
    fn second_difference_annihilates_constants() {
        let d = periodic_second_difference(6, 0.3);
        for i in 0..6 {
            assert!(d.row(i).sum().abs() < 1e-12);
            assert!(d.column(i).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5, -1.0, 2.0);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((q - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
        let (x, w) = gauss_legendre(200, 0.0, 1.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((q - (1f64.exp() - 1.0)).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }
}
