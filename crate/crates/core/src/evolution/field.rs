use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::frequency::{propagate, MUMFORD_DRIFT_SIGN};
use super::EvolutionParams;
use crate::grid::{frequency, is_nyquist, Fft2};
use crate::{Error, Image2D, LiftedField, Period, Result};

/// Diagnostics of one call to [`evolve_field_with_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionStats {
    pub mass_before: f64,
    pub mass_after: f64,
    /// `|mass_after − mass_before| / |mass_before|` (absolute when the
    /// initial mass is zero).
    pub mass_drift: f64,
    /// `‖Im‖₂ / ‖Re‖₂` of the inverse transform.
    pub imag_residue: f64,
}

const IMAG_TOLERANCE: f64 = 1e-9;

pub fn evolve_field(v: &LiftedField, p: &EvolutionParams) -> Result<LiftedField> {
    Ok(evolve_field_with_stats(v, p)?.0)
}

/// Spatial DFT of every θ-layer, per-frequency propagation, inverse DFT.
///
/// On even-sized axes the Nyquist bin stands for both `±f_N`; its
/// propagator is averaged over the two signs so the spectrum of a real field
/// stays conjugate-symmetric.
pub fn evolve_field_with_stats(v: &LiftedField, p: &EvolutionParams) -> Result<(LiftedField, EvolutionStats)> {
    p.validate()?;
    let grid = v.angles();
    if grid.period() != p.mode.period() {
        return Err(Error::invalid(format!(
            "{} mode needs period {:?}, field has {:?}",
            p.mode,
            p.mode.period(),
            grid.period()
        )));
    }
    if v.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("field contains non-finite values"));
    }
    let mass_before = v.sum();
    if p.time == 0.0 {
        let stats = EvolutionStats {
            mass_before,
            mass_after: mass_before,
            mass_drift: 0.0,
            imag_residue: 0.0,
        };
        return Ok((v.clone(), stats));
    }

    let (w, h, n) = (v.width(), v.height(), grid.len());
    let fft = Fft2::new(w, h);

    // Spectrum stored θ-fastest: one contiguous profile per frequency.
    let layers: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut buf: Vec<Complex64> = v
                .data()
                .iter()
                .skip(k)
                .step_by(n)
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            fft.forward(&mut buf);
            buf
        })
        .collect();
    let mut spectrum = vec![Complex64::default(); w * h * n];
    spectrum.par_chunks_mut(n).enumerate().for_each(|(bin, profile)| {
        for (k, layer) in layers.iter().enumerate() {
            profile[k] = layer[bin];
        }
    });
    drop(layers);

    spectrum.par_chunks_mut(n).enumerate().for_each(|(bin, profile)| {
        let (kx, ky) = (bin % w, bin / w);
        let xi = (frequency(kx, w, v.hx()), frequency(ky, h, v.hy()));
        let sx: &[f64] = if is_nyquist(kx, w) { &[1.0, -1.0] } else { &[1.0] };
        let sy: &[f64] = if is_nyquist(ky, h) { &[1.0, -1.0] } else { &[1.0] };
        if sx.len() * sy.len() == 1 {
            let out = propagate(xi, profile, p, &grid, MUMFORD_DRIFT_SIGN);
            profile.copy_from_slice(&out);
            return;
        }
        let mut acc = vec![Complex64::default(); n];
        for &a in sx {
            for &b in sy {
                let out = propagate((a * xi.0, b * xi.1), profile, p, &grid, MUMFORD_DRIFT_SIGN);
                for (s, o) in acc.iter_mut().zip(out) {
                    *s += o;
                }
            }
        }
        let inv = 1.0 / (sx.len() * sy.len()) as f64;
        for (dst, s) in profile.iter_mut().zip(acc) {
            *dst = s * inv;
        }
    });

    let layers: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut buf: Vec<Complex64> = spectrum.iter().skip(k).step_by(n).copied().collect();
            fft.inverse(&mut buf);
            buf
        })
        .collect();
    drop(spectrum);

    let mut data = vec![0.0; w * h * n];
    let mut re2 = 0.0;
    let mut im2 = 0.0;
    for (k, layer) in layers.iter().enumerate() {
        for (pix, c) in layer.iter().enumerate() {
            data[pix * n + k] = c.re;
            re2 += c.re * c.re;
            im2 += c.im * c.im;
        }
    }
    let imag_residue = if re2 > 0.0 { (im2 / re2).sqrt() } else { im2.sqrt() };
    if !imag_residue.is_finite() || imag_residue > IMAG_TOLERANCE {
        return Err(Error::NumericalFailure {
            what: "evolution (imaginary residue)",
            residual: imag_residue,
        });
    }
    let out = v.with_data_unchecked(data);
    let mass_after = out.sum();
    let mass_drift = if mass_before != 0.0 {
        ((mass_after - mass_before) / mass_before).abs()
    } else {
        (mass_after - mass_before).abs()
    };
    Ok((
        out,
        EvolutionStats {
            mass_before,
            mass_after,
            mass_drift,
            imag_residue,
        },
    ))
}

/// Average of the field and its antipodal copy `θ + π`.
pub fn symmetrize_se2(v: &LiftedField) -> Result<LiftedField> {
    let n = v.n_theta();
    if v.angles().period() != Period::TwoPi {
        return Err(Error::invalid("symmetrization needs a 2π-periodic field"));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("symmetrization needs an even n_theta, got {n}")));
    }
    let half = n / 2;
    let mut data = v.data().to_vec();
    for (fiber, src) in data.chunks_mut(n).zip(v.data().chunks(n)) {
        for k in 0..n {
            fiber[k] = 0.5 * (src[k] + src[(k + half) % n]);
        }
    }
    Ok(v.with_data_unchecked(data))
}

/// Pixelwise maximum over each fiber.
pub fn project_max(v: &LiftedField) -> Image2D {
    let data: Vec<f64> = v
        .data()
        .chunks(v.n_theta())
        .map(|f| f.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Image2D::with_spacing(v.width(), v.height(), v.hx(), v.hy(), data).expect("fiber maxima of a finite field")
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::evolution::Mode;
    use crate::AngleGrid;

    fn random_field(w: usize, h: usize, n: usize, period: Period, seed: u64) -> LiftedField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles = AngleGrid::new(n, period).unwrap();
        let data = (0..w * h * n).map(|_| rng.gen::<f64>()).collect();
        LiftedField::from_data(w, h, 0.5, 0.5, angles, data).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let v = random_field(6, 5, 8, Period::Pi, 1);
        let out = evolve_field(&v, &EvolutionParams::new(Mode::Ptr2, 1.0, 0.0)).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn constant_field_is_stationary() {
        let angles = AngleGrid::new(8, Period::TwoPi).unwrap();
        let v = LiftedField::from_data(8, 6, 1.0, 1.0, angles, vec![0.75; 8 * 6 * 8]).unwrap();
        for mode in [Mode::Se2, Mode::Mumford] {
            let out = evolve_field(&v, &EvolutionParams::new(mode, 0.6, 2.0)).unwrap();
            assert!(out.data().iter().all(|x| (x - 0.75).abs() < 1e-12));
        }
    }

    #[test]
    fn mass_is_conserved_and_output_real() {
        for (w, h) in [(8, 8), (9, 6), (7, 7)] {
            let v = random_field(w, h, 8, Period::Pi, 7);
            let (_, stats) = evolve_field_with_stats(&v, &EvolutionParams::new(Mode::Ptr2, 0.8, 1.0)).unwrap();
            assert!(stats.mass_drift < 1e-12, "{stats:?}");
            assert!(stats.imag_residue < 1e-13, "{stats:?}");
        }
    }

    #[test]
    fn mumford_output_is_real_on_even_grids() {
        let v = random_field(8, 10, 8, Period::TwoPi, 2);
        let (_, stats) = evolve_field_with_stats(&v, &EvolutionParams::new(Mode::Mumford, 1.0, 0.3)).unwrap();
        assert!(stats.imag_residue < 1e-12);
        assert!(stats.mass_drift < 1e-12);
    }

    #[test]
    fn symmetrize_examples() {
        let v = random_field(3, 3, 8, Period::TwoPi, 4);
        let s = symmetrize_se2(&v).unwrap();
        assert_eq!(symmetrize_se2(&s).unwrap(), s);
        let angles = AngleGrid::new(8, Period::TwoPi).unwrap();
        let mut one = LiftedField::zeros(1, 1, 1.0, 1.0, angles);
        one.set(0, 0, 1, 1.0);
        let s = symmetrize_se2(&one).unwrap();
        assert_eq!(s.fiber(0, 0), &[0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        assert!(symmetrize_se2(&random_field(2, 2, 8, Period::Pi, 1)).is_err());
        assert!(symmetrize_se2(&random_field(2, 2, 7, Period::TwoPi, 1)).is_err());
    }

    #[test]
    fn project_max_matches_scan() {
        let v = random_field(5, 4, 6, Period::Pi, 9);
        let img = project_max(&v);
        for iy in 0..4 {
            for ix in 0..5 {
                let mut m = f64::NEG_INFINITY;
                for k in 0..6 {
                    m = m.max(v.get(ix, iy, k));
                }
                assert_eq!(img.get(ix, iy), m);
            }
        }
    }
}
