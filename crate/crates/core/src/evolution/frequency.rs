use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rustfft::num_complex::Complex64;

use super::{EvolutionParams, Mode, Solver};
use crate::linalg::{expm, periodic_second_difference};
use crate::{AngleGrid, Error, Result};

/// Sign of `i` in the transformed drift `i·2π⟨ξ, e_θ⟩`; pinned by the
/// real-space regression test below.
pub(crate) const MUMFORD_DRIFT_SIGN: f64 = 1.0;

/// θ-profile of the transformed field at one spatial frequency `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySlice {
    pub xi: (f64, f64),
    pub profile: Vec<Complex64>,
}

fn check(p: &EvolutionParams, grid: &AngleGrid, len: usize) -> Result<()> {
    p.validate()?;
    if grid.period() != p.mode.period() {
        return Err(Error::invalid(format!(
            "{} mode needs period {:?}, grid has {:?}",
            p.mode,
            p.mode.period(),
            grid.period()
        )));
    }
    if len != grid.len() {
        return Err(Error::invalid(format!(
            "profile has {len} samples, grid has {}",
            grid.len()
        )));
    }
    Ok(())
}

fn projection(xi: (f64, f64), theta: f64) -> f64 {
    xi.0 * theta.cos() + xi.1 * theta.sin()
}

fn real_generator(xi: (f64, f64), beta: f64, grid: &AngleGrid) -> DMatrix<f64> {
    let mut a = periodic_second_difference(grid.len(), grid.spacing()) * (beta * beta);
    for k in 0..grid.len() {
        let s = projection(xi, grid.node(k));
        a[(k, k)] -= 4.0 * PI * PI * s * s;
    }
    a
}

pub(crate) fn generator_with_sign(
    xi: (f64, f64),
    beta: f64,
    mode: Mode,
    grid: &AngleGrid,
    drift_sign: f64,
) -> DMatrix<Complex64> {
    match mode {
        Mode::Ptr2 | Mode::Se2 => real_generator(xi, beta, grid).map(|v| Complex64::new(v, 0.0)),
        Mode::Mumford => {
            let mut a = (periodic_second_difference(grid.len(), grid.spacing()) * (beta * beta))
                .map(|v| Complex64::new(v, 0.0));
            for k in 0..grid.len() {
                a[(k, k)] += Complex64::new(0.0, drift_sign * 2.0 * PI * projection(xi, grid.node(k)));
            }
            a
        }
    }
}

/// Dense per-frequency generator: `β²D₂ − 4π²⟨ξ, e_θ⟩²` for ptr2/se2,
/// `β²D₂ + 2πi⟨ξ, e_θ⟩` for the drift mode.
pub fn generator_matrix(xi: (f64, f64), p: &EvolutionParams, grid: &AngleGrid) -> Result<DMatrix<Complex64>> {
    check(p, grid, grid.len())?;
    Ok(generator_with_sign(xi, p.beta, p.mode, grid, MUMFORD_DRIFT_SIGN))
}

pub(crate) fn propagate(
    xi: (f64, f64),
    profile: &[Complex64],
    p: &EvolutionParams,
    grid: &AngleGrid,
    drift_sign: f64,
) -> Vec<Complex64> {
    if p.time == 0.0 {
        return profile.to_vec();
    }
    match (p.solver, p.mode) {
        (Solver::EigenExponential, Mode::Ptr2 | Mode::Se2) => {
            let eig = SymmetricEigen::new(real_generator(xi, p.beta, grid));
            let q = &eig.eigenvectors;
            let decay = eig.eigenvalues.map(|l| (p.time * l).exp());
            let apply = |x: DVector<f64>| q * (q.tr_mul(&x).component_mul(&decay));
            let re = apply(DVector::from_iterator(profile.len(), profile.iter().map(|c| c.re)));
            let im = apply(DVector::from_iterator(profile.len(), profile.iter().map(|c| c.im)));
            re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect()
        }
        (Solver::EigenExponential, Mode::Mumford) => {
            let a = generator_with_sign(xi, p.beta, p.mode, grid, drift_sign) * Complex64::new(p.time, 0.0);
            let out = expm(&a) * DVector::from_column_slice(profile);
            out.iter().copied().collect()
        }
        (Solver::CrankNicolson, _) => {
            let n = profile.len();
            let a = generator_with_sign(xi, p.beta, p.mode, grid, drift_sign);
            let half = Complex64::new(0.5 * p.time / p.n_substeps as f64, 0.0);
            let id = DMatrix::<Complex64>::identity(n, n);
            let explicit = &id + &a * half;
            let implicit = (&id - &a * half).lu();
            let mut x = DVector::from_column_slice(profile);
            for _ in 0..p.n_substeps {
                x = implicit
                    .solve(&(&explicit * &x))
                    .expect("I - (dt/2)A is invertible for a dissipative generator");
            }
            x.iter().copied().collect()
        }
    }
}

/// Evolves one θ-profile for time `p.time` under the generator at `s.xi`.
pub fn evolve_single_frequency(s: &FrequencySlice, p: &EvolutionParams, grid: &AngleGrid) -> Result<FrequencySlice> {
    check(p, grid, s.profile.len())?;
    Ok(FrequencySlice {
        xi: s.xi,
        profile: propagate(s.xi, &s.profile, p, grid, MUMFORD_DRIFT_SIGN),
    })
}
