//! The hypoelliptic heat flow `∂t φ = (cosθ ∂x + sinθ ∂y)² φ + β² ∂θ² φ`,
//! solved in space by the DFT and in θ by one small dense problem per
//! spatial frequency, plus the final projection back to the plane.

mod field;
mod frequency;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::pipeline::iterate_pipeline;
pub use field::{evolve_field, evolve_field_with_stats, project_max, symmetrize_se2, EvolutionStats};
pub use frequency::{evolve_single_frequency, generator_matrix, FrequencySlice};

use crate::{Error, Period, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Unoriented directions, θ mod π.
    Ptr2,
    /// Oriented directions on the rototranslation group, θ mod 2π.
    Se2,
    /// Drift `cosθ ∂x + sinθ ∂y` plus angular diffusion, θ mod 2π.
    Mumford,
}

impl Mode {
    pub fn period(self) -> Period {
        match self {
            Mode::Ptr2 => Period::Pi,
            Mode::Se2 | Mode::Mumford => Period::TwoPi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Ptr2 => "ptr2",
            Mode::Se2 => "se2",
            Mode::Mumford => "mumford",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ptr2" => Ok(Mode::Ptr2),
            "se2" => Ok(Mode::Se2),
            "mumford" => Ok(Mode::Mumford),
            other => Err(Error::invalid(format!("unknown mode {other:?} (ptr2, se2, mumford)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Exact exponential of the per-frequency generator.
    EigenExponential,
    /// `n_substeps` implicit midpoint steps.
    CrankNicolson,
}

impl Solver {
    /// Exact exponential up to 128 angle nodes, Crank–Nicolson above.
    pub fn for_resolution(n_theta: usize) -> Self {
        if n_theta <= 128 {
            Solver::EigenExponential
        } else {
            Solver::CrankNicolson
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub beta: f64,
    pub time: f64,
    pub mode: Mode,
    pub n_substeps: usize,
    pub solver: Solver,
}

impl EvolutionParams {
    pub fn new(mode: Mode, beta: f64, time: f64) -> Self {
        Self {
            beta,
            time,
            mode,
            n_substeps: 1,
            solver: Solver::EigenExponential,
        }
    }

    pub fn with_solver(mut self, solver: Solver, n_substeps: usize) -> Self {
        self.solver = solver;
        self.n_substeps = n_substeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let beta_ok = match self.mode {
            Mode::Ptr2 | Mode::Se2 => self.beta > 0.0,
            Mode::Mumford => self.beta >= 0.0,
        };
        if !(beta_ok && self.beta.is_finite()) {
            return Err(Error::invalid(format!(
                "beta {} not allowed in {} mode",
                self.beta, self.mode
            )));
        }
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return Err(Error::invalid(format!(
                "diffusion time must be non-negative, got {}",
                self.time
            )));
        }
        if self.n_substeps == 0 {
            return Err(Error::invalid("n_substeps must be at least 1"));
        }
        Ok(())
    }
}
