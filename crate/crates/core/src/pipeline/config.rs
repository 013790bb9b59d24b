//! Pipeline parameters and their flat `key = value` text form.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::evolution::Mode;
use crate::lifting::LiftParams;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Gaussian pre-smoothing, in pixels.
    pub sigma: f64,
    pub beta: f64,
    /// Total diffusion time, split evenly over the iterations.
    pub time: f64,
    pub n_theta: usize,
    /// Lift window half-width; `None` means one angle bin.
    pub epsilon: Option<f64>,
    pub mode: Mode,
    pub iterations: usize,
    /// Copy uncorrupted pixels back after every projection.
    pub restore_known: bool,
    /// Zero border added before the periodic evolution.
    pub pad: usize,
    pub seed: u64,
    /// Steps per evolution when the Crank–Nicolson solver is used.
    pub substeps: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sigma: 1.5,
            beta: 0.5,
            time: 0.3,
            n_theta: 32,
            epsilon: None,
            mode: Mode::Ptr2,
            iterations: 1,
            restore_known: false,
            pad: 16,
            seed: 0,
            substeps: 32,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "sigma",
    "beta",
    "time",
    "n_theta",
    "epsilon",
    "mode",
    "iterations",
    "restore_known",
    "pad",
    "seed",
    "substeps",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::invalid(format!("bad boolean {value:?} for {key}"))),
    }
}

impl PipelineConfig {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
            .unwrap_or_else(|| self.mode.period().value() / self.n_theta as f64)
    }

    pub fn lift_params(&self) -> LiftParams {
        LiftParams::new(self.n_theta, self.mode.period()).with_epsilon(self.epsilon())
    }

    /// Sets one key; `theta_steps` and dashed spellings are accepted.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "sigma" => self.sigma = parse(&key, value)?,
            "beta" => self.beta = parse(&key, value)?,
            "time" => self.time = parse(&key, value)?,
            "n_theta" | "theta_steps" => self.n_theta = parse(&key, value)?,
            "epsilon" => {
                self.epsilon = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse(&key, value)?)
                }
            }
            "mode" => self.mode = value.parse()?,
            "iterations" => self.iterations = parse(&key, value)?,
            "restore_known" => self.restore_known = parse_bool(&key, value)?,
            "pad" => self.pad = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "substeps" => self.substeps = parse(&key, value)?,
            _ => return Err(Error::invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Defaults overridden by the `key = value` lines of `text`; `#` starts
    /// a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::format(start, "expected key = value"))?;
            cfg.set(k, v).map_err(|e| Error::format(start, e.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let eps = self.epsilon.map_or_else(|| "auto".to_string(), |e| e.to_string());
        format!(
            "sigma = {}\nbeta = {}\ntime = {}\nn_theta = {}\nepsilon = {}\nmode = {}\niterations = {}\n\
             restore_known = {}\npad = {}\nseed = {}\nsubsteps = {}\n",
            self.sigma,
            self.beta,
            self.time,
            self.n_theta,
            eps,
            self.mode,
            self.iterations,
            self.restore_known,
            self.pad,
            self.seed,
            self.substeps
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        let beta_ok = match self.mode {
            Mode::Mumford => self.beta >= 0.0,
            _ => self.beta > 0.0,
        };
        if !(beta_ok && self.beta.is_finite()) {
            return Err(Error::invalid(format!(
                "beta {} not allowed in {} mode",
                self.beta, self.mode
            )));
        }
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return Err(Error::invalid(format!("time must be non-negative, got {}", self.time)));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if self.substeps == 0 {
            return Err(Error::invalid("substeps must be at least 1"));
        }
        self.lift_params().validate()
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!((c.sigma, c.beta, c.time, c.n_theta), (1.5, 0.5, 0.3, 32));
        assert!((c.epsilon() - PI / 32.0).abs() < 1e-15);
        assert_eq!(
            (c.mode, c.iterations, c.pad, c.restore_known),
            (Mode::Ptr2, 1, 16, false)
        );
        c.validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut c = PipelineConfig::default();
        c.set("theta-steps", "48").unwrap();
        c.set("mode", "se2").unwrap();
        c.set("epsilon", "0.3").unwrap();
        c.set("restore_known", "yes").unwrap();
        assert_eq!(PipelineConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match PipelineConfig::parse("sigma = 2\n# note\nbogus = 1\n") {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 17),
            other => panic!("{other:?}"),
        }
        assert!(PipelineConfig::parse("sigma 2\n").is_err());
        assert!(PipelineConfig::parse("sigma = -1\n").is_err());
        // One π-bin is narrower than a 2π-bin: invalid once the mode changes.
        assert!(PipelineConfig::parse("mode = se2\nepsilon = 0.09817477\n").is_err());
    }
}
