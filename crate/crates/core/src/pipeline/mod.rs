//! End-to-end reconstruction: smoothing, lift, evolution, projection.

mod config;
mod image_io;
mod mask;
mod metrics;
mod synthetic;

use std::path::Path;
use std::time::Instant;

use serde::{Serialize, Serializer};

pub use config::{PipelineConfig, CONFIG_KEYS};
pub use image_io::{decode_image, encode_image, load_image, save_image, save_image_as, ImageFormat};
pub use mask::{apply_mask, build_mask, corrupt_image, Mask, MaskKind, MaskSpec};
pub use metrics::psnr;
pub use synthetic::synthetic_test_image;

use crate::evolution::{evolve_field_with_stats, project_max, EvolutionParams, Solver};
use crate::lifting::{lift_image, save_lift_dump};
use crate::smoothing::gaussian_convolve;
use crate::{Error, Image2D, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub smoothing_ms: f64,
    pub lift_ms: f64,
    pub evolution_ms: f64,
    pub projection_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationReport {
    /// Factor mapping the mean of `2ε·max_θ` back to the mean of the
    /// iteration's input.
    pub gain: f64,
    pub mass_drift: f64,
    pub imag_residue: f64,
}

fn decibels<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" }),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub width: usize,
    pub height: usize,
    pub padded_width: usize,
    pub padded_height: usize,
    pub epsilon: f64,
    pub config: PipelineConfig,
    pub timings: StageTimings,
    /// Largest relative mass drift over all iterations.
    pub mass_drift: f64,
    /// Largest imaginary residue over all iterations.
    pub imag_residue: f64,
    pub iterations: Vec<IterationReport>,
    pub masked_fraction: Option<f64>,
    /// Ground truth against the input, over the mask when one is given.
    #[serde(serialize_with = "decibels")]
    pub psnr_before: Option<f64>,
    /// Ground truth against the output, same region.
    #[serde(serialize_with = "decibels")]
    pub psnr_after: Option<f64>,
    /// Output against input over the whole image.
    #[serde(serialize_with = "decibels")]
    pub psnr_vs_input: Option<f64>,
}

impl PipelineReport {
    fn new(img: &Image2D, cfg: &PipelineConfig) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            padded_width: img.width() + 2 * cfg.pad,
            padded_height: img.height() + 2 * cfg.pad,
            epsilon: cfg.epsilon(),
            config: cfg.clone(),
            timings: StageTimings::default(),
            mass_drift: 0.0,
            imag_residue: 0.0,
            iterations: Vec::new(),
            masked_fraction: None,
            psnr_before: None,
            psnr_after: None,
            psnr_vs_input: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Optional side inputs of [`run_pipeline`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineInputs<'a> {
    /// Corrupted pixels (`true`); used for PSNR and for restoring known pixels.
    pub mask: Option<&'a Mask>,
    pub ground_truth: Option<&'a Image2D>,
    /// Where to write the first lifted field.
    pub dump_lift: Option<&'a Path>,
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Restore<'a> {
    known: &'a Image2D,
    mask: &'a Mask,
}

fn reconstruct(
    f: &Image2D,
    cfg: &PipelineConfig,
    n_iter: usize,
    restore: Option<Restore<'_>>,
    dump_lift: Option<&Path>,
    report: &mut PipelineReport,
) -> Result<Image2D> {
    if n_iter == 0 {
        return Err(Error::invalid("iteration count must be at least 1"));
    }
    let lift = cfg.lift_params();
    let eps = cfg.epsilon();
    let solver = Solver::for_resolution(cfg.n_theta);
    let substeps = if solver == Solver::CrankNicolson {
        cfg.substeps
    } else {
        1
    };
    let params = EvolutionParams::new(cfg.mode, cfg.beta, cfg.time / n_iter as f64).with_solver(solver, substeps);
    let (w, h, pad) = (f.width(), f.height(), cfg.pad);

    let mut current = f.clone();
    for it in 0..n_iter {
        let t = Instant::now();
        let field = lift_image(&current, &lift).map_err(|e| e.in_stage("lift"))?;
        if it == 0 {
            if let Some(path) = dump_lift {
                save_lift_dump(&field, path).map_err(|e| e.in_stage("lift"))?;
            }
        }
        report.timings.lift_ms += elapsed_ms(t);

        let t = Instant::now();
        let (evolved, stats) = evolve_field_with_stats(&field.pad_zero(pad), &params)
            .and_then(|(v, s)| Ok((v.crop(pad, pad, w, h)?, s)))
            .map_err(|e| e.in_stage("evolution"))?;
        report.timings.evolution_ms += elapsed_ms(t);

        let t = Instant::now();
        let raw = project_max(&evolved).map(|v| 2.0 * eps * v);
        let raw_mean = raw.mean();
        let gain = if raw_mean > 0.0 { current.mean() / raw_mean } else { 1.0 };
        let mut out = raw.map(|v| (gain * v).clamp(0.0, 1.0));
        if let Some(r) = &restore {
            for (i, v) in out.data_mut().iter_mut().enumerate() {
                if !r.mask.data()[i] {
                    *v = r.known.data()[i];
                }
            }
        }
        report.timings.projection_ms += elapsed_ms(t);

        report.mass_drift = report.mass_drift.max(stats.mass_drift);
        report.imag_residue = report.imag_residue.max(stats.imag_residue);
        report.iterations.push(IterationReport {
            gain,
            mass_drift: stats.mass_drift,
            imag_residue: stats.imag_residue,
        });
        current = out;
    }
    Ok(current)
}

/// `n_iter` rounds of lift, evolution over `time / n_iter`, and projection,
/// applied to an already smoothed image.
pub fn iterate_pipeline(f: &Image2D, cfg: &PipelineConfig, n_iter: usize) -> Result<Image2D> {
    cfg.validate()?;
    let mut report = PipelineReport::new(f, cfg);
    reconstruct(f, cfg, n_iter, None, None, &mut report)
}

/// Smooths `input` and runs `cfg.iterations` rounds of [`iterate_pipeline`],
/// filling in a report with timings, evolution diagnostics and PSNR figures.
pub fn run_pipeline(
    input: &Image2D,
    cfg: &PipelineConfig,
    extra: &PipelineInputs<'_>,
) -> Result<(Image2D, PipelineReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = PipelineReport::new(input, cfg);
    if let Some(m) = extra.mask {
        if !m.matches(input) {
            return Err(Error::invalid("mask and input differ in size"));
        }
        report.masked_fraction = Some(m.fraction());
    }
    if let Some(gt) = extra.ground_truth {
        if !gt.same_shape(input) {
            return Err(Error::invalid("ground truth and input differ in size"));
        }
    }

    let t = Instant::now();
    let smoothed = gaussian_convolve(input, cfg.sigma * input.hx(), cfg.sigma * input.hy())
        .map_err(|e| e.in_stage("smoothing"))?;
    report.timings.smoothing_ms = elapsed_ms(t);

    let restore = match (cfg.restore_known, extra.mask) {
        (false, _) => None,
        (true, Some(mask)) => Some(Restore { known: input, mask }),
        (true, None) => return Err(Error::invalid("restoring known pixels needs a mask").in_stage("restore")),
    };
    let out = reconstruct(&smoothed, cfg, cfg.iterations, restore, extra.dump_lift, &mut report)?;

    report.psnr_vs_input = Some(psnr(input, &out, None)?);
    if let Some(gt) = extra.ground_truth {
        report.psnr_before = Some(psnr(gt, input, extra.mask)?);
        report.psnr_after = Some(psnr(gt, &out, extra.mask)?);
    }
    report.timings.total_ms = elapsed_ms(start);
    Ok((out, report))
}

/// [`run_pipeline`] on an image file.
pub fn run_pipeline_file(
    path: impl AsRef<Path>,
    cfg: &PipelineConfig,
    extra: &PipelineInputs<'_>,
) -> Result<(Image2D, PipelineReport)> {
    let img = load_image(path).map_err(|e| e.in_stage("load"))?;
    run_pipeline(&img, cfg, extra)
}
