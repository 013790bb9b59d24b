use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hypoinpaint::curves::{cost_j, detect_cusps, energy, lift_curve, read_curve};
use hypoinpaint::evolution::Mode;
use hypoinpaint::kernel::{KernelQuadrature, Se2, Se2HeatKernel};
use hypoinpaint::pipeline::{
    corrupt_image, load_image, run_pipeline, save_image, synthetic_test_image, Mask, MaskSpec, PipelineConfig,
    PipelineInputs,
};
use hypoinpaint::smoothing::{find_critical_points_in, gaussian_convolve, morse_genericity_trial, MorseTolerances};
use hypoinpaint::{Error, Period, Result};

#[derive(Parser)]
#[command(name = "hypoinpaint", version, about = "Inpainting by hypoelliptic diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct an image and print a JSON report.
    Inpaint(Box<InpaintArgs>),
    /// Zero out pixels along a synthetic mask.
    Corrupt(CorruptArgs),
    /// Evaluate the SE(2) or PT(R²) heat kernel at points `x,y,theta`.
    KernelEval(KernelArgs),
    /// Cost, energy and cusps of a curve file.
    CurveCost(CurveArgs),
    /// Critical points of a smoothed image, or a random genericity trial.
    MorseCheck(MorseArgs),
}

#[derive(Args)]
struct ConfigFlags {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    time: Option<f64>,
    #[arg(long)]
    theta_steps: Option<usize>,
    /// Lift half-width, or `auto` for one angle bin.
    #[arg(long)]
    epsilon: Option<String>,
    /// ptr2, se2 or mumford.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    restore_known: bool,
    #[arg(long)]
    pad: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    substeps: Option<usize>,
}

impl ConfigFlags {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        let pairs = [
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("beta", self.beta.map(|v| v.to_string())),
            ("time", self.time.map(|v| v.to_string())),
            ("n_theta", self.theta_steps.map(|v| v.to_string())),
            ("epsilon", self.epsilon.clone()),
            ("mode", self.mode.map(|v| v.to_string())),
            ("iterations", self.iterations.map(|v| v.to_string())),
            ("pad", self.pad.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("substeps", self.substeps.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if self.restore_known {
            cfg.restore_known = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct InpaintArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    cfg: ConfigFlags,
    /// Image whose nonzero pixels mark corrupted locations.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    /// Write the first lifted field to this file.
    #[arg(long)]
    dump_lift: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    /// Source image; omit together with `--synthetic`.
    input: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// `kind:coverage[:thickness]` with kind stripes, grid, diagonal or random_blocks.
    #[arg(long, default_value = "stripes:0.1")]
    spec: MaskSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the mask as a black/white image.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Use the built-in test scene of this size instead of an input file.
    #[arg(long)]
    synthetic: Option<usize>,
}

#[derive(Args)]
struct KernelArgs {
    /// Points `x,y,theta`.
    #[arg(required = true, allow_hyphen_values = true)]
    points: Vec<String>,
    #[arg(long, default_value_t = 0.5)]
    time: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// se2 or ptr2; ptr2 adds the value at the π-rotated point.
    #[arg(long, default_value = "se2")]
    mode: Mode,
    /// Double every quadrature parameter.
    #[arg(long)]
    refine: bool,
}

#[derive(Args)]
struct CurveArgs {
    curve: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

#[derive(Args)]
struct MorseArgs {
    /// Image to analyse; omit to run a random genericity trial.
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Border excluded from the scan; defaults to ⌈4σ⌉.
    #[arg(long)]
    margin: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn inpaint(a: &InpaintArgs) -> Result<()> {
    let cfg = a.cfg.resolve()?;
    let input = load_image(&a.input)?;
    let mask = a
        .mask
        .as_ref()
        .map(|p| load_image(p).map(|m| Mask::from_image(&m)))
        .transpose()?;
    let truth = a.ground_truth.as_ref().map(load_image).transpose()?;
    let inputs = PipelineInputs {
        mask: mask.as_ref(),
        ground_truth: truth.as_ref(),
        dump_lift: a.dump_lift.as_deref(),
    };
    let (out, report) = run_pipeline(&input, &cfg, &inputs)?;
    save_image(&out, &a.output)?;
    let text = report.to_json();
    match &a.report {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?,
        None => println!("{text}"),
    }
    Ok(())
}

fn corrupt(a: &CorruptArgs) -> Result<()> {
    let img = match (&a.input, a.synthetic) {
        (_, Some(n)) => synthetic_test_image(n)?,
        (Some(p), None) => load_image(p)?,
        (None, None) => return Err(Error::InvalidInput("give an input image or --synthetic".into())),
    };
    let (bad, mask) = corrupt_image(&img, &a.spec, a.seed)?;
    save_image(&bad, &a.output)?;
    if let Some(p) = &a.mask {
        save_image(&mask.to_image(), p)?;
    }
    print_json(&json!({ "masked_fraction": mask.fraction(), "spec": a.spec, "seed": a.seed }));
    Ok(())
}

fn parse_point(s: &str) -> Result<Se2> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("bad point {s:?}")))?;
    match v[..] {
        [x, y, theta] => Ok(Se2::new(x, y, theta)),
        _ => Err(Error::InvalidInput(format!("point {s:?} is not x,y,theta"))),
    }
}

fn kernel_eval(a: &KernelArgs) -> Result<()> {
    let mut quad = KernelQuadrature::for_time(a.time);
    if a.refine {
        quad = quad.refined();
    }
    let kernel = Se2HeatKernel::new(a.time, a.beta, quad)?;
    let mut rows = Vec::new();
    for s in &a.points {
        let g = parse_point(s)?;
        let value = match a.mode {
            Mode::Se2 => kernel.evaluate(&g)?,
            Mode::Ptr2 => kernel.evaluate_ptr2(&g, &Se2::IDENTITY)?,
            Mode::Mumford => return Err(Error::Unsupported("no closed-form kernel in mumford mode".into())),
        };
        rows.push(json!({ "x": g.x, "y": g.y, "theta": g.theta, "value": value }));
    }
    print_json(&json!({ "time": a.time, "beta": a.beta, "mode": a.mode, "quadrature": quad, "values": rows }));
    Ok(())
}

fn curve_cost(a: &CurveArgs) -> Result<()> {
    let file = read_curve(&a.curve)?;
    let c = &file.curve;
    let j = cost_j(c, a.beta);
    let e = energy(c, a.beta);
    let cusps = lift_curve(c, Period::Pi).map(|l| detect_cusps(&l).into_iter().map(|i| l.t[i]).collect::<Vec<_>>());
    let field = |r: Result<f64>| match r {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    };
    print_json(&json!({
        "samples": c.len(),
        "beta": a.beta,
        "cost": field(j),
        "energy": field(e),
        "cusp_times": match cusps {
            Ok(ts) => json!(ts),
            Err(e) => json!({ "error": e.to_string() }),
        },
    }));
    Ok(())
}

fn morse_check(a: &MorseArgs) -> Result<()> {
    match &a.input {
        Some(p) => {
            let img = load_image(p)?;
            let smooth = gaussian_convolve(&img, a.sigma * img.hx(), a.sigma * img.hy())?;
            let margin = a.margin.unwrap_or((4.0 * a.sigma).ceil() as usize);
            let report = find_critical_points_in(&smooth, MorseTolerances::for_image(&smooth), margin)?;
            print_json(&serde_json::to_value(&report).expect("report serializes"));
        }
        None => {
            let fraction = morse_genericity_trial(a.trials, a.size, a.sigma, a.seed)?;
            print_json(&json!({
                "trials": a.trials, "size": a.size, "sigma": a.sigma, "seed": a.seed, "morse_fraction": fraction,
            }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Inpaint(a) => inpaint(a),
        Command::Corrupt(a) => corrupt(a),
        Command::KernelEval(a) => kernel_eval(a),
        Command::CurveCost(a) => curve_cost(a),
        Command::MorseCheck(a) => morse_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
