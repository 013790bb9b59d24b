//! Acceptance criteria, one line each. Run with
//! `cargo test --test acceptance`.
//!
//! The process exits non-zero when a criterion's outcome differs from the
//! expected one in `EXPECTED_FAILURES` (empty apart from known-unattainable
//! targets), so a fix that makes such a criterion pass is also flagged.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use hypoinpaint::curves::{
    detect_cusps, energy_homothety_check, homothety_check, integrate_control_system, PlanarCurve,
};
use hypoinpaint::evolution::{
    evolve_field, evolve_field_with_stats, evolve_single_frequency, generator_matrix, symmetrize_se2, EvolutionParams,
    FrequencySlice, Mode,
};
use hypoinpaint::kernel::{mathieu_basis, KernelQuadrature, Se2, Se2HeatKernel};
use hypoinpaint::pipeline::{
    corrupt_image, load_image, run_pipeline, MaskKind, MaskSpec, PipelineConfig, PipelineInputs,
};
use hypoinpaint::smoothing::{
    find_critical_points, morse_genericity_trial, transversality_determinant, CriticalKind, MorseTolerances,
};
use hypoinpaint::{AngleGrid, Image2D, LiftedField, Period};

const EXPECTED_FAILURES: &[usize] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let pass = out.pass && took < budget;
    println!(
        "[{}] {id}. {name}: {} ({:.2} s, budget {:.0} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn transversality() -> Outcome {
    let eps = 0.5;
    let det = transversality_determinant(eps, 1.0, 1.0).unwrap();
    let expected = 65536.0 * eps.powi(28) / 164025.0;
    let rel = (det - expected).abs() / expected;
    let ratio = transversality_determinant(2.0 * eps, 1.0, 1.0).unwrap() / det;
    let ratio_err = (ratio / 2f64.powi(28) - 1.0).abs();
    Outcome {
        pass: rel < 1e-4,
        detail: format!("det {det:.6e} vs {expected:.6e}, rel {rel:.1e}; det(2ε)/det(ε)/2^28 − 1 = {ratio_err:.1e}"),
    }
}

fn cusp_trajectory() -> Outcome {
    let dt = 1e-4;
    let c = integrate_control_system(|t| PI / 2.0 - t, |_| 1.0, [0.0; 3], PI, dt, Period::TwoPi).unwrap();
    let mut err = 0.0f64;
    for i in 0..c.t.len() {
        let t = c.t[i];
        let x = -t.cos() + 0.5 * (PI - 2.0 * t) * t.sin() + 1.0;
        let y = PI * (0.5 * t).sin().powi(2) + t * t.cos() - t.sin();
        err = err.max((c.x[i] - x).hypot(c.y[i] - y));
    }
    let cusps: Vec<f64> = detect_cusps(&c).into_iter().map(|i| c.t[i]).collect();
    let located = cusps.len() == 1 && (cusps[0] - PI / 2.0).abs() <= dt;
    Outcome {
        pass: err < 1e-6 && located,
        detail: format!("max position error {err:.1e}, cusps at {cusps:?}"),
    }
}

fn random_curve(rng: &mut ChaCha8Rng, n: usize) -> PlanarCurve {
    let coef: Vec<[f64; 4]> = (1..=4)
        .map(|k| {
            let s = 0.15 / (k * k) as f64;
            [
                rng.gen_range(-s..s),
                rng.gen_range(-s..s),
                rng.gen_range(-s..s),
                rng.gen_range(-s..s),
            ]
        })
        .collect();
    let turn = rng.gen_range(-1.5..1.5);
    PlanarCurve::from_fn(n, 0.0, 1.0, |t| {
        let mut x = t + 0.3 * (turn * t).sin();
        let mut y = 0.3 * (1.0 - (turn * t).cos());
        for (k, c) in coef.iter().enumerate() {
            let w = 2.0 * PI * (k + 1) as f64 * t;
            x += c[0] * w.cos() + c[1] * w.sin();
            y += c[2] * w.cos() + c[3] * w.sin();
        }
        (x, y)
    })
    .unwrap()
}

fn homothety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_j, mut worst_e) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let c = random_curve(&mut rng, 10_000);
        for beta in [0.5, 2.0, 3.0] {
            let (lhs, rhs) = homothety_check(&c, beta).unwrap();
            worst_j = worst_j.max((lhs - rhs).abs() / rhs);
            let (lhs, rhs) = energy_homothety_check(&c, beta).unwrap();
            worst_e = worst_e.max((lhs - rhs).abs() / rhs);
        }
    }
    Outcome {
        pass: worst_j < 1e-6,
        detail: format!("max |J_β(βγ) − β²J(γ)|/β²J(γ) = {worst_j:.3e}; the energy form obeys β² to {worst_e:.1e}"),
    }
}

fn solver_vs_exponential() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 64;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let (mode, period) = match trial % 3 {
            0 => (Mode::Ptr2, Period::Pi),
            1 => (Mode::Se2, Period::TwoPi),
            _ => (Mode::Mumford, Period::TwoPi),
        };
        let grid = AngleGrid::new(n, period).unwrap();
        let xi = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let p = EvolutionParams::new(mode, rng.gen_range(0.2..2.0), rng.gen_range(0.01..1.0));
        let profile: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = if mode == Mode::Mumford {
            generator_matrix(xi, &p, &grid).unwrap()
        } else {
            // Built here from the operator: β²·(periodic second difference) − 4π²⟨ξ, e_θ⟩².
            let h = period.value() / n as f64;
            DMatrix::from_fn(n, n, |i, j| {
                let d = (i + n - j) % n;
                let mut v = p.beta
                    * p.beta
                    * match d {
                        0 => -2.0,
                        1 => 1.0,
                        _ if d == n - 1 => 1.0,
                        _ => 0.0,
                    }
                    / (h * h);
                if i == j {
                    let th = i as f64 * h;
                    let s = 2.0 * PI * (xi.0 * th.cos() + xi.1 * th.sin());
                    v -= s * s;
                }
                Complex64::new(v, 0.0)
            })
        };
        let expected = (a * Complex64::new(p.time, 0.0)).exp() * DVector::from_vec(profile.clone());
        let got = evolve_single_frequency(&FrequencySlice { xi, profile }, &p, &grid).unwrap();
        let diff: f64 = got
            .profile
            .iter()
            .zip(expected.iter())
            .map(|(g, e)| (g - e).norm_sqr())
            .sum();
        worst = worst.max(diff.sqrt() / expected.norm());
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!("worst relative 2-norm error {worst:.1e} over 100 pairs"),
    }
}

fn solver_vs_kernel() -> Outcome {
    let (n_px, h, n, t) = (64, 0.125, 32, 0.5);
    let grid = AngleGrid::new(n, Period::Pi).unwrap();
    let mut v = LiftedField::zeros(n_px, n_px, h, h, grid);
    v.set(0, 0, 0, 1.0 / (h * h * grid.spacing()));
    let u = evolve_field(&v, &EvolutionParams::new(Mode::Ptr2, 1.0, t)).unwrap();
    let kernel = Se2HeatKernel::new(t, 1.0, KernelQuadrature::for_time(t)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..50 {
        let (ix, iy, k) = (rng.gen_range(-8i64..=8), rng.gen_range(-8i64..=8), rng.gen_range(0..n));
        let g = Se2::new(ix as f64 * h, iy as f64 * h, grid.node(k));
        let p = kernel.evaluate_ptr2(&g, &Se2::IDENTITY).unwrap();
        let w = |i: i64| i.rem_euclid(n_px as i64) as usize;
        num += (u.get(w(ix), w(iy), k) - p).abs();
        den += p.abs();
    }
    let rel = num / den;
    Outcome {
        pass: rel < 0.05,
        detail: format!("relative L¹ error {rel:.2e} at 50 probes"),
    }
}

fn random_field(w: usize, n: usize, period: Period, seed: u64) -> LiftedField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..w * w * n).map(|_| rng.gen::<f64>()).collect();
    LiftedField::from_data(w, w, 1.0, 1.0, AngleGrid::new(n, period).unwrap(), data).unwrap()
}

fn quarter_turn(v: &LiftedField) -> LiftedField {
    let (s, n) = (v.width(), v.n_theta());
    let shift = ((PI / 2.0) / v.angles().spacing()).round() as usize;
    let mut out = LiftedField::zeros(s, s, v.hx(), v.hy(), v.angles());
    for iy in 0..s {
        for ix in 0..s {
            for k in 0..n {
                out.set(s - 1 - iy, ix, (k + shift) % n, v.get(ix, iy, k));
            }
        }
    }
    out
}

fn conservation_and_symmetry() -> Outcome {
    let mut drift = 0.0f64;
    for (mode, period) in [
        (Mode::Ptr2, Period::Pi),
        (Mode::Se2, Period::TwoPi),
        (Mode::Mumford, Period::TwoPi),
    ] {
        let v = random_field(32, 16, period, 6);
        let (_, stats) = evolve_field_with_stats(&v, &EvolutionParams::new(mode, 0.8, 1.0)).unwrap();
        drift = drift.max(stats.mass_drift);
    }

    let v = symmetrize_se2(&random_field(24, 16, Period::TwoPi, 7)).unwrap();
    let out = evolve_field(&v, &EvolutionParams::new(Mode::Se2, 1.1, 0.6)).unwrap();
    let asym = out
        .data()
        .chunks(16)
        .flat_map(|f| (0..8).map(move |k| (f[k] - f[k + 8]).abs()))
        .fold(0.0f64, f64::max);

    let mut rot = 0.0f64;
    for (mode, period, n) in [(Mode::Ptr2, Period::Pi, 16), (Mode::Se2, Period::TwoPi, 16)] {
        let v = random_field(24, n, period, 8);
        let p = EvolutionParams::new(mode, 0.7, 0.5);
        let a = evolve_field(&quarter_turn(&v), &p).unwrap();
        let b = quarter_turn(&evolve_field(&v, &p).unwrap());
        let e = a
            .data()
            .iter()
            .zip(b.data())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        rot = rot.max(e / b.max());
    }

    let kernel = Se2HeatKernel::new(0.5, 1.0, KernelQuadrature::for_time(0.5)).unwrap();
    let (mut imag, mut pi_sym) = (0.0f64, 0.0f64);
    for g in [
        Se2::new(0.3, 0.2, 0.5),
        Se2::new(-0.4, 0.1, 2.0),
        Se2::new(0.1, -0.5, 4.0),
    ] {
        let c = kernel.evaluate_complex(&g);
        imag = imag.max((c.im / c.re).abs());
        let a = kernel.evaluate(&(Se2::PI_ROTATION * g)).unwrap();
        let b = kernel.evaluate(&(g * Se2::PI_ROTATION)).unwrap();
        pi_sym = pi_sym.max(((a - b) / a).abs());
    }
    Outcome {
        pass: drift < 1e-9 && asym < 1e-12 && rot < 1e-9 && imag < 1e-6 && pi_sym < 1e-6,
        detail: format!(
            "mass drift {drift:.1e}, antipodal asymmetry {asym:.1e}, quarter-turn {rot:.1e}, \
             kernel Im/Re {imag:.1e}, Π-symmetry {pi_sym:.1e}"
        ),
    }
}

fn sampled(n: usize, f: impl Fn(f64, f64) -> f64) -> Image2D {
    let h = 2.0 / (n - 1) as f64;
    Image2D::from_fn(n, n, h, h, |ix, iy| f(-1.0 + ix as f64 * h, -1.0 + iy as f64 * h)).unwrap()
}

fn morse() -> Outcome {
    let fraction = morse_genericity_trial(100, 64, 2.0, 0).unwrap();
    let report = |img: Image2D| {
        let tol = MorseTolerances::for_image(&img);
        find_critical_points(&img, tol.grad_tol, tol.det_tol).unwrap()
    };
    let bowl = report(sampled(41, |x, y| x * x + y * y));
    let saddle = report(sampled(41, |x, y| x * x - y * y));
    let monkey = report(sampled(101, |x, y| x * x * x - 3.0 * x * y * y));
    let classified = bowl.points.len() == 1
        && bowl.points[0].kind == CriticalKind::Minimum
        && saddle.points.len() == 1
        && saddle.points[0].kind == CriticalKind::Saddle
        && !monkey.is_morse;
    Outcome {
        pass: fraction >= 0.99 && classified,
        detail: format!(
            "{:.0}/100 Morse; quadratic/saddle/monkey classified: {classified}",
            fraction * 100.0
        ),
    }
}

fn mathieu() -> Outcome {
    let b = mathieu_basis(0.0, 10, 16).unwrap();
    let zero_q = b
        .char_a
        .iter()
        .enumerate()
        .map(|(n, a)| (a - (n * n) as f64).abs())
        .chain(
            b.char_b
                .iter()
                .enumerate()
                .map(|(i, v)| (v - ((i + 1) * (i + 1)) as f64).abs()),
        )
        .fold(0.0f64, f64::max);
    let a0 = |m: usize| mathieu_basis(1.0, 4, m).unwrap().char_a[0];
    let doubling = (a0(12) - a0(24)).abs();
    Outcome {
        pass: zero_q < 1e-10 && doubling < 1e-10,
        detail: format!(
            "max |a_n(0) − n²| {zero_q:.1e}, a_0(1) = {:.12}, doubling change {doubling:.1e}",
            a0(24)
        ),
    }
}

fn inpainting() -> Outcome {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "assets", "test_image.pgm"]
        .iter()
        .collect();
    let truth = load_image(&path).unwrap();
    let (corrupted, mask) = corrupt_image(&truth, &MaskSpec::new(MaskKind::Stripes, 0.1), 0).unwrap();
    let cfg = PipelineConfig::default();
    let inputs = PipelineInputs {
        mask: Some(&mask),
        ground_truth: Some(&truth),
        dump_lift: None,
    };
    let (_, report) = run_pipeline(&corrupted, &cfg, &inputs).unwrap();
    let (before, after) = (report.psnr_before.unwrap(), report.psnr_after.unwrap());
    let shape_ok = (report.padded_width, report.padded_height, cfg.n_theta) == (160, 160, 32);
    Outcome {
        pass: after - before >= 3.0 && shape_ok && report.timings.total_ms < 60_000.0,
        detail: format!(
            "masked PSNR {before:.2} → {after:.2} dB (+{:.2}), {}×{}×{} in {:.0} ms",
            after - before,
            report.padded_width,
            report.padded_height,
            cfg.n_theta,
            report.timings.total_ms
        ),
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "transversality determinant", s(5), transversality),
        criterion(2, "cusp trajectory", s(1), cusp_trajectory),
        criterion(3, "homothety identity", s(5), homothety),
        criterion(4, "solver vs dense exponential", s(10), solver_vs_exponential),
        criterion(5, "solver vs heat kernel", s(120), solver_vs_kernel),
        criterion(6, "conservation and symmetry", s(60), conservation_and_symmetry),
        criterion(7, "Morse genericity", s(30), morse),
        criterion(8, "Mathieu sanity", s(1), mathieu),
        criterion(9, "end-to-end inpainting", s(60), inpainting),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria pass", results.len());
    let unexpected: Vec<usize> = results
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1, p))
        .filter(|&(id, p)| p == EXPECTED_FAILURES.contains(&id))
        .map(|(id, _)| id)
        .collect();
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
