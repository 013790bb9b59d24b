//! Integrates the control system with a sign change in the forward speed,
//! finds the cusp and prices a few curves.
//!
//! `cargo run --example cusp_curve [curve.txt]`

use std::f64::consts::PI;

use hypoinpaint::curves::{cost_j, detect_cusps, energy, integrate_control_system, write_lifted_curve, PlanarCurve};
use hypoinpaint::Period;

fn main() -> hypoinpaint::Result<()> {
    let c = integrate_control_system(|t| PI / 2.0 - t, |_| 1.0, [0.0; 3], PI, 1e-3, Period::TwoPi)?;
    for i in detect_cusps(&c) {
        println!("cusp at t = {:.4} ({:.4}, {:.4})", c.t[i], c.x[i], c.y[i]);
    }
    match cost_j(&c.planar()?, 1.0) {
        Ok(j) => println!("cost {j}"),
        Err(e) => println!("cost rejected: {e}"),
    }

    let arc = PlanarCurve::from_fn(2001, 0.0, PI, |t| (t.cos(), t.sin()))?;
    for beta in [0.5, 1.0, 2.0] {
        println!(
            "half circle, beta {beta}: J = {:.6}, E = {:.6}",
            cost_j(&arc, beta)?,
            energy(&arc, beta)?
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let file = std::fs::File::create(&path).map_err(|e| hypoinpaint::Error::Io {
            path: path.clone().into(),
            source: e,
        })?;
        write_lifted_curve(&c, std::io::BufWriter::new(file)).map_err(|e| hypoinpaint::Error::Io {
            path: path.clone().into(),
            source: e,
        })?;
        println!("wrote {path}");
    }
    Ok(())
}
