//! Spectral heat kernel against the Fourier solver on a normalized delta.

use hypoinpaint::evolution::{evolve_field, EvolutionParams, Mode};
use hypoinpaint::kernel::{KernelQuadrature, Se2, Se2HeatKernel};
use hypoinpaint::{AngleGrid, LiftedField, Period};

fn main() -> hypoinpaint::Result<()> {
    let (n_px, h, t) = (64, 0.125, 0.5);
    let grid = AngleGrid::new(32, Period::Pi)?;
    let mut v = LiftedField::zeros(n_px, n_px, h, h, grid);
    v.set(0, 0, 0, 1.0 / (h * h * grid.spacing()));
    let u = evolve_field(&v, &EvolutionParams::new(Mode::Ptr2, 1.0, t))?;

    let kernel = Se2HeatKernel::new(t, 1.0, KernelQuadrature::for_time(t))?;
    println!("{:>6} {:>6} {:>6} {:>12} {:>12}", "x", "y", "theta", "solver", "kernel");
    for (ix, iy, k) in [(0, 0, 0), (3, 0, 0), (0, 2, 0), (2, 1, 4), (4, 2, 8), (62, 61, 28)] {
        let x = if ix > n_px / 2 {
            ix as f64 - n_px as f64
        } else {
            ix as f64
        } * h;
        let y = if iy > n_px / 2 {
            iy as f64 - n_px as f64
        } else {
            iy as f64
        } * h;
        let g = Se2::new(x, y, grid.node(k));
        let p = kernel.evaluate_ptr2(&g, &Se2::IDENTITY)?;
        println!("{x:6.3} {y:6.3} {:6.3} {:12.6} {p:12.6}", g.theta, u.get(ix, iy, k));
    }
    Ok(())
}
