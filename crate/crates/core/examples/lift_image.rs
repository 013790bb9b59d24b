//! Lifts the test scene to its level-line orientations and writes a dump.
//!
//! `cargo run --example lift_image [dump.bin]`

use hypoinpaint::grid::gradient;
use hypoinpaint::lifting::{
    default_zero_grad_tol, level_direction, lift_image, lifted_support_rank, load_lift_dump, save_lift_dump, LiftParams,
};
use hypoinpaint::pipeline::synthetic_test_image;
use hypoinpaint::smoothing::gaussian_convolve;
use hypoinpaint::Period;

fn main() -> hypoinpaint::Result<()> {
    let f = gaussian_convolve(&synthetic_test_image(128)?, 1.5, 1.5)?;
    let params = LiftParams::new(32, Period::Pi);
    let lifted = lift_image(&f, &params)?;
    let n = lifted.n_theta();
    let flat = lifted
        .data()
        .chunks(n)
        .filter(|fib| fib.iter().all(|&v| v == fib[0] && v > 0.0))
        .count();
    println!(
        "{}x{}x{n} field; {flat} flat pixels fill their whole fiber",
        lifted.width(),
        lifted.height()
    );

    // On the rim of the disk the level line is tangent to the circle.
    let grad = gradient(&f)?;
    let (ix, iy) = (40, 20);
    if let Some(theta) = level_direction(grad.at(ix, iy), Period::Pi, default_zero_grad_tol(&f, &grad)) {
        println!("level direction at ({ix}, {iy}): {theta:.4}");
        println!("support rank there: {}", lifted_support_rank(&f, ix, iy, theta)?);
    }

    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("lift.bin").display().to_string());
    save_lift_dump(&lifted, &path)?;
    let back = load_lift_dump(&path)?;
    let err = back
        .data()
        .iter()
        .zip(lifted.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("wrote {path}; single-precision round trip error {err:.1e}");
    Ok(())
}
