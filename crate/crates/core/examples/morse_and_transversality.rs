//! Genericity of smoothed noise and the transversality determinant.

use hypoinpaint::smoothing::{morse_genericity_trial, transversality_matrix};

fn main() -> hypoinpaint::Result<()> {
    let fraction = morse_genericity_trial(100, 64, 2.0, 7)?;
    println!("{:.0}% of smoothed 64x64 noise images are Morse", 100.0 * fraction);

    for eps in [0.25, 0.5, 1.0] {
        let m = transversality_matrix(eps, 1.0, 1.0)?;
        let closed = 65536.0 * eps.powi(28) / 164025.0;
        println!(
            "eps {eps:4}: det {:.6e} (closed form {closed:.6e}, {} nodes per axis)",
            m.determinant, m.nodes_per_axis
        );
    }
    Ok(())
}
