//! Writes the built-in 128×128 test scene (the bundled `assets/test_image.pgm`).
//!
//! `cargo run --example write_test_image [path]`

use hypoinpaint::pipeline::{save_image, synthetic_test_image};

fn main() -> hypoinpaint::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "assets/test_image.pgm".into());
    save_image(&synthetic_test_image(128)?, &path)?;
    println!("wrote {path}");
    Ok(())
}
