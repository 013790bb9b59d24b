//! Corrupts the bundled test scene with horizontal stripes and reconstructs it.
//!
//! `cargo run --release --example inpaint_stripes [out.png]`

use hypoinpaint::pipeline::{
    corrupt_image, run_pipeline, save_image, synthetic_test_image, MaskKind, MaskSpec, PipelineConfig, PipelineInputs,
};

fn main() -> hypoinpaint::Result<()> {
    let truth = synthetic_test_image(128)?;
    let (corrupted, mask) = corrupt_image(&truth, &MaskSpec::new(MaskKind::Stripes, 0.1), 0)?;
    let cfg = PipelineConfig::default();
    let inputs = PipelineInputs {
        mask: Some(&mask),
        ground_truth: Some(&truth),
        dump_lift: None,
    };
    let (out, report) = run_pipeline(&corrupted, &cfg, &inputs)?;

    println!(
        "masked PSNR {:.2} dB -> {:.2} dB in {:.0} ms",
        report.psnr_before.unwrap_or(f64::NAN),
        report.psnr_after.unwrap_or(f64::NAN),
        report.timings.total_ms
    );
    if let Some(path) = std::env::args().nth(1) {
        save_image(&out, &path)?;
        println!("wrote {path}");
    }
    Ok(())
}
