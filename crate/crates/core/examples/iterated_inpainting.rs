//! One long diffusion against several short ones, with and without
//! restoring the known pixels, on each mask kind.

use hypoinpaint::pipeline::{
    corrupt_image, run_pipeline, synthetic_test_image, MaskSpec, PipelineConfig, PipelineInputs,
};

fn main() -> hypoinpaint::Result<()> {
    let truth = synthetic_test_image(128)?;
    for spec in ["stripes:0.1", "grid:0.1", "diagonal:0.05", "random_blocks:0.1:6"] {
        let spec: MaskSpec = spec.parse()?;
        let (bad, mask) = corrupt_image(&truth, &spec, 1)?;
        let inputs = PipelineInputs {
            mask: Some(&mask),
            ground_truth: Some(&truth),
            dump_lift: None,
        };
        for (iterations, restore_known) in [(1, false), (4, false), (1, true), (4, true)] {
            let cfg = PipelineConfig {
                iterations,
                restore_known,
                ..PipelineConfig::default()
            };
            let (_, r) = run_pipeline(&bad, &cfg, &inputs)?;
            println!(
                "{:?} x{iterations} restore={restore_known}: {:.2} -> {:.2} dB",
                spec.kind,
                r.psnr_before.unwrap_or(f64::NAN),
                r.psnr_after.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
