//! Deterministic grayscale test scene.

use crate::{Image2D, Result};

fn ramp(signed_distance: f64) -> f64 {
    (0.5 - signed_distance).clamp(0.0, 1.0)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// A `size × size` scene with a shaded background, a disk, a square, a thin
/// ring and a slanted bar. Edges are anti-aliased over one pixel and all
/// values lie in `[0.1, 0.9]`.
pub fn synthetic_test_image(size: usize) -> Result<Image2D> {
    let s = size as f64 / 128.0;
    Image2D::from_fn(size, size, 1.0, 1.0, |x, y| {
        let p = (x as f64 + 0.5, y as f64 + 0.5);
        let mut v = 0.3 + 0.15 * p.0 / size as f64;

        let disk = ramp((p.0 - 40.0 * s).hypot(p.1 - 42.0 * s) - 22.0 * s);
        v += disk * (0.85 - v);

        let sq = (p.0 - 92.0 * s).abs().max((p.1 - 38.0 * s).abs()) - 18.0 * s;
        v += ramp(sq) * (0.12 - v);

        let ring = ((p.0 - 86.0 * s).hypot(p.1 - 92.0 * s) - 20.0 * s).abs() - 2.5 * s;
        v += ramp(ring) * (0.75 - v);

        let bar = segment_distance(p, (12.0 * s, 118.0 * s), (60.0 * s, 70.0 * s)) - 3.0 * s;
        v += ramp(bar) * (0.6 - v);

        v.clamp(0.1, 0.9)
    })
}
