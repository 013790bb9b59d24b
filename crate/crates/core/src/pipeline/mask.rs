//! Synthetic corruption masks.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Image2D, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    /// Horizontal bands of `thickness` rows.
    Stripes,
    /// Horizontal and vertical bands.
    Grid,
    /// A band around the main diagonal.
    Diagonal,
    /// Randomly placed `thickness × thickness` squares.
    RandomBlocks,
}

/// Kind, target fraction of corrupted pixels, and the band or block size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub coverage: f64,
    pub thickness: usize,
}

impl MaskSpec {
    pub fn new(kind: MaskKind, coverage: f64) -> Self {
        let thickness = match kind {
            MaskKind::RandomBlocks => 8,
            _ => 1,
        };
        Self {
            kind,
            coverage,
            thickness,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coverage > 0.0 && self.coverage < 1.0) {
            return Err(Error::invalid(format!(
                "coverage must lie in (0, 1), got {}",
                self.coverage
            )));
        }
        if self.thickness == 0 {
            return Err(Error::invalid("mask thickness must be at least 1"));
        }
        Ok(())
    }
}

/// `kind:coverage[:thickness]`, e.g. `stripes:0.1` or `random_blocks:0.2:6`.
impl FromStr for MaskSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(Error::invalid(format!(
                "mask spec {s:?} is not kind:coverage[:thickness]"
            )));
        }
        let kind = match parts[0].trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "stripes" => MaskKind::Stripes,
            "grid" => MaskKind::Grid,
            "diagonal" => MaskKind::Diagonal,
            "random_blocks" | "blocks" => MaskKind::RandomBlocks,
            other => return Err(Error::invalid(format!("unknown mask kind {other:?}"))),
        };
        let coverage: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad coverage {:?}", parts[1])))?;
        let mut spec = MaskSpec::new(kind, coverage);
        if let Some(t) = parts.get(2) {
            spec.thickness = t
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad thickness {t:?}")))?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// `true` marks a corrupted pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid("mask size does not match its dimensions"));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let data = (0..width * height).map(|i| f(i % width, i / width)).collect();
        Self { width, height, data }
    }

    /// Pixels brighter than one half are corrupted.
    pub fn from_image(img: &Image2D) -> Self {
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| v > 0.5).collect(),
        }
    }

    pub fn to_image(&self) -> Image2D {
        let data = self.data.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Image2D::new(self.width, self.height, data).expect("mask dimensions are positive")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn is_masked(&self, ix: usize, iy: usize) -> bool {
        self.data[iy * self.width + ix]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&m| m).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.data.len() as f64
    }

    pub fn matches(&self, img: &Image2D) -> bool {
        self.width == img.width() && self.height == img.height()
    }
}

fn band_period(coverage: f64, thickness: usize) -> usize {
    ((thickness as f64 / coverage).round() as usize).max(thickness + 1)
}

pub fn build_mask(width: usize, height: usize, spec: &MaskSpec, seed: u64) -> Result<Mask> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = spec.thickness;
    Ok(match spec.kind {
        MaskKind::Stripes => {
            let p = band_period(spec.coverage, t);
            let offset = rng.gen_range(0..p);
            Mask::from_fn(width, height, |_, y| (y + offset) % p < t)
        }
        MaskKind::Grid => {
            // Two families of bands: 1 − (1 − c₁)² = coverage.
            let c1 = 1.0 - (1.0 - spec.coverage).sqrt();
            let p = band_period(c1, t);
            let (ox, oy) = (rng.gen_range(0..p), rng.gen_range(0..p));
            Mask::from_fn(width, height, |x, y| (x + ox) % p < t || (y + oy) % p < t)
        }
        MaskKind::Diagonal => {
            // Band |x·(h/w) − y| < r with r picked to hit the coverage.
            let slope = height as f64 / width as f64;
            let band = |r: f64| {
                Mask::from_fn(width, height, |x, y| {
                    ((x as f64 + 0.5) * slope - (y as f64 + 0.5)).abs() < r
                })
            };
            let (mut lo, mut hi) = (0.0, height as f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if band(mid).fraction() < spec.coverage {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            band(hi)
        }
        MaskKind::RandomBlocks => {
            let mut data = vec![false; width * height];
            let target = (spec.coverage * (width * height) as f64).round() as usize;
            let (bw, bh) = (t.min(width), t.min(height));
            let mut count = 0;
            while count < target {
                let x0 = rng.gen_range(0..=width - bw);
                let y0 = rng.gen_range(0..=height - bh);
                for y in y0..y0 + bh {
                    for x in x0..x0 + bw {
                        let cell = &mut data[y * width + x];
                        if !*cell {
                            *cell = true;
                            count += 1;
                        }
                    }
                }
            }
            Mask::new(width, height, data)?
        }
    })
}

/// Zeroes the pixels selected by the mask built from `spec` and `seed`.
pub fn corrupt_image(img: &Image2D, spec: &MaskSpec, seed: u64) -> Result<(Image2D, Mask)> {
    let mask = build_mask(img.width(), img.height(), spec, seed)?;
    Ok((apply_mask(img, &mask)?, mask))
}

pub fn apply_mask(img: &Image2D, mask: &Mask) -> Result<Image2D> {
    if !mask.matches(img) {
        return Err(Error::invalid("mask and image differ in size"));
    }
    let data = img
        .data()
        .iter()
        .zip(mask.data())
        .map(|(&v, &m)| if m { 0.0 } else { v })
        .collect();
    img.with_data(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> Image2D {
        Image2D::from_fn(n, n, 1.0, 1.0, |_, _| 1.0).unwrap()
    }

    #[test]
    fn stripes_hit_coverage_within_a_row() {
        let (out, mask) = corrupt_image(&ones(128), &MaskSpec::new(MaskKind::Stripes, 0.1), 3).unwrap();
        assert!((mask.fraction() - 0.1).abs() <= 1.0 / 128.0);
        for (v, m) in out.data().iter().zip(mask.data()) {
            assert_eq!(*v, if *m { 0.0 } else { 1.0 });
        }
    }

    #[test]
    fn other_kinds_hit_coverage() {
        for kind in [MaskKind::Grid, MaskKind::Diagonal, MaskKind::RandomBlocks] {
            let mask = build_mask(128, 128, &MaskSpec::new(kind, 0.15), 5).unwrap();
            assert!((mask.fraction() - 0.15).abs() < 0.03, "{kind:?}: {}", mask.fraction());
        }
    }

    #[test]
    fn diagonal_band_follows_the_diagonal() {
        let mask = build_mask(64, 64, &MaskSpec::new(MaskKind::Diagonal, 0.1), 0).unwrap();
        for i in 0..64 {
            assert!(mask.is_masked(i, i));
        }
        assert!(!mask.is_masked(63, 0) && !mask.is_masked(0, 63));
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = MaskSpec::new(MaskKind::RandomBlocks, 0.2);
        assert_eq!(
            build_mask(50, 40, &spec, 9).unwrap(),
            build_mask(50, 40, &spec, 9).unwrap()
        );
    }

    #[test]
    fn parse_and_validate() {
        let s: MaskSpec = "random_blocks:0.2:6".parse().unwrap();
        assert_eq!((s.kind, s.coverage, s.thickness), (MaskKind::RandomBlocks, 0.2, 6));
        assert!("stripes:1.0".parse::<MaskSpec>().is_err());
        assert!("stripes:0".parse::<MaskSpec>().is_err());
        assert!("zigzag:0.1".parse::<MaskSpec>().is_err());
        assert!(build_mask(8, 8, &MaskSpec::new(MaskKind::Stripes, 1.5), 0).is_err());
    }
}
