//! Grayscale image files: PGM (ASCII `P2`, binary `P5`) and 8-bit PNG.
//! Intensities are mapped to `[0, 1]`.

use std::io::Cursor;
use std::path::Path;

use crate::{Error, Image2D, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    PgmAscii,
    PgmBinary,
    Png,
}

impl ImageFormat {
    /// From the file extension; `.pgm` means binary PGM.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
        {
            Some(e) if e == "pgm" => Ok(ImageFormat::PgmBinary),
            Some(e) if e == "png" => Ok(ImageFormat::Png),
            _ => Err(Error::Unsupported(format!(
                "{}: expected a .pgm or .png file",
                path.display()
            ))),
        }
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image2D> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Sniffs the format from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<Image2D> {
    if bytes.starts_with(b"\x89PNG") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else {
        Err(Error::format(0, "not a PGM (P2/P5) or PNG file"))
    }
}

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_pgm_header(bytes: &[u8]) -> Result<Header> {
    let binary = match &bytes[..2.min(bytes.len())] {
        b"P2" => false,
        b"P5" => true,
        _ => return Err(Error::format(0, "missing P2/P5 magic number")),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(start, format!("expected {name}")));
        }
        fields[i] = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(start, format!("{name} out of range")))?;
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err(Error::format(pos, "header must end with a whitespace byte"));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::format(2, "image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(pos, format!("unsupported maxval {maxval}")));
    }
    Ok(Header {
        binary,
        width,
        height,
        maxval: maxval as u32,
        data_start: pos + 1,
    })
}

fn decode_pgm(bytes: &[u8]) -> Result<Image2D> {
    let h = parse_pgm_header(bytes)?;
    let n = h.width * h.height;
    let maxval = h.maxval as f64;
    let mut data = Vec::with_capacity(n);
    if h.binary {
        let wide = h.maxval > 255;
        let need = n * if wide { 2 } else { 1 };
        let payload = &bytes[h.data_start..];
        if payload.len() < need {
            return Err(Error::format(
                bytes.len(),
                format!("expected {need} bytes of pixel data"),
            ));
        }
        for i in 0..n {
            let v = if wide {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as u32
            } else {
                payload[i] as u32
            };
            if v > h.maxval {
                return Err(Error::format(h.data_start + i, "sample exceeds maxval"));
            }
            data.push(v as f64 / maxval);
        }
    } else {
        let mut pos = h.data_start;
        while data.len() < n {
            while bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
                pos += 1;
            }
            if bytes.get(pos) == Some(&b'#') {
                while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
                pos += 1;
            }
            if start == pos {
                return Err(Error::format(
                    start,
                    format!("expected sample {} of {n}", data.len() + 1),
                ));
            }
            let v: u32 = std::str::from_utf8(&bytes[start..pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .filter(|&v| v <= h.maxval)
                .ok_or_else(|| Error::format(start, "sample exceeds maxval"))?;
            data.push(v as f64 / maxval);
        }
    }
    Image2D::new(h.width, h.height, data)
}

fn decode_png(bytes: &[u8]) -> Result<Image2D> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::format(0, format!("PNG: {e}")))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::Unsupported(format!(
            "PNG color type {:?}; only grayscale is read",
            info.color_type
        )));
    }
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Unsupported(format!(
            "{}-bit PNG; only 8-bit grayscale is read",
            info.bit_depth as u8
        )));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format(0, "PNG too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format(0, format!("PNG: {e}")))?;
    let mut data = Vec::with_capacity(width * height);
    for row in buf[..frame.buffer_size()].chunks(frame.line_size).take(height) {
        data.extend(row[..width].iter().map(|&b| b as f64 / 255.0));
    }
    Image2D::new(width, height, data)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn encode_image(img: &Image2D, format: ImageFormat) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    let (w, h) = (img.width(), img.height());
    Ok(match format {
        ImageFormat::PgmBinary => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend_from_slice(&bytes);
            out
        }
        ImageFormat::PgmAscii => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            for row in bytes.chunks(w) {
                let line: Vec<String> = row.iter().map(|b| b.to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
        ImageFormat::Png => {
            let mut out = Vec::new();
            let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc
                .write_header()
                .map_err(|e| Error::Unsupported(format!("PNG encoder: {e}")))?;
            writer
                .write_image_data(&bytes)
                .map_err(|e| Error::Unsupported(format!("PNG encoder: {e}")))?;
            writer
                .finish()
                .map_err(|e| Error::Unsupported(format!("PNG encoder: {e}")))?;
            out
        }
    })
}

/// Writes `img` clamped to `[0, 1]` and rounded to 8 bits, format chosen
/// by extension.
pub fn save_image(img: &Image2D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_image_as(img, path, ImageFormat::from_path(path)?)
}

pub fn save_image_as(img: &Image2D, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_image(img, format)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Image2D {
        Image2D::from_fn(7, 5, 1.0, 1.0, |x, y| ((x * 37 + y * 11) % 256) as f64 / 255.0).unwrap()
    }

    #[test]
    fn all_formats_round_trip() {
        let img = sample();
        for f in [ImageFormat::PgmAscii, ImageFormat::PgmBinary, ImageFormat::Png] {
            let back = decode_image(&encode_image(&img, f).unwrap()).unwrap();
            assert_eq!(back, img, "{f:?}");
        }
    }

    #[test]
    fn ascii_and_binary_agree() {
        let a = decode_image(b"P2\n# comment\n3 1\n4\n0 2 4\n").unwrap();
        let b = decode_image(b"P5 3 1 4\n\x00\x02\x04").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn sixteen_bit_pgm_is_read() {
        let img = decode_image(b"P5 2 1 1000\n\x00\x00\x03\xe8").unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn malformed_headers_report_offsets() {
        match decode_image(b"P2\n3 x\n255\n") {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(decode_image(b"P5 2 2 255\n\x01"), Err(Error::Format { .. })));
        assert!(matches!(
            decode_image(b"P2 2 1 255\n1 300\n"),
            Err(Error::Format { offset: 13, .. })
        ));
        assert!(matches!(decode_image(b"GIF89a"), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn sixteen_bit_png_is_unsupported() {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, 2, 2);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(&[0u8; 8]).unwrap();
        w.finish().unwrap();
        assert!(matches!(decode_image(&out), Err(Error::Unsupported(_))));
    }

    #[test]
    fn save_clamps_and_rounds() {
        let img = Image2D::new(3, 1, vec![-0.2, 0.5, 1.7]).unwrap();
        let back = decode_image(&encode_image(&img, ImageFormat::PgmBinary).unwrap()).unwrap();
        assert_eq!(back.data(), &[0.0, 128.0 / 255.0, 1.0]);
    }
}
