//! Plain-text curves: one `t x y [theta]` row per sample, `#` comments.

use std::io::Write;
use std::path::Path;

use super::{LiftedCurve, PlanarCurve};
use crate::{Error, Result};

/// A parsed curve file; `theta` is present when every row has a fourth
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub curve: PlanarCurve,
    pub theta: Option<Vec<f64>>,
}

pub fn parse_curve(text: &str) -> Result<CurveFile> {
    let (mut t, mut x, mut y, mut theta) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut columns = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let values: Vec<f64> = body
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format(start, format!("bad number: {e}")))?;
        if !(values.len() == 3 || values.len() == 4) {
            return Err(Error::format(
                start,
                format!("expected 3 or 4 columns, found {}", values.len()),
            ));
        }
        if *columns.get_or_insert(values.len()) != values.len() {
            return Err(Error::format(start, "rows disagree on the number of columns"));
        }
        t.push(values[0]);
        x.push(values[1]);
        y.push(values[2]);
        if let Some(&th) = values.get(3) {
            theta.push(th);
        }
    }
    let has_theta = columns == Some(4);
    Ok(CurveFile {
        curve: PlanarCurve::new(t, x, y)?,
        theta: has_theta.then_some(theta),
    })
}

pub fn read_curve(path: impl AsRef<Path>) -> Result<CurveFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curve(&text)
}

pub fn write_curve(c: &PlanarCurve, mut out: impl Write) -> std::io::Result<()> {
    for i in 0..c.len() {
        writeln!(out, "{:e} {:e} {:e}", c.t()[i], c.x()[i], c.y()[i])?;
    }
    Ok(())
}

pub fn write_lifted_curve(c: &LiftedCurve, mut out: impl Write) -> std::io::Result<()> {
    for i in 0..c.len() {
        writeln!(out, "{:e} {:e} {:e} {:e}", c.t[i], c.x[i], c.y[i], c.theta[i])?;
    }
    Ok(())
}
