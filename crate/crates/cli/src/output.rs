//! CSV and SVG renderings of an iterate stack.

use std::fmt::Write as _;
use std::io::Write;

use hermite_core::schemes::IterateStack;
use hermite_core::seqs::VectorSeq;
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Serialize)]
struct Row {
    level: u32,
    alpha: i64,
    x: f64,
    component: usize,
    value_re: f64,
    value_im: f64,
}

/// Writes every level, sorted by `(level, alpha, component)`.
pub fn write_csv<W: Write>(out: W, stack: &IterateStack) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for (level, seq) in &stack.levels {
        let h = 0.5f64.powi(*level as i32);
        for (alpha, v) in seq.iter() {
            for (component, z) in v.iter().enumerate() {
                w.serialize(Row {
                    level: *level,
                    alpha,
                    x: alpha as f64 * h,
                    component,
                    value_re: z.re,
                    value_im: z.im,
                })?;
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// Static polyline of the real part of component 0 of `seq` on `2^{-level}ℤ`.
pub fn svg_polyline(seq: &VectorSeq, level: u32) -> String {
    let h = 0.5f64.powi(level as i32);
    let pts: Vec<(f64, f64)> = seq.iter().map(|(a, v)| (a as f64 * h, v[0].re)).collect();
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    if !pts.is_empty() {
        let (x0, x1) = bounds(pts.iter().map(|p| p.0));
        let (y0, y1) = bounds(pts.iter().map(|p| p.1));
        let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0);
        let sy = (HEIGHT - 2.0 * MARGIN) / (y1 - y0);
        let mut coords = String::new();
        for (x, y) in &pts {
            let px = MARGIN + (x - x0) * sx;
            let py = HEIGHT - MARGIN - (y - y0) * sy;
            let _ = write!(coords, "{px:.3},{py:.3} ");
        }
        let _ = writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>",
            coords.trim_end()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Range of the values, padded when degenerate.
fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
