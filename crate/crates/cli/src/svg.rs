use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use curveflow::CurveSamples;

/// Fraction of the largest frame's extent added on every side.
pub const PADDING: f64 = 0.1;

/// Shared `(x, y, width, height)` box around all frames, in SVG coordinates
/// (y pointing down).
pub fn view_box(frames: &[&CurveSamples]) -> [f64; 4] {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for f in frames {
        let (a, b) = f.bounds();
        for k in 0..2 {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(b[k]);
        }
    }
    let pad = PADDING * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    [
        lo[0] - pad,
        -hi[1] - pad,
        hi[0] - lo[0] + 2.0 * pad,
        hi[1] - lo[1] + 2.0 * pad,
    ]
}

pub fn render(curve: &CurveSamples, vb: [f64; 4]) -> String {
    let mut points = String::new();
    for p in &curve.points {
        let _ = write!(points, "{:.6},{:.6} ", p[0], 0.0 - p[1]);
    }
    let stroke = 0.005 * vb[2].max(vb[3]);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n\
         <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6}\"/>\n</svg>\n",
        vb[0],
        vb[1],
        vb[2],
        vb[3],
        points.trim_end(),
        stroke
    )
}

/// Writes `frame_00000.svg`, `frame_00001.svg`, ... into `dir`.
pub fn write_svg_frames(frames: &[&CurveSamples], dir: &Path) -> Result<Vec<PathBuf>> {
    let vb = view_box(frames);
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let path = dir.join(format!("frame_{i:05}.svg"));
            fs::write(&path, render(f, vb))
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        })
        .collect()
}
