use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use curveflow::diagnostics::inequality_suite;
use curveflow::export::{write_reports_csv, write_timeseries_csv, write_trajectory_jsonl};
use curveflow::{integrate, uniform_grid, CurveSamples, FlowState, Trajectory};
use serde::Serialize;

use crate::config::RunConfig;
use crate::svg::write_svg_frames;

/// Minimum number of normal angles per drawn frame.
pub const FRAME_POINTS: usize = 256;

#[derive(Serialize)]
struct FrameRecord<'a> {
    frame: usize,
    t: f64,
    #[serde(flatten)]
    samples: &'a CurveSamples,
}

/// Indices of `count` states spread evenly through the stored trajectory.
pub fn frame_indices(states: usize, count: usize) -> Vec<usize> {
    if states == 0 {
        return Vec::new();
    }
    (0..count)
        .map(|i| ((i * (states - 1)) as f64 / (count - 1) as f64).round() as usize)
        .collect()
}

pub fn frame_samples(state: &FlowState) -> CurveSamples {
    let m = FRAME_POINTS.max(4 * state.spectrum.truncation());
    state.spectrum.curve_position(&uniform_grid(m))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Integrates the configured flow. Relative input paths are read from `base`.
pub fn simulate(cfg: &RunConfig, base: &Path) -> Result<Trajectory> {
    let spec = cfg.initial_spectrum(base)?;
    spec.ensure_convex()?;
    Ok(integrate(&spec, &cfg.flow, &cfg.controls)?)
}

/// Runs `cfg` and writes every artifact under `out`. Returns the trajectory
/// and the paths written.
pub fn run(cfg: &RunConfig, base: &Path, out: &Path) -> Result<(Trajectory, Vec<PathBuf>)> {
    let traj = simulate(cfg, base)?;
    let o = &cfg.outputs;
    let mut written = Vec::new();

    let path = out.join(&o.timeseries);
    let mut w = create(&path)?;
    write_timeseries_csv(&traj, &mut w)?;
    w.flush()?;
    written.push(path);

    let path = out.join(&o.trajectory);
    let mut w = create(&path)?;
    write_trajectory_jsonl(&traj, &mut w)?;
    w.flush()?;
    written.push(path);

    let frames: Vec<(f64, CurveSamples)> = frame_indices(traj.states.len(), cfg.frame_count)
        .into_iter()
        .map(|i| (traj.states[i].t, frame_samples(&traj.states[i])))
        .collect();
    let path = out.join(&o.frames);
    let mut w = create(&path)?;
    for (i, (t, samples)) in frames.iter().enumerate() {
        serde_json::to_writer(
            &mut w,
            &FrameRecord {
                frame: i,
                t: *t,
                samples,
            },
        )?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    written.push(path);

    if let Some(dir) = &o.svg {
        let dir = out.join(dir);
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let curves: Vec<&CurveSamples> = frames.iter().map(|(_, s)| s).collect();
        written.extend(write_svg_frames(&curves, &dir)?);
    }

    let reports: Vec<_> = frame_indices(traj.states.len(), cfg.frame_count)
        .into_iter()
        .flat_map(|i| {
            let s = &traj.states[i];
            inequality_suite(&s.spectrum)
                .into_iter()
                .map(move |r| (s.t, r))
        })
        .collect();
    let path = out.join(&o.reports);
    let mut w = create(&path)?;
    write_reports_csv(reports.iter().map(|(t, r)| (*t, r)), &mut w)?;
    w.flush()?;
    written.push(path);

    Ok((traj, written))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_cover_both_ends() {
        assert_eq!(frame_indices(11, 3), vec![0, 5, 10]);
        assert_eq!(frame_indices(2, 4), vec![0, 0, 1, 1]);
        assert!(frame_indices(0, 3).is_empty());
    }
}
