//! Text formats for spectra, curve samples, trajectories and reports.

use std::io::{self, Write};

use serde::Serialize;

use crate::diagnostics::{summarize, InequalityReport};
use crate::flows::{evaluate_h, FlowState};
use crate::integrator::{Event, Outcome, Trajectory};
use crate::spectrum::CurveSamples;

/// One line of the trajectory JSONL stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateRecord {
    pub t: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "A")]
    pub area: f64,
    pub ipd: f64,
    pub ipr: f64,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
}

impl From<&FlowState> for StateRecord {
    fn from(s: &FlowState) -> Self {
        let g = summarize(s);
        StateRecord {
            t: s.t,
            length: s.length,
            area: s.area,
            ipd: g.ipd,
            ipr: g.ipr,
            k_min: g.k_min,
            k_max: g.k_max,
        }
    }
}

#[derive(Serialize)]
struct SummaryRecord<'a> {
    event: &'a Event,
    outcome: &'a Outcome,
    verdict: String,
}

/// One JSON object per state, then a trailing `{event, outcome, verdict}` record.
pub fn write_trajectory_jsonl<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    for s in &traj.states {
        serde_json::to_writer(&mut out, &StateRecord::from(s))?;
        out.write_all(b"\n")?;
    }
    let summary = SummaryRecord {
        event: &traj.event,
        outcome: &traj.outcome,
        verdict: traj.outcome.to_string(),
    };
    serde_json::to_writer(&mut out, &summary)?;
    out.write_all(b"\n")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub const TIMESERIES_HEADER: &str = "t,L,A,ipd,ipr,k_min,k_max,H";

/// CSV with header `t,L,A,ipd,ipr,k_min,k_max,H`. Missing values are left empty.
pub fn write_timeseries_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{TIMESERIES_HEADER}")?;
    for s in &traj.states {
        let r = StateRecord::from(s);
        let h = evaluate_h(&traj.term, s).ok();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.length,
            r.area,
            r.ipd,
            r.ipr,
            opt(r.k_min),
            opt(r.k_max),
            opt(h)
        )?;
    }
    Ok(())
}

/// CSV columns `theta,x,y`.
pub fn write_curve_csv<W: Write>(samples: &CurveSamples, mut out: W) -> io::Result<()> {
    writeln!(out, "theta,x,y")?;
    for (th, p) in samples.thetas.iter().zip(&samples.points) {
        writeln!(out, "{},{},{}", th, p[0], p[1])?;
    }
    Ok(())
}

/// CSV rows `t,name,lhs,rhs,slack,satisfied`, one per report and state time.
pub fn write_reports_csv<'a, W: Write>(
    reports: impl IntoIterator<Item = (f64, &'a InequalityReport)>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "t,name,lhs,rhs,slack,satisfied")?;
    for (t, r) in reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t, r.name, r.lhs, r.rhs, r.slack, r.satisfied
        )?;
    }
    Ok(())
}
