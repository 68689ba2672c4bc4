//! Parameter sweeps: one independent run per axis value, executed in parallel.
//!
//! Axis grammar:
//! - `flow=pan-yang|lin-tsai|const:-1` replaces the flow term;
//! - `cos<n>=v1,v2,...` or `sin<n>=...` sets one harmonic of the initial curve;
//! - `scale=s1,s2,...` multiplies every harmonic of order ≥ 1.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use anyhow::Result;
use curveflow::diagnostics::ipr_monotone;
use curveflow::{integrate, IntegratorControls, NonlocalTerm, Outcome, SupportSpectrum};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AxisError {
    #[error("axis `{0}` is not of the form <name>=<values>")]
    Shape(String),
    #[error("axis `{0}` has no values")]
    Empty(String),
    #[error("unknown axis parameter `{0}` (expected flow, scale, cos<n> or sin<n>)")]
    Parameter(String),
    #[error("axis value `{value}`: {reason}")]
    Value { value: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Flow(Vec<NonlocalTerm>),
    Cos(usize, Vec<f64>),
    Sin(usize, Vec<f64>),
    Scale(Vec<f64>),
}

fn numbers(values: &str) -> Result<Vec<f64>, AxisError> {
    values
        .split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|e| AxisError::Value {
                value: v.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

impl FromStr for Axis {
    type Err = AxisError;

    fn from_str(s: &str) -> Result<Self, AxisError> {
        let (name, values) = s
            .split_once('=')
            .ok_or_else(|| AxisError::Shape(s.to_string()))?;
        let (name, values) = (name.trim(), values.trim());
        if values.is_empty() {
            return Err(AxisError::Empty(s.to_string()));
        }
        let mode = |prefix: &str| -> Result<usize, AxisError> {
            match name[prefix.len()..].parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(AxisError::Parameter(name.to_string())),
            }
        };
        match name {
            "flow" => values
                .split('|')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|e: curveflow::Error| AxisError::Value {
                            value: v.to_string(),
                            reason: e.to_string(),
                        })
                })
                .collect::<Result<_, _>>()
                .map(Axis::Flow),
            "scale" => Ok(Axis::Scale(numbers(values)?)),
            n if n.starts_with("cos") => Ok(Axis::Cos(mode("cos")?, numbers(values)?)),
            n if n.starts_with("sin") => Ok(Axis::Sin(mode("sin")?, numbers(values)?)),
            _ => Err(AxisError::Parameter(name.to_string())),
        }
    }
}

/// One point on the axis.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisValue {
    Flow(NonlocalTerm),
    Cos(usize, f64),
    Sin(usize, f64),
    Scale(f64),
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Flow(t) => write!(f, "flow={t}"),
            AxisValue::Cos(n, v) => write!(f, "cos{n}={v}"),
            AxisValue::Sin(n, v) => write!(f, "sin{n}={v}"),
            AxisValue::Scale(v) => write!(f, "scale={v}"),
        }
    }
}

impl Axis {
    pub fn values(&self) -> Vec<AxisValue> {
        match self {
            Axis::Flow(v) => v.iter().cloned().map(AxisValue::Flow).collect(),
            Axis::Cos(n, v) => v.iter().map(|&x| AxisValue::Cos(*n, x)).collect(),
            Axis::Sin(n, v) => v.iter().map(|&x| AxisValue::Sin(*n, x)).collect(),
            Axis::Scale(v) => v.iter().map(|&x| AxisValue::Scale(x)).collect(),
        }
    }
}

fn apply(
    value: &AxisValue,
    spec: &SupportSpectrum,
    flow: &NonlocalTerm,
) -> (SupportSpectrum, NonlocalTerm) {
    let mut spec = spec.clone();
    let mut flow = flow.clone();
    match value {
        AxisValue::Flow(t) => flow = t.clone(),
        AxisValue::Cos(n, v) => spec = pad_to(spec, *n).with_cos(*n, *v),
        AxisValue::Sin(n, v) => spec = pad_to(spec, *n).with_sin(*n, *v),
        AxisValue::Scale(s) => {
            let cos = spec.cos().iter().map(|c| c * s).collect();
            let sin = spec.sin().iter().map(|c| c * s).collect();
            spec = SupportSpectrum::with_truncation(spec.mean(), cos, sin, spec.truncation())
                .expect("scaling keeps the truncation");
        }
    }
    (spec, flow)
}

fn pad_to(spec: SupportSpectrum, n: usize) -> SupportSpectrum {
    if spec.truncation() >= n {
        return spec;
    }
    SupportSpectrum::with_truncation(spec.mean(), spec.cos().to_vec(), spec.sin().to_vec(), n)
        .expect("raising the truncation keeps a valid spectrum")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: AxisValue,
    pub result: std::result::Result<RowSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowSummary {
    pub outcome: Outcome,
    pub t_end: f64,
    pub length_end: f64,
    pub area_end: f64,
    pub ipr_start: f64,
    pub ipr_end: f64,
    pub ipr_non_increasing: bool,
    pub samples: usize,
}

fn run_one(
    spec: &SupportSpectrum,
    flow: &NonlocalTerm,
    controls: &IntegratorControls,
) -> Result<RowSummary> {
    spec.ensure_convex()?;
    let traj = integrate(spec, flow, controls)?;
    let ipr =
        |s: &curveflow::FlowState| s.length * s.length / (4.0 * std::f64::consts::PI * s.area);
    let last = traj.last();
    Ok(RowSummary {
        outcome: traj.outcome.clone(),
        t_end: last.t,
        length_end: last.length,
        area_end: last.area,
        ipr_start: ipr(traj.initial()),
        ipr_end: ipr(last),
        ipr_non_increasing: ipr_monotone(&traj, flow).non_increasing,
        samples: traj.states.len(),
    })
}

/// Runs every axis value; failures are kept per row.
pub fn sweep(
    spec: &SupportSpectrum,
    flow: &NonlocalTerm,
    controls: &IntegratorControls,
    axis: &Axis,
) -> Vec<SweepRow> {
    axis.values()
        .into_par_iter()
        .map(|value| {
            let (s, f) = apply(&value, spec, flow);
            let result = run_one(&s, &f, controls).map_err(|e| format!("{e:#}"));
            SweepRow { value, result }
        })
        .collect()
}

pub const SUMMARY_HEADER: &str =
    "value,outcome,t_end,L_end,A_end,ipr_start,ipr_end,ipr_non_increasing,samples,t_singular,verdict,error";

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn write_summary_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for row in rows {
        let value = quote(&row.value.to_string());
        match &row.result {
            Ok(r) => {
                let kind = serde_json::to_value(&r.outcome)
                    .ok()
                    .and_then(|v| v["kind"].as_str().map(str::to_string))
                    .unwrap_or_default();
                let t_singular = match r.outcome {
                    Outcome::CurvatureSingularity { t, .. } => t.to_string(),
                    _ => String::new(),
                };
                writeln!(
                    out,
                    "{value},{kind},{},{},{},{},{},{},{},{t_singular},{},",
                    r.t_end,
                    r.length_end,
                    r.area_end,
                    r.ipr_start,
                    r.ipr_end,
                    r.ipr_non_increasing,
                    r.samples,
                    quote(&r.outcome.to_string())
                )?;
            }
            Err(e) => writeln!(out, "{value},,,,,,,,,,,{}", quote(e))?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_grammar() {
        assert_eq!(
            "flow=pan-yang|const:-1".parse::<Axis>().unwrap(),
            Axis::Flow(vec![NonlocalTerm::PanYang, NonlocalTerm::Constant(-1.0)])
        );
        assert_eq!(
            "cos2=0.1, 0.2".parse::<Axis>().unwrap(),
            Axis::Cos(2, vec![0.1, 0.2])
        );
        assert_eq!("sin3=0".parse::<Axis>().unwrap(), Axis::Sin(3, vec![0.0]));
        assert_eq!("scale=2".parse::<Axis>().unwrap(), Axis::Scale(vec![2.0]));
        assert!(matches!("flow=".parse::<Axis>(), Err(AxisError::Empty(_))));
        assert!(matches!("flow".parse::<Axis>(), Err(AxisError::Shape(_))));
        assert!(matches!(
            "cos0=1".parse::<Axis>(),
            Err(AxisError::Parameter(_))
        ));
        assert!(matches!(
            "tan2=1".parse::<Axis>(),
            Err(AxisError::Parameter(_))
        ));
        let bad = "flow=pan-yang|banana"
            .parse::<Axis>()
            .unwrap_err()
            .to_string();
        assert!(bad.contains("banana"), "{bad}");
    }

    #[test]
    fn failed_rows_do_not_stop_the_sweep() {
        let spec = SupportSpectrum::new(1.0, vec![0.0, 0.2], vec![]).unwrap();
        let controls = IntegratorControls {
            t_max: 1.0,
            ..Default::default()
        };
        let rows = sweep(
            &spec,
            &NonlocalTerm::PanYang,
            &controls,
            &Axis::Cos(2, vec![0.1, 0.5]),
        );
        assert!(rows[0].result.is_ok());
        let err = rows[1].result.as_ref().unwrap_err();
        assert!(err.contains("convexity"), "{err}");
        let mut buf = Vec::new();
        write_summary_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().nth(2).unwrap().split(',').nth(1), Some(""));
    }
}
