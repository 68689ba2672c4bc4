//! Inequality and limit checks on flow states and whole trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flows::{FlowState, NonlocalTerm};
use crate::heat::DeviationSpectrum;
use crate::integrator::Trajectory;
use crate::spectrum::SupportSpectrum;

/// Relative slack allowed before an exact inequality counts as violated.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Slack allowed between consecutive samples when checking monotonicity.
pub const MONOTONE_TOL: f64 = 1e-10;

/// Tolerance on higher harmonics when deciding the refined Green-Osher equality case.
pub const EQUALITY_CASE_TOL: f64 = 1e-10;

/// Geometric scalars of one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub length: f64,
    pub area: f64,
    pub ipd: f64,
    pub ipr: f64,
    /// `None` when the spectrum is not strictly convex.
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub inv_curv_integral: f64,
    pub sq_curv_integral: Option<f64>,
}

pub fn summarize_spectrum(spec: &SupportSpectrum) -> GeometricSummary {
    let grid = spec.validation_grid_size();
    let length = spec.length();
    let area = spec.area();
    let (r_min, _) = spec.min_radius(grid);
    let convex = r_min > crate::spectrum::CONVEXITY_THRESHOLD;
    let (k_min, k_max) = if convex {
        (Some(1.0 / spec.max_radius(grid).0), Some(1.0 / r_min))
    } else {
        (None, None)
    };
    GeometricSummary {
        length,
        area,
        ipd: spec.isoperimetric_deficit(),
        ipr: length * length / (4.0 * PI * area),
        k_min,
        k_max,
        inv_curv_integral: spec.total_inverse_curvature(),
        sq_curv_integral: spec.sq_curvature_integral(grid).ok(),
    }
}

pub fn summarize(state: &FlowState) -> GeometricSummary {
    summarize_spectrum(&state.spectrum)
}

/// One evaluated inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_slack(name, lhs, rhs, lhs - rhs)
    }

    /// Report whose slack comes from an independent, cancellation-free formula.
    pub fn with_slack(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let tol = INEQUALITY_TOL * 1f64.max(lhs.abs()).max(rhs.abs());
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            satisfied: slack >= -tol,
        }
    }
}

/// `L² ≥ 4πA`.
pub fn isoperimetric(spec: &SupportSpectrum) -> InequalityReport {
    let l = spec.length();
    InequalityReport::new("isoperimetric", l * l, 4.0 * PI * spec.area())
}

/// `∫(1/k)ds ≥ (L² − 2πA)/π`.
pub fn go1(spec: &SupportSpectrum) -> InequalityReport {
    let l = spec.length();
    InequalityReport::new(
        "go1",
        spec.total_inverse_curvature(),
        (l * l - 2.0 * PI * spec.area()) / PI,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Go2Report {
    pub report: InequalityReport,
    /// Support function has no harmonics above order 2.
    pub equality_case: bool,
}

/// `∫(1/k)ds ≥ (2/π)(L² − 4πA) + 2A`, with equality exactly when all
/// harmonics of order ≥ 3 vanish.
pub fn go2(spec: &SupportSpectrum) -> Go2Report {
    let area = spec.area();
    let report = InequalityReport::new(
        "go2",
        spec.total_inverse_curvature(),
        2.0 / PI * spec.isoperimetric_deficit() + 2.0 * area,
    );
    let equality_case = spec
        .modes()
        .filter(|&(n, _, _)| n >= 3)
        .all(|(_, a, b)| a.abs() <= EQUALITY_CASE_TOL && b.abs() <= EQUALITY_CASE_TOL);
    Go2Report {
        report,
        equality_case,
    }
}

/// `π Σ_{n≥3} (n²−1)(n²−4)(a_n² + b_n²)`, the exact refined Green-Osher slack.
pub fn go2_spectral_slack(spec: &SupportSpectrum) -> f64 {
    PI * spec.weighted_energy(|k| (k * k - 1.0) * (k * k - 4.0))
}

/// Gage: `∫k²ds ≥ πL/A` for convex curves.
pub fn gage(spec: &SupportSpectrum) -> Result<InequalityReport> {
    let lhs = spec.sq_curvature_integral(spec.validation_grid_size().max(2048))?;
    Ok(InequalityReport::new(
        "gage",
        lhs,
        PI * spec.length() / spec.area(),
    ))
}

/// The per-state inequality suite.
pub fn inequality_suite(spec: &SupportSpectrum) -> Vec<InequalityReport> {
    let mut out = vec![isoperimetric(spec), go1(spec), go2(spec).report];
    if let Ok(g) = gage(spec) {
        out.push(g);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum DecayRatio {
    /// `max_t IPD(t) / (IPD(0) e^{−2t})`; at most 1 for every valid run.
    Ratio(f64),
    /// The initial curve is a circle and the deficit stays zero.
    ExactZero,
}

pub fn ipd_decay_ratio(traj: &Trajectory) -> DecayRatio {
    let ipd0 = traj.initial().spectrum.isoperimetric_deficit();
    if ipd0 == 0.0 {
        return DecayRatio::ExactZero;
    }
    let max = traj
        .states
        .iter()
        .map(|s| s.spectrum.isoperimetric_deficit() / (ipd0 * (-2.0 * s.t).exp()))
        .fold(f64::NEG_INFINITY, f64::max);
    DecayRatio::Ratio(max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub non_increasing: bool,
    /// The flow term belongs to the class for which the ratio must decrease.
    pub guaranteed: bool,
    pub worst_increase: f64,
}

/// Whether the sampled isoperimetric ratio never increases by more than
/// [`MONOTONE_TOL`].
pub fn ipr_monotone(traj: &Trajectory, term: &NonlocalTerm) -> Monotonicity {
    let iprs: Vec<f64> = traj
        .states
        .iter()
        .map(|s| s.length * s.length / (4.0 * PI * s.area))
        .collect();
    let worst_increase = iprs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Monotonicity {
        non_increasing: iprs.len() < 2 || worst_increase <= MONOTONE_TOL,
        guaranteed: term.decreases_isoperimetric_ratio(),
        worst_increase,
    }
}

/// Centre `(a1, b1)` of the limiting circle.
pub fn limit_circle(spec0: &SupportSpectrum) -> [f64; 2] {
    let (a1, b1) = spec0.mode(1);
    [a1, b1]
}

/// Grid sup-norm of `(u − L/2π) − (a1 cosθ + b1 sinθ)` at a state.
pub fn convergence_residual(state: &FlowState, spec0: &SupportSpectrum) -> f64 {
    let mut rest = DeviationSpectrum::from_spectrum(&state.spectrum);
    let (a1, b1) = spec0.mode(1);
    rest.cos[0] -= a1;
    rest.sin[0] -= b1;
    rest.sup_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn ellipse_ish() -> SupportSpectrum {
        SupportSpectrum::new(1.0, vec![0.0, 0.2], vec![]).unwrap()
    }

    #[test]
    fn summaries() {
        let c = summarize_spectrum(&SupportSpectrum::circle(1.0));
        assert_abs_diff_eq!(c.length, TAU);
        assert_abs_diff_eq!(c.area, PI);
        assert_eq!(c.ipd, 0.0);
        assert_abs_diff_eq!(c.ipr, 1.0, epsilon = 1e-15);
        assert_eq!((c.k_min, c.k_max), (Some(1.0), Some(1.0)));

        let e = summarize_spectrum(&ellipse_ish());
        assert_abs_diff_eq!(e.ipd, 0.24 * PI * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(e.ipd, e.length.powi(2) - 4.0 * PI * e.area, epsilon = 1e-12);
        assert_abs_diff_eq!(e.ipr, 1.0 / 0.94, epsilon = 1e-14);
        assert_abs_diff_eq!(e.k_min.unwrap(), 0.625, epsilon = 1e-14);
        assert_abs_diff_eq!(e.k_max.unwrap(), 2.5, epsilon = 1e-14);

        let shifted = summarize_spectrum(&ellipse_ish().with_cos(1, 0.3));
        assert_abs_diff_eq!(shifted.area, e.area, epsilon = 1e-15);
        assert_abs_diff_eq!(shifted.k_max.unwrap(), e.k_max.unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            shifted.inv_curv_integral,
            e.inv_curv_integral,
            epsilon = 1e-14
        );

        let bad = summarize_spectrum(&SupportSpectrum::new(1.0, vec![0.0, 0.5], vec![]).unwrap());
        assert_eq!(bad.k_min, None);
        assert_eq!(bad.sq_curv_integral, None);
        assert_abs_diff_eq!(bad.length, TAU);
    }

    #[test]
    fn green_osher() {
        let c = SupportSpectrum::circle(1.0);
        assert_abs_diff_eq!(go1(&c).slack, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(go2(&c).report.slack, 0.0, epsilon = 1e-14);

        let e = ellipse_ish();
        assert_abs_diff_eq!(go1(&e).slack, 0.24 * PI, epsilon = 1e-13);
        let g = go2(&e);
        assert_abs_diff_eq!(g.report.slack, 0.0, epsilon = 1e-13);
        assert!(g.equality_case && g.report.satisfied);

        let third = SupportSpectrum::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap();
        // (n²−1)(n²−2) = 56 at n = 3
        assert_abs_diff_eq!(go1(&third).slack, 0.56 * PI, epsilon = 1e-13);
        let g = go2(&third);
        assert_abs_diff_eq!(g.report.slack, 0.4 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(go2_spectral_slack(&third), 0.4 * PI, epsilon = 1e-15);
        assert!(!g.equality_case);
        // GO2 improves GO1 by (L² − 4πA)/π.
        let diff = go1(&third).slack - g.report.slack;
        assert_abs_diff_eq!(diff, third.isoperimetric_deficit() / PI, epsilon = 1e-13);
    }

    #[test]
    fn gage_inequality() {
        assert_abs_diff_eq!(
            gage(&SupportSpectrum::circle(1.0)).unwrap().slack,
            0.0,
            epsilon = 1e-12
        );
        // ∫ dθ/(1 − 0.6 cos2θ) = 2π/0.8 against π·2π/(0.94π)
        let g = gage(&ellipse_ish()).unwrap();
        assert_abs_diff_eq!(g.slack, TAU / 0.8 - TAU / 0.94, epsilon = 1e-10);
        let wide = SupportSpectrum::new(1.0, vec![0.0, 0.3], vec![]).unwrap();
        let g2 = gage(&wide).unwrap();
        assert_abs_diff_eq!(g2.slack, TAU / 0.19f64.sqrt() - TAU / 0.865, epsilon = 1e-9);
        assert!(g2.slack > g.slack);
        assert!(gage(&SupportSpectrum::new(1.0, vec![0.0, 0.5], vec![]).unwrap()).is_err());
    }

    #[test]
    fn tolerance_is_relative() {
        assert!(InequalityReport::new("x", 1e6, 1e6 + 1e-4).satisfied);
        assert!(!InequalityReport::new("x", 1.0, 1.0 + 1e-8).satisfied);
    }

    #[test]
    fn limit_centre_and_residual() {
        assert_eq!(limit_circle(&SupportSpectrum::circle(1.0)), [0.0, 0.0]);
        let s0 = ellipse_ish().with_cos(1, 0.3);
        assert_eq!(limit_circle(&s0), [0.3, 0.0]);
        assert_eq!(
            limit_circle(&SupportSpectrum::circle(1.0).with_sin(1, -0.1)),
            [0.0, -0.1]
        );

        let at0 = FlowState::initial(&s0).unwrap();
        assert_abs_diff_eq!(convergence_residual(&at0, &s0), 0.2, epsilon = 1e-15);
        let at1 = FlowState::new(&s0, TAU, 1.0).unwrap();
        assert_abs_diff_eq!(
            convergence_residual(&at1, &s0),
            0.2 * (-3f64).exp(),
            epsilon = 1e-16
        );
        let c = SupportSpectrum::circle(1.0);
        assert_eq!(
            convergence_residual(&FlowState::new(&c, 3.0, 2.0).unwrap(), &c),
            0.0
        );
    }
}
