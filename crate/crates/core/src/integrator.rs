//! Adaptive integration of the length equation with event detection, and
//! classification of how a run ends.
//!
//! Only the scalar `L(t)` is integrated. Everything else about the curve at
//! time `t` (area, spectrum, curvature) is reconstituted in closed form from
//! the initial spectrum, so the integrator never touches a PDE.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{area_along_flow, length_rate, FlowState, NonlocalTerm};
use crate::heat::mode_factor;
use crate::spectrum::{uniform_grid, SupportSpectrum};

/// Steps shorter than this without an event end the run as undetermined.
pub const MIN_STEP: f64 = 1e-14;

/// Events are bracketed to this width in time.
pub const EVENT_TIME_TOL: f64 = 1e-10;

/// Relative growth rate `|L'/L|` above which a run that reached its horizon is
/// reported as still diverging rather than settled.
pub const SETTLED_RATE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    pub length_blowup: f64,
    pub length_vanish: f64,
    pub area_vanish: f64,
    pub singularity_eps: f64,
    pub sample_interval: f64,
}

impl Default for IntegratorControls {
    fn default() -> Self {
        IntegratorControls {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            t_max: 50.0,
            length_blowup: 1e12,
            length_vanish: 1e-12,
            area_vanish: 1e-12,
            singularity_eps: 1e-9,
            sample_interval: 0.05,
        }
    }
}

impl IntegratorControls {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("length_blowup", self.length_blowup),
            ("length_vanish", self.length_vanish),
            ("area_vanish", self.area_vanish),
            ("singularity_eps", self.singularity_eps),
            ("sample_interval", self.sample_interval),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidControls(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.rel_tol >= 1.0 {
            return Err(Error::InvalidControls("rel_tol must be below 1".into()));
        }
        if self.length_vanish >= self.length_blowup {
            return Err(Error::InvalidControls(
                "length_vanish must be below length_blowup".into(),
            ));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    ReachedHorizon {
        t: f64,
    },
    /// Radius of curvature dropped to `singularity_eps` at normal angle `theta`.
    Singularity {
        t: f64,
        theta: f64,
    },
    LengthBlowup {
        t: f64,
    },
    LengthVanish {
        t: f64,
    },
    AreaVanish {
        t: f64,
    },
    HDomainExit {
        t: f64,
        reason: String,
    },
    StepCollapse {
        t: f64,
    },
}

impl Event {
    pub fn time(&self) -> f64 {
        match self {
            Event::ReachedHorizon { t }
            | Event::Singularity { t, .. }
            | Event::LengthBlowup { t }
            | Event::LengthVanish { t }
            | Event::AreaVanish { t }
            | Event::HDomainExit { t, .. }
            | Event::StepCollapse { t } => *t,
        }
    }
}

/// Limiting length of a run that reached its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum LimitLength {
    Finite(f64),
    Infinite,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    /// Smooth for all time; the deviation tends to the first harmonic, so the
    /// curve approaches a circle centred at `center`.
    ConvergesToCircle {
        center: [f64; 2],
        limit_length: LimitLength,
    },
    CurvatureSingularity {
        t: f64,
        theta: f64,
    },
    /// `L → ∞` in finite time; the rescaled curve `2πγ/L` tends to the unit circle.
    LengthBlowupRescaledCircle {
        t_max: f64,
    },
    /// `L → 0` with no singularity detected first. For a non-circle this
    /// contradicts the theory and `theorem_violation` is set.
    LengthVanishesSingularityForced {
        t_max: f64,
        theorem_violation: bool,
    },
    /// `A → 0` with `L → ell > 0`, forcing the maximal curvature to blow up.
    AreaVanishesCurvatureBlowup {
        t_max: f64,
        ell: f64,
    },
    Undetermined {
        reason: String,
    },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::ConvergesToCircle {
                center,
                limit_length,
            } => {
                write!(f, "ConvergesToCircle center=({},{})", center[0], center[1])?;
                match limit_length {
                    LimitLength::Finite(l) => write!(f, " limit_L={l}"),
                    LimitLength::Infinite => write!(f, " limit_L=inf"),
                    LimitLength::Zero => write!(f, " limit_L=0"),
                }
            }
            Outcome::CurvatureSingularity { t, theta } => {
                write!(f, "CurvatureSingularity t*≈{t:.5} θ*≈{theta:.5}")
            }
            Outcome::LengthBlowupRescaledCircle { t_max } => {
                write!(f, "LengthBlowupRescaledCircle T_max≈{t_max:.6}")
            }
            Outcome::LengthVanishesSingularityForced {
                t_max,
                theorem_violation,
            } => {
                write!(f, "LengthVanishesSingularityForced T_max≈{t_max:.6}")?;
                if *theorem_violation {
                    f.write_str(" (no singularity detected before L vanished on a non-circle)")?;
                }
                Ok(())
            }
            Outcome::AreaVanishesCurvatureBlowup { t_max, ell } => {
                write!(f, "AreaVanishesCurvatureBlowup T_max≈{t_max:.6} ell={ell}")
            }
            Outcome::Undetermined { reason } => write!(f, "Undetermined ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub term: NonlocalTerm,
    pub states: Vec<FlowState>,
    pub event: Event,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn initial(&self) -> &FlowState {
        &self.states[0]
    }

    pub fn last(&self) -> &FlowState {
        self.states
            .last()
            .expect("trajectory has at least the initial state")
    }
}

/// Radius of curvature of the evolving curve on a fixed θ-grid, as a function
/// of `(L, t)`. Mode `n` of the precomputed table is scaled by `e^{(1−n²)t}`.
#[derive(Debug, Clone)]
pub struct RadiusProbe {
    thetas: Vec<f64>,
    modes: Vec<(usize, Vec<f64>)>,
}

impl RadiusProbe {
    pub fn new(spec0: &SupportSpectrum, grid_size: usize) -> Self {
        let thetas = uniform_grid(grid_size.max(4 * spec0.truncation()));
        let modes = spec0
            .modes()
            .filter(|&(n, a, b)| n >= 2 && (a != 0.0 || b != 0.0))
            .map(|(n, a, b)| {
                let k = n as f64;
                let row = thetas
                    .iter()
                    .map(|th| {
                        let (s, c) = (k * th).sin_cos();
                        (1.0 - k * k) * (a * c + b * s)
                    })
                    .collect();
                (n, row)
            })
            .collect();
        RadiusProbe { thetas, modes }
    }

    /// Grid minimum of `u_θθ + u` and the smallest angle attaining it.
    pub fn min_radius(&self, length: f64, t: f64) -> (f64, f64) {
        let base = length / TAU;
        let factors: Vec<f64> = self.modes.iter().map(|(n, _)| mode_factor(*n, t)).collect();
        let mut best = (f64::INFINITY, 0.0);
        for (j, &th) in self.thetas.iter().enumerate() {
            let r = self
                .modes
                .iter()
                .zip(&factors)
                .fold(base, |acc, ((_, row), f)| acc + f * row[j]);
            if r < best.0 {
                best = (r, th);
            }
        }
        best
    }

    /// Grid maximum of `u_θθ + u`.
    pub fn max_radius(&self, length: f64, t: f64) -> f64 {
        let base = length / TAU;
        let factors: Vec<f64> = self.modes.iter().map(|(n, _)| mode_factor(*n, t)).collect();
        (0..self.thetas.len())
            .map(|j| {
                self.modes
                    .iter()
                    .zip(&factors)
                    .fold(base, |acc, ((_, row), f)| acc + f * row[j])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// The length equation for one initial curve and one nonlocal term.
struct LengthOde<'a> {
    spec0: &'a SupportSpectrum,
    term: &'a NonlocalTerm,
}

impl LengthOde<'_> {
    fn rate(&self, t: f64, length: f64) -> Result<f64> {
        let state = FlowState::new(self.spec0, length, t)?;
        let r = length_rate(self.term, &state)?;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::OutsideDomain {
                length,
                area: state.area,
            })
        }
    }

    /// One Dormand-Prince step: fifth-order value and embedded error estimate.
    fn step(&self, t: f64, y: f64, h: f64) -> Result<(f64, f64)> {
        let mut k = [0.0; 7];
        for i in 0..7 {
            let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
            k[i] = self.rate(t + C[i] * h, yi)?;
        }
        let y5 = y + h * (0..7).map(|i| B5[i] * k[i]).sum::<f64>();
        let err = h * (0..7).map(|i| (B5[i] - B4[i]) * k[i]).sum::<f64>();
        if y5.is_finite() {
            Ok((y5, err))
        } else {
            Err(Error::InvalidLength(y5))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Watch {
    Blowup,
    Vanish,
    Area,
    Singularity,
}

/// Solves the flow from `spec0` under `term`.
pub fn integrate(
    spec0: &SupportSpectrum,
    term: &NonlocalTerm,
    controls: &IntegratorControls,
) -> Result<Trajectory> {
    controls.validate()?;
    spec0.ensure_convex()?;
    let ode = LengthOde { spec0, term };
    let probe = RadiusProbe::new(spec0, spec0.validation_grid_size());
    let area_at = |l: f64, t: f64| area_along_flow(spec0, l, t).unwrap_or(f64::NAN);
    let watch_value = |w: Watch, l: f64, t: f64| match w {
        Watch::Blowup => controls.length_blowup - l,
        Watch::Vanish => l - controls.length_vanish,
        Watch::Area => area_at(l, t) - controls.area_vanish,
        Watch::Singularity => probe.min_radius(l, t).0 - controls.singularity_eps,
    };
    let watches = [
        Watch::Blowup,
        Watch::Vanish,
        Watch::Area,
        Watch::Singularity,
    ];

    let mut states = vec![FlowState::initial(spec0)?];
    let mut t = 0.0;
    let mut length = spec0.length();
    let mut h = controls.sample_interval.min(controls.t_max) * 0.1;
    let mut sample_index = 1usize;

    let event = loop {
        let target = (sample_index as f64 * controls.sample_interval).min(controls.t_max);
        let h_try = h.min(target - t);
        let (y, err) = match ode.step(t, length, h_try) {
            Ok(v) => v,
            Err(e) => {
                h = h_try * 0.25;
                if h < MIN_STEP {
                    break match e {
                        Error::OutsideDomain { .. } => Event::HDomainExit {
                            t,
                            reason: e.to_string(),
                        },
                        _ => Event::StepCollapse { t },
                    };
                }
                continue;
            }
        };
        let scale = controls.abs_tol + controls.rel_tol * length.abs().max(y.abs());
        let err_norm = err.abs() / scale;
        let growth = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err_norm > 1.0 {
            h = h_try * growth;
            if h < MIN_STEP {
                break Event::StepCollapse { t };
            }
            continue;
        }
        let t_new = if target - (t + h_try) <= 1e-12 * target.max(1.0) {
            target
        } else {
            t + h_try
        };

        // Earliest threshold crossing inside (t, t_new].
        let mut hit: Option<(f64, f64, Watch)> = None;
        for &w in &watches {
            if watch_value(w, y, t_new) > 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (t, t_new);
            while hi - lo > EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                let fired = match ode.step(t, length, mid - t) {
                    Ok((l_mid, _)) => {
                        let v = watch_value(w, l_mid, mid);
                        v.is_nan() || v <= 0.0
                    }
                    Err(_) => true,
                };
                if fired {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if hit.is_none_or(|(best, _, _)| hi < best) {
                hit = Some((hi, lo, w));
            }
        }
        if let Some((t_event, t_before, w)) = hit {
            if t_before > t {
                if let Ok((l_before, _)) = ode.step(t, length, t_before - t) {
                    if let Ok(s) = FlowState::new(spec0, l_before, t_before) {
                        states.push(s);
                    }
                }
            }
            let l_event = ode.step(t, length, t_event - t).map(|v| v.0).unwrap_or(y);
            break match w {
                Watch::Blowup => Event::LengthBlowup { t: t_event },
                Watch::Vanish => Event::LengthVanish { t: t_event },
                Watch::Area => Event::AreaVanish { t: t_event },
                Watch::Singularity => Event::Singularity {
                    t: t_event,
                    theta: probe.min_radius(l_event, t_event).1,
                },
            };
        }

        t = t_new;
        length = y;
        h = if h_try < h {
            h.max(h_try * growth)
        } else {
            h_try * growth
        };
        if t == target {
            states.push(FlowState::new(spec0, length, t)?);
            sample_index += 1;
            if t >= controls.t_max {
                break Event::ReachedHorizon { t };
            }
        }
        if let Err(e) = ode.rate(t, length) {
            break Event::HDomainExit {
                t,
                reason: e.to_string(),
            };
        }
    };

    let mut traj = Trajectory {
        term: term.clone(),
        states,
        event,
        outcome: Outcome::Undetermined {
            reason: String::new(),
        },
    };
    traj.outcome = classify(&traj);
    Ok(traj)
}

/// First time on `[0, horizon]` at which the grid minimum of the radius of
/// curvature falls to `singularity_eps`, for a given length path. The path
/// is scanned at `sample_interval / 10` and crossings are refined by bisection.
pub fn detect_singularity(
    spec0: &SupportSpectrum,
    length_at: impl Fn(f64) -> f64,
    horizon: f64,
    controls: &IntegratorControls,
) -> Option<(f64, f64)> {
    let probe = RadiusProbe::new(spec0, spec0.validation_grid_size());
    let g = |t: f64| probe.min_radius(length_at(t), t).0 - controls.singularity_eps;
    if g(0.0) <= 0.0 {
        return Some((0.0, probe.min_radius(length_at(0.0), 0.0).1));
    }
    let dt = controls.sample_interval / 10.0;
    let steps = (horizon / dt).ceil() as usize;
    let mut prev = 0.0;
    for i in 1..=steps {
        let cur = (i as f64 * dt).min(horizon);
        if g(cur) <= 0.0 {
            let (mut lo, mut hi) = (prev, cur);
            while hi - lo > EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                if g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some((hi, probe.min_radius(length_at(hi), hi).1));
        }
        prev = cur;
    }
    None
}

/// Maps the termination event of a run onto the possible long-time behaviours.
pub fn classify(traj: &Trajectory) -> Outcome {
    let initial = traj.initial();
    let center = [initial.spectrum.mode(1).0, initial.spectrum.mode(1).1];
    match &traj.event {
        Event::ReachedHorizon { .. } => {
            let last = traj.last();
            let limit_length = match length_rate(&traj.term, last) {
                Ok(r) if r / last.length > SETTLED_RATE => LimitLength::Infinite,
                Ok(r) if r / last.length < -SETTLED_RATE => LimitLength::Zero,
                Ok(_) => LimitLength::Finite(last.length),
                Err(e) => {
                    return Outcome::Undetermined {
                        reason: e.to_string(),
                    }
                }
            };
            Outcome::ConvergesToCircle {
                center,
                limit_length,
            }
        }
        Event::Singularity { t, theta } => Outcome::CurvatureSingularity {
            t: *t,
            theta: *theta,
        },
        Event::LengthBlowup { t } => Outcome::LengthBlowupRescaledCircle { t_max: *t },
        Event::LengthVanish { t } => Outcome::LengthVanishesSingularityForced {
            t_max: *t,
            theorem_violation: initial.spectrum.isoperimetric_deficit() > 0.0,
        },
        Event::AreaVanish { t } => Outcome::AreaVanishesCurvatureBlowup {
            t_max: *t,
            ell: traj.last().length,
        },
        Event::HDomainExit { t, reason } => Outcome::Undetermined {
            reason: format!("nonlocal term left its domain at t={t}: {reason}"),
        },
        Event::StepCollapse { t } => Outcome::Undetermined {
            reason: format!("step size collapsed below {MIN_STEP:e} at t={t}"),
        },
    }
}

/// Support spectrum of the rescaled curve `2πγ/L`, whose mean is 1.
pub fn rescaled_support(state: &FlowState) -> Result<SupportSpectrum> {
    if !(state.length > 0.0 && state.length.is_finite()) {
        return Err(Error::InvalidLength(state.length));
    }
    Ok(state.spectrum.scaled(TAU / state.length))
}
