//! Exact simulation of linear nonlocal curvature flows of convex plane curves.
//!
//! A convex curve is stored as the Fourier spectrum of its support function
//! [`SupportSpectrum`]. Under a flow with normal speed `H − 1/k`, the zero-mean
//! part of the support function evolves by a linear heat equation that does
//! not see `H`, so it is known in closed form for all time. What is left is a
//! scalar ODE for the length `L(t)`, which [`integrate`] solves with adaptive
//! Runge-Kutta stepping while watching for curvature singularities and for
//! the length or area leaving `(0, ∞)`.
//!
//! ```
//! use curveflow::{integrate, IntegratorControls, NonlocalTerm, Outcome, SupportSpectrum};
//!
//! let curve = SupportSpectrum::new(1.0, vec![0.0, 0.2], vec![]).unwrap();
//! let controls = IntegratorControls { t_max: 5.0, ..Default::default() };
//! let traj = integrate(&curve, &NonlocalTerm::PanYang, &controls).unwrap();
//! assert!(matches!(traj.outcome, Outcome::ConvergesToCircle { .. }));
//! ```

pub mod diagnostics;
pub mod error;
pub mod export;
pub mod flows;
pub mod heat;
pub mod integrator;
pub mod spectrum;

pub use diagnostics::{
    convergence_residual, gage, go1, go2, ipd_decay_ratio, ipr_monotone, limit_circle, summarize,
    DecayRatio, GeometricSummary, Go2Report, InequalityReport,
};
pub use error::{Error, Result};
pub use flows::{area_along_flow, evaluate_h, length_rate, FlowState, NonlocalTerm, PowerTerm};
pub use heat::{e1, kernel_oracle, known_scalars, DeviationSpectrum, KernelOracle};
pub use integrator::{
    classify, detect_singularity, integrate, rescaled_support, Event, IntegratorControls,
    LimitLength, Outcome, Trajectory,
};
pub use spectrum::{
    project_from_samples, spectrum_from_polygon, uniform_grid, CurveSamples, SupportSpectrum,
};
