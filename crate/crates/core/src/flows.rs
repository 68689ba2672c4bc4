//! Nonlocal terms `H` and the self-contained length equation
//! `dL/dt = L − 2πH(L, A(t))` with `A(t) = L²/4π + E(t)`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat::{deviation_energy, deviation_energy_rate, known_scalars, DeviationSpectrum};
use crate::spectrum::SupportSpectrum;

/// One summand `coeff · L^p · A^q` of a user-defined nonlocal term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coeff: f64,
    pub p: f64,
    pub q: f64,
}

/// The nonlocal speed offset `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum NonlocalTerm {
    /// `H = c`.
    Constant(f64),
    /// `H = L/2π`, length preserving.
    PanYang,
    /// `H = 2A/L`.
    LinTsai,
    /// `H = (1/L)∫(1/k)ds`, area preserving. Reads the whole spectrum, not just `(L, A)`.
    MaCheng,
    /// `H = Σ coeff · L^p · A^q`.
    PowerSum(Vec<PowerTerm>),
}

impl NonlocalTerm {
    /// True when `H` depends on more than `(L, A)`.
    pub fn is_extended(&self) -> bool {
        matches!(self, NonlocalTerm::MaCheng)
    }

    /// True when the isoperimetric ratio is known to be non-increasing under this flow.
    pub fn decreases_isoperimetric_ratio(&self) -> bool {
        match self {
            NonlocalTerm::PanYang | NonlocalTerm::LinTsai | NonlocalTerm::MaCheng => true,
            NonlocalTerm::Constant(c) => *c < 0.0,
            NonlocalTerm::PowerSum(_) => false,
        }
    }
}

impl fmt::Display for NonlocalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlocalTerm::Constant(c) => write!(f, "const:{c}"),
            NonlocalTerm::PanYang => f.write_str("pan-yang"),
            NonlocalTerm::LinTsai => f.write_str("lin-tsai"),
            NonlocalTerm::MaCheng => f.write_str("ma-cheng"),
            NonlocalTerm::PowerSum(terms) => {
                f.write_str("powersum:")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{},{},{}", t.coeff, t.p, t.q)?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for NonlocalTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let malformed = |reason: &str| Error::MalformedFlowTerm {
            term: text.to_string(),
            reason: reason.to_string(),
        };
        let number = |x: &str| -> Result<f64> {
            let v: f64 = x
                .trim()
                .parse()
                .map_err(|_| malformed(&format!("`{}` is not a number", x.trim())))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(malformed("values must be finite"))
            }
        };
        match text {
            "pan-yang" => return Ok(NonlocalTerm::PanYang),
            "lin-tsai" => return Ok(NonlocalTerm::LinTsai),
            "ma-cheng" => return Ok(NonlocalTerm::MaCheng),
            _ => {}
        }
        if let Some(c) = text.strip_prefix("const:") {
            return Ok(NonlocalTerm::Constant(number(c)?));
        }
        if let Some(body) = text.strip_prefix("powersum:") {
            let terms = body
                .split(';')
                .map(|chunk| {
                    let parts: Vec<&str> = chunk.split(',').collect();
                    if parts.len() != 3 {
                        return Err(malformed("each power term needs exactly `c,p,q`"));
                    }
                    Ok(PowerTerm {
                        coeff: number(parts[0])?,
                        p: number(parts[1])?,
                        q: number(parts[2])?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(NonlocalTerm::PowerSum(terms));
        }
        Err(Error::UnknownFlowTerm(text.to_string()))
    }
}

impl From<NonlocalTerm> for String {
    fn from(t: NonlocalTerm) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for NonlocalTerm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Curve at time `t` along the flow: the mean of its spectrum is `L/2π` and the
/// deviation is the initial deviation propagated in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub length: f64,
    pub area: f64,
    pub spectrum: SupportSpectrum,
}

impl FlowState {
    pub fn new(spec0: &SupportSpectrum, length: f64, t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidLength(length));
        }
        let dev = DeviationSpectrum::from_spectrum(spec0).propagate_unchecked(t);
        let area = PI * (length / TAU).powi(2) + deviation_energy(&dev);
        Ok(FlowState {
            t,
            length,
            area,
            spectrum: dev.with_mean(length / TAU),
        })
    }

    /// State at `t = 0`.
    pub fn initial(spec0: &SupportSpectrum) -> Result<Self> {
        FlowState::new(spec0, spec0.length(), 0.0)
    }

    pub fn deviation(&self) -> DeviationSpectrum {
        DeviationSpectrum::from_spectrum(&self.spectrum)
    }
}

/// `A(t) = L²/4π + E1(t) − (L(0)²/4π) e^{2t}`, evaluated through the
/// cancellation-free form `π (L/2π)² + E(t)`.
pub fn area_along_flow(spec0: &SupportSpectrum, length: f64, t: f64) -> Result<f64> {
    let e = known_scalars(spec0, t)?.e;
    Ok(PI * (length / TAU).powi(2) + e)
}

fn power(base: f64, exponent: f64) -> Option<f64> {
    if exponent == 0.0 {
        Some(1.0)
    } else if base > 0.0 || exponent.fract() == 0.0 {
        Some(base.powf(exponent))
    } else {
        None
    }
}

/// Value of `H` at a flow state.
pub fn evaluate_h(term: &NonlocalTerm, state: &FlowState) -> Result<f64> {
    let (l, a) = (state.length, state.area);
    let outside = || Error::OutsideDomain { length: l, area: a };
    let h = match term {
        NonlocalTerm::Constant(c) => *c,
        NonlocalTerm::PanYang => l / TAU,
        NonlocalTerm::LinTsai => 2.0 * a / l,
        NonlocalTerm::MaCheng => state.spectrum.total_inverse_curvature() / l,
        NonlocalTerm::PowerSum(terms) => {
            let mut sum = 0.0;
            for t in terms {
                let lp = power(l, t.p).ok_or_else(outside)?;
                let aq = power(a, t.q).ok_or_else(outside)?;
                sum += t.coeff * lp * aq;
            }
            sum
        }
    };
    if h.is_finite() {
        Ok(h)
    } else {
        Err(outside())
    }
}

/// `dL/dt = L − 2πH`.
pub fn length_rate(term: &NonlocalTerm, state: &FlowState) -> Result<f64> {
    match term {
        // L − 2π·(L/2π) cancels identically.
        NonlocalTerm::PanYang => Ok(0.0),
        // L − (2π/L)(L²/2π + π Σ (n²−1)² d_n²) = −(2π²/L) Σ (n²−1)² d_n²
        NonlocalTerm::MaCheng => {
            let s = state.spectrum.weighted_energy(|k| (k * k - 1.0).powi(2));
            Ok(-2.0 * PI * PI * s / state.length)
        }
        _ => Ok(state.length - TAU * evaluate_h(term, state)?),
    }
}

/// `dA/dt = (L/2π) dL/dt + dE/dt`.
pub fn area_rate(term: &NonlocalTerm, state: &FlowState) -> Result<f64> {
    let rate = length_rate(term, state)?;
    Ok(state.length / TAU * rate + deviation_energy_rate(&state.deviation()))
}

/// `d(L² − 4πA)/dt` assembled from the length and area rates under `term`.
pub fn deficit_rate(term: &NonlocalTerm, state: &FlowState) -> Result<f64> {
    let rate = length_rate(term, state)?;
    Ok(2.0 * state.length * rate - 4.0 * PI * area_rate(term, state)?)
}
