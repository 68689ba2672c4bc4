//! Closed-form propagation of the support-function deviation `u − L/2π`.
//!
//! The deviation solves `v_t = v_θθ + v` with zero mean, independently of the
//! nonlocal term, so mode `n` is simply multiplied by `e^{(1−n²)t}`. The
//! Gaussian-kernel form of the same solution is kept as [`KernelOracle`], a
//! quadrature path that shares no code with the modal one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{uniform_grid, SupportSpectrum, MIN_VALIDATION_GRID};

/// Half-width of the kernel quadrature window, in units of `√t`.
pub const ORACLE_WINDOW: f64 = 16.0;

/// Simpson panels per unit `√t` of window width.
pub const ORACLE_PANELS_PER_ROOT_T: usize = 64;

/// Trapezoid points used by the oracle to compute the initial mean `L(0)/2π`.
pub const ORACLE_MEAN_POINTS: usize = 4096;

/// Growth factor `e^{(1−n²)t}` of mode `n`.
pub fn mode_factor(n: usize, t: f64) -> f64 {
    let k = n as f64;
    ((1.0 - k * k) * t).exp()
}

/// Zero-mean part of a support spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSpectrum {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl DeviationSpectrum {
    pub fn zero(truncation: usize) -> Self {
        DeviationSpectrum {
            cos: vec![0.0; truncation],
            sin: vec![0.0; truncation],
        }
    }

    pub fn from_spectrum(spec: &SupportSpectrum) -> Self {
        DeviationSpectrum {
            cos: spec.cos().to_vec(),
            sin: spec.sin().to_vec(),
        }
    }

    pub fn truncation(&self) -> usize {
        self.cos.len()
    }

    /// Support spectrum with this deviation around the given mean.
    pub fn with_mean(&self, mean: f64) -> SupportSpectrum {
        SupportSpectrum::with_truncation(
            mean,
            self.cos.clone(),
            self.sin.clone(),
            self.truncation().max(2),
        )
        .expect("deviation coefficients are finite")
    }

    /// Exact solution at time `t ≥ 0`.
    pub fn propagate(&self, t: f64) -> Result<DeviationSpectrum> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.propagate_unchecked(t))
    }

    pub(crate) fn propagate_unchecked(&self, t: f64) -> DeviationSpectrum {
        let scale = |(i, c): (usize, &f64)| c * mode_factor(i + 1, t);
        DeviationSpectrum {
            cos: self.cos.iter().enumerate().map(scale).collect(),
            sin: self.sin.iter().enumerate().map(scale).collect(),
        }
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| {
                let x = (i + 1) as f64 * theta;
                a * x.cos() + b * x.sin()
            })
            .sum()
    }

    /// `m`-th θ-derivative at `theta`.
    pub fn derivative(&self, theta: f64, order: u32) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                let x = k * theta + order as f64 * PI / 2.0;
                k.powi(order as i32) * (a * x.cos() + b * x.sin())
            })
            .sum()
    }

    pub fn grid_size(&self) -> usize {
        (4 * self.truncation()).max(MIN_VALIDATION_GRID)
    }

    /// Maximum of `|v|` over the default grid.
    pub fn sup_norm(&self) -> f64 {
        self.derivative_sup_norm(0)
    }

    /// Maximum of `|∂^m v/∂θ^m|` over the default grid.
    pub fn derivative_sup_norm(&self, order: u32) -> f64 {
        uniform_grid(self.grid_size())
            .into_iter()
            .map(|th| self.derivative(th, order).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ (|a_n| + |b_n|)`, the constant used to bound `|u − L/2π| ≤ C e^t`.
    pub fn l1_coefficients(&self) -> f64 {
        self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum()
    }
}

/// Grid sup-norm of the initial deviation propagated to time `t`.
pub fn deviation_sup_norm(dev0: &DeviationSpectrum, t: f64) -> Result<f64> {
    Ok(dev0.propagate(t)?.sup_norm())
}

/// `E1(t) = π a0² e^{2t} + (π/2) Σ (1−n²) e^{2(1−n²)t} (a_n² + b_n²)`.
pub fn e1(spec0: &SupportSpectrum, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let a0 = spec0.mean();
    let tail: f64 = spec0
        .modes()
        .map(|(n, a, b)| {
            let k = n as f64;
            (1.0 - k * k) * mode_factor(n, t).powi(2) * (a * a + b * b)
        })
        .sum();
    Ok(PI * a0 * a0 * (2.0 * t).exp() + 0.5 * PI * tail)
}

/// The two time functions entering the length equation. `d` is identically
/// zero because the deviation has zero mean; `e = −(L² − 4πA)/4π ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownScalars {
    pub d: f64,
    pub e: f64,
}

pub fn known_scalars(spec0: &SupportSpectrum, t: f64) -> Result<KnownScalars> {
    let dev = DeviationSpectrum::from_spectrum(spec0).propagate(t)?;
    Ok(KnownScalars {
        d: 0.0,
        e: deviation_energy(&dev),
    })
}

/// `E = ½∫ B (B_θθ + B) dθ = −(π/2) Σ (n²−1)(a_n² + b_n²)` for a deviation `B`.
pub fn deviation_energy(dev: &DeviationSpectrum) -> f64 {
    -0.5 * PI * weighted(dev, |k| k * k - 1.0)
}

/// `dE/dt = π Σ (n²−1)² (a_n² + b_n²)` evaluated on the propagated deviation.
pub fn deviation_energy_rate(dev: &DeviationSpectrum) -> f64 {
    PI * weighted(dev, |k| (k * k - 1.0).powi(2))
}

fn weighted(dev: &DeviationSpectrum, w: impl Fn(f64) -> f64) -> f64 {
    dev.cos
        .iter()
        .zip(&dev.sin)
        .enumerate()
        .map(|(i, (a, b))| w((i + 1) as f64) * (a * a + b * b))
        .sum()
}

/// Gaussian smoothing `∫ (1/2√(πt)) e^{−(θ−ξ)²/4t} f(ξ) dξ` over the real line,
/// truncated to `|ξ−θ| ≤ 16√t` and evaluated by composite Simpson.
pub fn heat_convolve(f: impl Fn(f64) -> f64, theta: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let root_t = t.sqrt();
    let half_width = ORACLE_WINDOW * root_t;
    // Even by construction: 2 · 16 · 64.
    let panels = (2.0 * ORACLE_WINDOW) as usize * ORACLE_PANELS_PER_ROOT_T;
    let h = 2.0 * half_width / panels as f64;
    let norm = 1.0 / (2.0 * (PI * t).sqrt());
    let integrand = |xi: f64| {
        let d = theta - xi;
        norm * (-d * d / (4.0 * t)).exp() * f(xi)
    };
    let start = theta - half_width;
    let mut sum = integrand(start) + integrand(theta + half_width);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * integrand(start + i as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// Quadrature of the heat-kernel representation of the deviation,
/// `B(θ,t) = e^t ∫ (1/2√(πt)) e^{−(θ−ξ)²/4t} (u(ξ,0) − L(0)/2π) dξ`.
pub struct KernelOracle<F> {
    u0: F,
    mean: f64,
}

impl<F: Fn(f64) -> f64> KernelOracle<F> {
    pub fn new(u0: F) -> Self {
        let mean = uniform_grid(ORACLE_MEAN_POINTS)
            .into_iter()
            .map(&u0)
            .sum::<f64>()
            / ORACLE_MEAN_POINTS as f64;
        KernelOracle { u0, mean }
    }

    /// `L(0)/2π` as seen by the oracle.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn deviation(&self, theta: f64, t: f64) -> Result<f64> {
        let smoothed = heat_convolve(|xi| (self.u0)(xi) - self.mean, theta, t)?;
        Ok(t.exp() * smoothed)
    }

    /// `e^t (G_t * u0)(θ)`, the heat-kernel image of the full support function.
    pub fn smoothed_support(&self, theta: f64, t: f64) -> Result<f64> {
        Ok(t.exp() * heat_convolve(&self.u0, theta, t)?)
    }
}

/// One-shot form of [`KernelOracle::deviation`].
pub fn kernel_oracle(u0: impl Fn(f64) -> f64, theta: f64, t: f64) -> Result<f64> {
    KernelOracle::new(u0).deviation(theta, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    /// `∫₀^{2π} f dθ` by the trapezoid rule; exact for trigonometric polynomials of degree < m.
    fn periodic_integral(f: impl Fn(f64) -> f64, m: usize) -> f64 {
        uniform_grid(m).into_iter().map(f).sum::<f64>() * TAU / m as f64
    }

    fn ellipse_ish() -> SupportSpectrum {
        SupportSpectrum::new(1.0, vec![0.0, 0.2], vec![]).unwrap()
    }

    #[test]
    fn propagation_examples() {
        let dev = DeviationSpectrum::from_spectrum(&ellipse_ish().with_sin(3, 0.05));
        assert_eq!(dev.propagate(0.0).unwrap(), dev);
        let p = dev.propagate(0.5).unwrap();
        assert_abs_diff_eq!(p.cos[1], 0.2 * (-1.5f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(p.cos[1], 0.0446260, epsilon = 1e-7);
        let shifted =
            DeviationSpectrum::from_spectrum(&SupportSpectrum::circle(1.0).with_cos(1, 0.3));
        assert_eq!(shifted.propagate(7.0).unwrap().cos[0], 0.3);
        assert_eq!(dev.propagate(-0.1), Err(Error::NegativeTime(-0.1)));
    }

    #[test]
    fn oracle_examples() {
        let circle = |_: f64| 1.0;
        for (th, t) in [(0.0, 0.1), (2.0, 1.5)] {
            assert_abs_diff_eq!(kernel_oracle(circle, th, t).unwrap(), 0.0, epsilon = 1e-14);
        }
        let v = kernel_oracle(|x: f64| 1.0 + 0.2 * (2.0 * x).cos(), 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(v, 0.2 * (-1.5f64).exp(), epsilon = 1e-10);
        let v = kernel_oracle(|x: f64| 1.0 + 0.3 * x.cos(), 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(v, 0.3, epsilon = 1e-10);
        assert!(kernel_oracle(circle, 0.0, 0.0).is_err());
    }

    #[test]
    fn e1_examples() {
        let circle = SupportSpectrum::circle(1.0);
        assert_abs_diff_eq!(
            e1(&circle, 0.7).unwrap(),
            PI * 1.4f64.exp(),
            epsilon = 1e-13
        );
        let e = ellipse_ish();
        assert_abs_diff_eq!(e1(&e, 0.0).unwrap(), e.area(), epsilon = 1e-14);
        let expected = PI * 1f64.exp() + 0.5 * PI * (-3.0) * (-3f64).exp() * 0.04;
        assert_abs_diff_eq!(e1(&e, 0.5).unwrap(), expected, epsilon = 1e-13);
    }

    #[test]
    fn known_scalar_examples() {
        let k = known_scalars(&SupportSpectrum::circle(1.0), 0.3).unwrap();
        assert_eq!((k.d, k.e), (0.0, 0.0));
        let k = known_scalars(&ellipse_ish(), 0.0).unwrap();
        assert_eq!(k.d, 0.0);
        assert_abs_diff_eq!(k.e, -0.06 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(-4.0 * PI * k.e, 0.24 * PI * PI, epsilon = 1e-14);
    }

    #[test]
    fn e_matches_e1_minus_leading_term() {
        let s = ellipse_ish().with_sin(3, 0.04).with_cos(1, 0.2);
        for t in [0.0, 0.3, 1.0] {
            let e = known_scalars(&s, t).unwrap().e;
            let l0 = s.length();
            let via_e1 = e1(&s, t).unwrap() - l0 * l0 / (4.0 * PI) * (2.0 * t).exp();
            assert_abs_diff_eq!(e, via_e1, epsilon = 1e-12 * (2.0 * t).exp());
            assert!(e <= 0.0);
        }
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(
            deviation_sup_norm(&DeviationSpectrum::zero(4), 1.0).unwrap(),
            0.0
        );
        let d = DeviationSpectrum::from_spectrum(&ellipse_ish());
        assert_abs_diff_eq!(
            deviation_sup_norm(&d, 1.0).unwrap(),
            0.2 * (-3f64).exp(),
            epsilon = 1e-16
        );
        let d = DeviationSpectrum::from_spectrum(&ellipse_ish().with_cos(1, 0.3));
        assert_abs_diff_eq!(deviation_sup_norm(&d, 20.0).unwrap(), 0.3, epsilon = 1e-15);
        for t in [0.0, 0.5, 2.0] {
            assert!(deviation_sup_norm(&d, t).unwrap() <= t.exp() * d.l1_coefficients());
        }
    }

    #[test]
    fn derivatives_match_closed_forms() {
        let d = DeviationSpectrum::from_spectrum(&ellipse_ish());
        let th = 0.37;
        assert_abs_diff_eq!(d.derivative(th, 0), 0.2 * (2.0 * th).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.derivative(th, 1),
            -0.4 * (2.0 * th).sin(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            d.derivative(th, 2),
            -0.8 * (2.0 * th).cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(d.derivative_sup_norm(4), 0.2 * 16.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_mean_is_preserved() {
        let d = DeviationSpectrum::from_spectrum(&ellipse_ish().with_sin(5, 0.01).with_cos(1, 0.1));
        let p = d.propagate(0.8).unwrap();
        assert!(periodic_integral(|th| p.evaluate(th), 256).abs() <= 1e-10);
    }
}
