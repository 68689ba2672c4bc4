//! Convex closed curves represented by the Fourier spectrum of their support
//! function, together with every geometric quantity the flow needs.
//!
//! A spectrum of truncation `N` stands for
//!
//! ```text
//! u(θ) = a0 + Σ_{n=1..N} (a_n cos nθ + b_n sin nθ)
//! ```
//!
//! where θ is the outward normal angle. Length, area and the integral of the
//! radius of curvature all have closed forms in the coefficients; only the
//! integral of the squared curvature needs quadrature.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation for curves ingested from samples or polygons.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Smallest accepted radius of curvature for a curve to count as strictly convex.
pub const CONVEXITY_THRESHOLD: f64 = 1e-9;

/// Minimum size of the grid used for convexity checks and curvature extrema.
pub const MIN_VALIDATION_GRID: usize = 512;

/// Grid size used when sampling a polygon's support function.
pub const POLYGON_SAMPLES: usize = 4096;

/// Uniform angle grid `θ_j = 2πj/M`, `j = 0..M-1`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Truncated Fourier spectrum of a support function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRecord", into = "SpectrumRecord")]
pub struct SupportSpectrum {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// Flat serialized form `{mean, cos: [a1..], sin: [b1..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TryFrom<SpectrumRecord> for SupportSpectrum {
    type Error = Error;

    fn try_from(r: SpectrumRecord) -> Result<Self> {
        SupportSpectrum::new(r.mean, r.cos, r.sin)
    }
}

impl From<SupportSpectrum> for SpectrumRecord {
    fn from(s: SupportSpectrum) -> Self {
        SpectrumRecord {
            mean: s.mean,
            cos: s.cos,
            sin: s.sin,
        }
    }
}

impl SupportSpectrum {
    /// Builds a spectrum from `a0`, `[a1, a2, ..]` and `[b1, b2, ..]`.
    ///
    /// The shorter coefficient list is zero-padded and the truncation is
    /// raised to 2 if fewer modes are given.
    pub fn new(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let n = cos.len().max(sin.len()).max(2);
        Self::with_truncation(mean, cos, sin, n)
    }

    /// Like [`SupportSpectrum::new`] but pads both lists to exactly `truncation` modes.
    pub fn with_truncation(
        mean: f64,
        mut cos: Vec<f64>,
        mut sin: Vec<f64>,
        truncation: usize,
    ) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::TruncationTooSmall(truncation));
        }
        if cos.len() > truncation || sin.len() > truncation {
            return Err(Error::TooFewSamples {
                samples: cos.len().max(sin.len()),
                truncation,
                needed: truncation,
            });
        }
        if !mean.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        if let Some(i) = cos.iter().chain(sin.iter()).position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        cos.resize(truncation, 0.0);
        sin.resize(truncation, 0.0);
        Ok(SupportSpectrum { mean, cos, sin })
    }

    /// Circle of the given radius centred at the origin.
    pub fn circle(radius: f64) -> Self {
        SupportSpectrum {
            mean: radius,
            cos: vec![0.0; 2],
            sin: vec![0.0; 2],
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `a_1..a_N`.
    pub fn cos(&self) -> &[f64] {
        &self.cos
    }

    /// `b_1..b_N`.
    pub fn sin(&self) -> &[f64] {
        &self.sin
    }

    pub fn truncation(&self) -> usize {
        self.cos.len()
    }

    /// `(a_n, b_n)` for `n ≥ 1`; zero beyond the truncation.
    pub fn mode(&self, n: usize) -> (f64, f64) {
        if n == 0 {
            return (self.mean, 0.0);
        }
        match (self.cos.get(n - 1), self.sin.get(n - 1)) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0.0, 0.0),
        }
    }

    /// Iterates `(n, a_n, b_n)` for `n = 1..=N`.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.cos
            .iter()
            .zip(self.sin.iter())
            .enumerate()
            .map(|(i, (&a, &b))| (i + 1, a, b))
    }

    /// Returns a copy with `a_n` replaced, growing the truncation if needed.
    pub fn with_cos(mut self, n: usize, value: f64) -> Self {
        self.set_mode(n, Some(value), None);
        self
    }

    /// Returns a copy with `b_n` replaced, growing the truncation if needed.
    pub fn with_sin(mut self, n: usize, value: f64) -> Self {
        self.set_mode(n, None, Some(value));
        self
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    fn set_mode(&mut self, n: usize, a: Option<f64>, b: Option<f64>) {
        assert!(n >= 1, "mode index starts at 1");
        if n > self.cos.len() {
            self.cos.resize(n, 0.0);
            self.sin.resize(n, 0.0);
        }
        if let Some(a) = a {
            self.cos[n - 1] = a;
        }
        if let Some(b) = b {
            self.sin[n - 1] = b;
        }
    }

    /// Multiplies every coefficient, mean included, by `factor` (a homothety).
    pub fn scaled(&self, factor: f64) -> Self {
        SupportSpectrum {
            mean: self.mean * factor,
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|c| c * factor).collect(),
        }
    }

    /// Grid size used for convexity checks: `max(4N, 512)`.
    pub fn validation_grid_size(&self) -> usize {
        (4 * self.truncation()).max(MIN_VALIDATION_GRID)
    }

    /// `u(θ)` by direct summation.
    pub fn support(&self, theta: f64) -> f64 {
        self.modes().fold(self.mean, |acc, (n, a, b)| {
            let x = n as f64 * theta;
            acc + a * x.cos() + b * x.sin()
        })
    }

    /// `u_θ(θ)`.
    pub fn support_derivative(&self, theta: f64) -> f64 {
        self.modes().fold(0.0, |acc, (n, a, b)| {
            let k = n as f64;
            let x = k * theta;
            acc + k * (b * x.cos() - a * x.sin())
        })
    }

    /// `u_θθ + u`, the radius of curvature `1/k`. Non-positive values mean the
    /// spectrum does not describe a strictly convex curve at `θ`.
    pub fn radius_of_curvature(&self, theta: f64) -> f64 {
        self.modes().fold(self.mean, |acc, (n, a, b)| {
            let k = n as f64;
            let x = k * theta;
            acc + (1.0 - k * k) * (a * x.cos() + b * x.sin())
        })
    }

    /// Minimum of the radius of curvature over a uniform grid of
    /// `max(grid_size, 4N)` points, with the smallest angle attaining it.
    pub fn min_radius(&self, grid_size: usize) -> (f64, f64) {
        let m = grid_size.max(4 * self.truncation());
        uniform_grid(m)
            .into_iter()
            .map(|th| (self.radius_of_curvature(th), th))
            .fold((f64::INFINITY, 0.0), |best, cur| {
                if cur.0 < best.0 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Maximum of the radius of curvature over the same grid as [`Self::min_radius`].
    pub fn max_radius(&self, grid_size: usize) -> (f64, f64) {
        let m = grid_size.max(4 * self.truncation());
        uniform_grid(m)
            .into_iter()
            .map(|th| (self.radius_of_curvature(th), th))
            .fold((f64::NEG_INFINITY, 0.0), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            })
    }

    /// Minimum radius of curvature over the grid; positive means convex.
    pub fn validate_convexity(&self, grid_size: usize) -> f64 {
        self.min_radius(grid_size).0
    }

    /// Checks strict convexity on the default validation grid.
    pub fn ensure_convex(&self) -> Result<f64> {
        let (min_radius, theta) = self.min_radius(self.validation_grid_size());
        if min_radius > CONVEXITY_THRESHOLD {
            Ok(min_radius)
        } else {
            Err(Error::NotConvex { min_radius, theta })
        }
    }

    /// `L = ∫ u dθ = 2π a0`.
    pub fn length(&self) -> f64 {
        TAU * self.mean
    }

    /// `A = ½∫ u (u_θθ + u) dθ = π a0² − (π/2) Σ (n²−1)(a_n² + b_n²)`.
    pub fn area(&self) -> f64 {
        PI * self.mean * self.mean - 0.5 * PI * self.weighted_energy(|k| k * k - 1.0)
    }

    /// `L² − 4πA = 2π² Σ (n²−1)(a_n² + b_n²)`, evaluated without cancellation.
    pub fn isoperimetric_deficit(&self) -> f64 {
        2.0 * PI * PI * self.weighted_energy(|k| k * k - 1.0)
    }

    /// `∫ (1/k) ds = ∫ (u_θθ + u)² dθ = L²/2π + π Σ (n²−1)² (a_n² + b_n²)`.
    pub fn total_inverse_curvature(&self) -> f64 {
        let l = self.length();
        l * l / TAU + PI * self.weighted_energy(|k| (k * k - 1.0).powi(2))
    }

    /// `∫ k² ds = ∫ dθ / (u_θθ + u)` by the trapezoid rule on `max(grid_size, 4N)` points.
    pub fn sq_curvature_integral(&self, grid_size: usize) -> Result<f64> {
        let m = grid_size.max(4 * self.truncation());
        let mut sum = 0.0;
        for th in uniform_grid(m) {
            let r = self.radius_of_curvature(th);
            if r <= CONVEXITY_THRESHOLD {
                return Err(Error::NotConvex {
                    min_radius: r,
                    theta: th,
                });
            }
            sum += 1.0 / r;
        }
        Ok(sum * TAU / m as f64)
    }

    /// `Σ w(n) (a_n² + b_n²)`.
    pub(crate) fn weighted_energy(&self, weight: impl Fn(f64) -> f64) -> f64 {
        self.modes()
            .map(|(n, a, b)| weight(n as f64) * (a * a + b * b))
            .sum()
    }

    /// Curve point with outward normal angle θ: `u (cosθ, sinθ) + u_θ (−sinθ, cosθ)`.
    pub fn position(&self, theta: f64) -> [f64; 2] {
        let u = self.support(theta);
        let du = self.support_derivative(theta);
        let (s, c) = theta.sin_cos();
        [u * c - du * s, u * s + du * c]
    }

    /// Samples the reconstructed curve at the given normal angles.
    pub fn curve_position(&self, thetas: &[f64]) -> CurveSamples {
        CurveSamples {
            thetas: thetas.to_vec(),
            points: thetas.iter().map(|&th| self.position(th)).collect(),
        }
    }
}

/// Points of a reconstructed curve, indexed by outward normal angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub thetas: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

impl CurveSamples {
    /// Perimeter of the closed polyline through the samples.
    pub fn polygon_perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let p = self.points[i];
                let q = self.points[(i + 1) % n];
                (q[0] - p[0]).hypot(q[1] - p[1])
            })
            .sum()
    }

    /// Winding number of the closed polyline around `center`.
    pub fn winding_number(&self, center: [f64; 2]) -> i64 {
        let n = self.points.len();
        let total: f64 = (0..n)
            .map(|i| {
                let p = self.points[i];
                let q = self.points[(i + 1) % n];
                let a0 = (p[1] - center[1]).atan2(p[0] - center[0]);
                let a1 = (q[1] - center[1]).atan2(q[0] - center[0]);
                let mut d = a1 - a0;
                if d > PI {
                    d -= TAU;
                } else if d < -PI {
                    d += TAU;
                }
                d
            })
            .sum();
        (total / TAU).round() as i64
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        self.points.iter().fold(
            ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
            |(lo, hi), p| {
                (
                    [lo[0].min(p[0]), lo[1].min(p[1])],
                    [hi[0].max(p[0]), hi[1].max(p[1])],
                )
            },
        )
    }
}

/// Discrete Fourier projection of support samples on the uniform grid
/// `θ_j = 2πj/M`. Exact for band-limited input whose highest mode is ≤ N.
pub fn project_from_samples(samples: &[f64], truncation: usize) -> Result<SupportSpectrum> {
    if truncation < 2 {
        return Err(Error::TruncationTooSmall(truncation));
    }
    let m = samples.len();
    let needed = 2 * truncation + 2;
    if m < needed {
        return Err(Error::TooFewSamples {
            samples: m,
            truncation,
            needed,
        });
    }
    if let Some(index) = samples.iter().position(|u| !u.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let grid = uniform_grid(m);
    let mean = samples.iter().sum::<f64>() / m as f64;
    let scale = 2.0 / m as f64;
    let mut cos = Vec::with_capacity(truncation);
    let mut sin = Vec::with_capacity(truncation);
    for n in 1..=truncation {
        let k = n as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for (u, th) in samples.iter().zip(&grid) {
            let (s, c) = (k * th).sin_cos();
            a += u * c;
            b += u * s;
        }
        cos.push(a * scale);
        sin.push(b * scale);
    }
    SupportSpectrum::with_truncation(mean, cos, sin, truncation)
}

/// Support function of a convex polygon, `h(θ) = max_i ⟨v_i, (cosθ, sinθ)⟩`.
pub fn polygon_support(vertices: &[[f64; 2]], theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    vertices
        .iter()
        .map(|v| v[0] * c + v[1] * s)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Projects the support function of a convex counterclockwise polygon.
///
/// A polygon's support function is only piecewise smooth, so the truncated
/// spectrum is an approximation and often fails strict convexity. Callers
/// must validate the result.
pub fn spectrum_from_polygon(vertices: &[[f64; 2]], truncation: usize) -> Result<SupportSpectrum> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if let Some(index) = vertices
        .iter()
        .flat_map(|v| v.iter())
        .position(|c| !c.is_finite())
    {
        return Err(Error::NonFinite { index: index / 2 });
    }
    for i in 0..n {
        let (j, k) = ((i + 1) % n, (i + 2) % n);
        let (p, q, r) = (vertices[i], vertices[j], vertices[k]);
        let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
        if cross <= 0.0 {
            return Err(Error::NonConvexPolygon(i, j, k));
        }
    }
    let m = POLYGON_SAMPLES.max((8 * truncation).next_power_of_two());
    let samples: Vec<f64> = uniform_grid(m)
        .into_iter()
        .map(|th| polygon_support(vertices, th))
        .collect();
    project_from_samples(&samples, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ellipse_ish() -> SupportSpectrum {
        SupportSpectrum::new(1.0, vec![0.0, 0.2], vec![]).unwrap()
    }

    fn trapezoid_area(s: &SupportSpectrum, m: usize) -> f64 {
        uniform_grid(m)
            .into_iter()
            .map(|th| 0.5 * s.support(th) * s.radius_of_curvature(th))
            .sum::<f64>()
            * TAU
            / m as f64
    }

    #[test]
    fn projection_of_constant() {
        let s = project_from_samples(&vec![1.0; 64], 8).unwrap();
        assert_abs_diff_eq!(s.mean(), 1.0, epsilon = 1e-15);
        assert!(s
            .modes()
            .all(|(_, a, b)| a.abs() < 1e-15 && b.abs() < 1e-15));
    }

    #[test]
    fn projection_of_band_limited_input_is_exact() {
        let u: Vec<f64> = uniform_grid(512)
            .into_iter()
            .map(|t| 1.0 + 0.2 * (2.0 * t).cos())
            .collect();
        let s = project_from_samples(&u, 8).unwrap();
        assert_abs_diff_eq!(s.mean(), 1.0, epsilon = 1e-12);
        for (n, a, b) in s.modes() {
            let expected = if n == 2 { 0.2 } else { 0.0 };
            assert_abs_diff_eq!(a, expected, epsilon = 1e-12);
            assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_of_square_support() {
        let u: Vec<f64> = uniform_grid(1024)
            .into_iter()
            .map(|t| t.cos().abs() + t.sin().abs())
            .collect();
        let s = project_from_samples(&u, 16).unwrap();
        // kinks at the vertices limit the trapezoid rule to O(1/M²)
        assert_abs_diff_eq!(s.mean(), 4.0 / PI, epsilon = 1e-5);
    }

    #[test]
    fn projection_rejects_bad_input() {
        assert!(matches!(
            project_from_samples(&[1.0; 10], 8),
            Err(Error::TooFewSamples { needed: 18, .. })
        ));
        let mut u = vec![1.0; 64];
        u[5] = f64::NAN;
        assert_eq!(
            project_from_samples(&u, 8),
            Err(Error::NonFinite { index: 5 })
        );
    }

    #[test]
    fn polygons() {
        let square = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        let s = spectrum_from_polygon(&square, 16).unwrap();
        assert_abs_diff_eq!(s.mean(), 4.0 / PI, epsilon = 1e-6);
        assert_abs_diff_eq!(s.length(), 8.0, epsilon = 1e-5);
        // Gibbs ringing of the vertex deltas makes the truncation non-convex.
        assert!(s.ensure_convex().is_err());

        let hexagon: Vec<[f64; 2]> = (0..6)
            .map(|k| {
                let a = k as f64 * PI / 3.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let h = spectrum_from_polygon(&hexagon, 16).unwrap();
        // Perimeter 6, so a0 = 3/π.
        assert_abs_diff_eq!(h.mean(), 3.0 / PI, epsilon = 1e-7);

        let collinear = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(matches!(
            spectrum_from_polygon(&collinear, 16),
            Err(Error::NonConvexPolygon(..))
        ));
        let clockwise = [[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]];
        assert!(spectrum_from_polygon(&clockwise, 16).is_err());
    }

    #[test]
    fn support_and_radius() {
        let c = SupportSpectrum::circle(1.0);
        assert_eq!(c.support(1.3), 1.0);
        assert_eq!(c.radius_of_curvature(0.7), 1.0);
        let e = ellipse_ish();
        assert_abs_diff_eq!(e.support(0.0), 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(e.support(0.4), e.support(0.4 + TAU), epsilon = 1e-12);
        assert_abs_diff_eq!(e.radius_of_curvature(0.0), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(e.radius_of_curvature(PI / 2.0), 1.6, epsilon = 1e-15);
    }

    #[test]
    fn convexity_validation() {
        assert_abs_diff_eq!(SupportSpectrum::circle(1.0).validate_convexity(512), 1.0);
        assert_abs_diff_eq!(ellipse_ish().validate_convexity(512), 0.4, epsilon = 1e-15);
        let bad = SupportSpectrum::new(1.0, vec![0.0, 0.5], vec![]).unwrap();
        assert_abs_diff_eq!(bad.validate_convexity(512), -0.5, epsilon = 1e-15);
        assert!(matches!(bad.ensure_convex(), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn length_and_area() {
        assert_eq!(SupportSpectrum::circle(1.0).length(), TAU);
        assert_eq!(ellipse_ish().length(), TAU);
        assert_abs_diff_eq!(
            SupportSpectrum::circle(4.0 / PI).length(),
            8.0,
            epsilon = 1e-14
        );

        assert_abs_diff_eq!(SupportSpectrum::circle(1.0).area(), PI);
        let e = ellipse_ish();
        assert_abs_diff_eq!(e.area(), 0.94 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(trapezoid_area(&e, 2048), 0.94 * PI, epsilon = 1e-12);
        let shifted = e.clone().with_cos(1, 0.3);
        assert_abs_diff_eq!(shifted.area(), 0.94 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(trapezoid_area(&shifted, 2048), 0.94 * PI, epsilon = 1e-12);
    }

    #[test]
    fn inverse_curvature_integral() {
        let quad = |s: &SupportSpectrum| {
            uniform_grid(2048)
                .into_iter()
                .map(|th| s.radius_of_curvature(th).powi(2))
                .sum::<f64>()
                * TAU
                / 2048.0
        };
        let c = SupportSpectrum::circle(1.0);
        assert_abs_diff_eq!(c.total_inverse_curvature(), TAU, epsilon = 1e-14);
        let e = ellipse_ish();
        assert_abs_diff_eq!(e.total_inverse_curvature(), 2.36 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(quad(&e), 2.36 * PI, epsilon = 1e-12);
        let t = SupportSpectrum::new(1.0, vec![], vec![0.0, 0.0, 0.1]).unwrap();
        assert_abs_diff_eq!(t.total_inverse_curvature(), 2.64 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(quad(&t), 2.64 * PI, epsilon = 1e-12);
    }

    #[test]
    fn squared_curvature_integral() {
        assert_abs_diff_eq!(
            SupportSpectrum::circle(1.0)
                .sq_curvature_integral(2048)
                .unwrap(),
            TAU,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            SupportSpectrum::circle(2.0)
                .sq_curvature_integral(2048)
                .unwrap(),
            PI,
            epsilon = 1e-13
        );
        // ∫ dθ / (1 − 0.6 cos 2θ) = 2π / 0.8
        let e = ellipse_ish();
        let v = e.sq_curvature_integral(2048).unwrap();
        assert_abs_diff_eq!(v, TAU / 0.8, epsilon = 1e-10);
        assert!(v >= PI * e.length() / e.area());
        let bad = SupportSpectrum::new(1.0, vec![0.0, 0.5], vec![]).unwrap();
        assert!(bad.sq_curvature_integral(512).is_err());
    }

    #[test]
    fn positions() {
        let c = SupportSpectrum::circle(1.0);
        for th in [0.0, 1.0, 2.5] {
            let p = c.position(th);
            assert_abs_diff_eq!(p[0], th.cos(), epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], th.sin(), epsilon = 1e-15);
        }
        let shifted = c.clone().with_cos(1, 0.3);
        let p = shifted.position(1.1);
        assert_abs_diff_eq!(p[0], 0.3 + 1.1f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.1f64.sin(), epsilon = 1e-15);
        let p = ellipse_ish().position(0.0);
        assert_abs_diff_eq!(p[0], 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstructed_curve_is_simple_and_closed() {
        let e = ellipse_ish().with_sin(3, 0.02);
        let samples = e.curve_position(&uniform_grid(4096));
        assert_eq!(samples.winding_number([0.0, 0.0]), 1);
        let rel = (samples.polygon_perimeter() - e.length()).abs() / e.length();
        assert!(rel <= 1e-4, "relative perimeter error {rel}");
    }

    #[test]
    fn serde_record_round_trip() {
        let s: SupportSpectrum =
            serde_json::from_str(r#"{"mean":1.0,"cos":[0.0,0.2],"sin":[0.1]}"#).unwrap();
        assert_eq!(s.truncation(), 2);
        assert_eq!(s.mode(2), (0.2, 0.0));
        assert_eq!(s.mode(1), (0.0, 0.1));
        let back: SupportSpectrum =
            serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(
            serde_json::from_str::<SupportSpectrum>(r#"{"mean":1.0,"cos":[0.1],"sin":[]}"#)
                .map(|s| s.truncation() == 2)
                .unwrap()
        );
    }

    #[test]
    fn angle_normalization() {
        assert_abs_diff_eq!(normalize_angle(-0.5), TAU - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normalize_angle(TAU + 1.0), 1.0, epsilon = 1e-14);
        assert!(normalize_angle(-1e-18) < TAU);
    }
}
