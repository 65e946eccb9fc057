//! The weighted half-line form `p[λ](u) = ∫(u′² + λx²u²)x² dx`.
//!
//! A test function depending only on `x₃` turns the magnetic form on the
//! cone into `p[λ]` with `λ = ‖A‖²_{L²(ω)}/|ω|`. With `U = xu` the weight
//! disappears and `p[λ]` becomes the Dirichlet harmonic oscillator on the
//! half-line, whose eigenvalues are `√λ(4n − 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::LinearGauge;
use crate::geometry::{Point2, Section};
use crate::linalg::SymTridiagonal;
use crate::quadrature::{composite_gauss, gauss_legendre, integrate_adaptive, simpson};

/// `p[λ]` for a fixed `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    lambda: f64,
}

impl ReducedProblem {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn exact_spectrum(&self, n_max: usize) -> Result<Vec<f64>> {
        exact_reduced_spectrum(self.lambda, n_max)
    }

    pub fn fd_spectrum(&self, grid: GridSpec, n_max: usize) -> Result<FdSpectrum> {
        fd_halfline_spectrum(self.lambda, grid, n_max)
    }
}

/// Uniform grid on `[0, x_max]` with `n` interior points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSpec {
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 4000;
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::Usage(format!("xMax must be positive, got {x_max}")));
        }
        if n < Self::MIN_POINTS {
            return Err(Error::Usage(format!("grid needs at least {} points, got {n}", Self::MIN_POINTS)));
        }
        Ok(Self { x_max, n })
    }

    /// `x_max = 12 λ^{-1/4}`, 4000 interior points.
    pub fn default_for(lambda: f64) -> Self {
        Self { x_max: 12.0 * lambda.powf(-0.25), n: Self::DEFAULT_POINTS }
    }

    pub fn step(&self) -> f64 {
        self.x_max / (self.n + 1) as f64
    }
}

/// Finite-difference eigenvalues plus an optional accuracy warning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSpectrum {
    pub values: Vec<f64>,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// `√λ (4n − 1)` for `n = 1..=n_max`.
pub fn exact_reduced_spectrum(lambda: f64, n_max: usize) -> Result<Vec<f64>> {
    ReducedProblem::new(lambda)?;
    if n_max == 0 {
        return Err(Error::Usage("n_max must be at least 1".into()));
    }
    Ok((1..=n_max).map(|n| lambda.sqrt() * (4 * n - 1) as f64).collect())
}

/// Lowest `n_max` eigenvalues of `−U″ + λx²U`, `U(0) = U(x_max) = 0`, by
/// central differences and Sturm bisection.
pub fn fd_halfline_spectrum(lambda: f64, grid: GridSpec, n_max: usize) -> Result<FdSpectrum> {
    ReducedProblem::new(lambda)?;
    let grid = GridSpec::new(grid.x_max, grid.n)?;
    if n_max == 0 || n_max > grid.n {
        return Err(Error::Usage(format!("n_max must be in 1..={}", grid.n)));
    }
    let h = grid.step();
    let ih2 = 1.0 / (h * h);
    let diag = (1..=grid.n)
        .map(|i| {
            let x = i as f64 * h;
            2.0 * ih2 + lambda * x * x
        })
        .collect();
    let t = SymTridiagonal::new(diag, vec![-ih2; grid.n - 1])?;
    let values = t.smallest(n_max);
    let exact = 3.0 * lambda.sqrt();
    let rel = (values[0] - exact).abs() / exact;
    let warning = (rel > 0.1)
        .then(|| format!("grid too coarse: ground level off by {:.1}% from 3 sqrt(lambda)", 100.0 * rel));
    Ok(FdSpectrum { values, grid, warning })
}

/// `λ = ‖A‖²_{L²(ω)} / |ω|`, exact from the section moments.
pub fn lambda_from_gauge(gauge: &LinearGauge, section: &Section) -> Result<f64> {
    if !gauge.is_x3_independent() {
        return Err(Error::Usage("gauge depends on x3; expected an x3-independent linear potential".into()));
    }
    let m = section.moments();
    let lambda = gauge.norm_sq(&m) / m.area;
    if !(lambda > 0.0) {
        return Err(Error::Domain("gauge has zero norm on the section (lambda = 0)".into()));
    }
    Ok(lambda)
}

/// Samples of `u` on the uniform grid `x_k = k h`, `k = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub values: Vec<f64>,
    pub step: f64,
}

impl SampledFunction {
    /// Samples `f` at `2m + 1` points on `[0, x_max]` (`m = samples / 2`).
    pub fn from_fn(f: impl Fn(f64) -> f64, x_max: f64, samples: usize) -> Self {
        let intervals = 2 * (samples / 2).max(2);
        let step = x_max / intervals as f64;
        Self { values: (0..=intervals).map(|k| f(k as f64 * step)).collect(), step }
    }

    /// Fourth-order finite-difference derivative.
    fn derivative(&self) -> Vec<f64> {
        let u = &self.values;
        let n = u.len();
        let h = self.step;
        (0..n)
            .map(|k| {
                if k >= 2 && k + 2 < n {
                    (u[k - 2] - 8.0 * u[k - 1] + 8.0 * u[k + 1] - u[k + 2]) / (12.0 * h)
                } else if k < 2 {
                    let s = |j: usize| u[k + j];
                    if k == 0 {
                        (-25.0 * s(0) + 48.0 * s(1) - 36.0 * s(2) + 16.0 * s(3) - 3.0 * s(4)) / (12.0 * h)
                    } else {
                        (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / (12.0 * h)
                    }
                } else if k + 1 == n {
                    let s = |j: usize| u[k - j];
                    (25.0 * s(0) - 48.0 * s(1) + 36.0 * s(2) - 16.0 * s(3) + 3.0 * s(4)) / (12.0 * h)
                } else {
                    (3.0 * u[n - 1] + 10.0 * u[n - 2] - 18.0 * u[n - 3] + 6.0 * u[n - 4] - u[n - 5]) / (12.0 * h)
                }
            })
            .collect()
    }
}

/// `p[λ](u) / ‖u‖²_w` by composite Simpson on the samples.
pub fn rayleigh_quotient_1d(u: &SampledFunction, lambda: f64) -> Result<f64> {
    if u.values.len() < 5 {
        return Err(Error::Usage("need at least 5 samples".into()));
    }
    let du = u.derivative();
    let h = u.step;
    let x = |k: usize| k as f64 * h;
    let num: Vec<f64> = (0..u.values.len())
        .map(|k| {
            let xk = x(k);
            (du[k] * du[k] + lambda * xk * xk * u.values[k] * u.values[k]) * xk * xk
        })
        .collect();
    let den: Vec<f64> = u.values.iter().enumerate().map(|(k, v)| v * v * x(k) * x(k)).collect();
    let d = simpson(&den, h)?;
    if !(d > 0.0) {
        return Err(Error::Domain("test function vanishes in the weighted norm".into()));
    }
    Ok(simpson(&num, h)? / d)
}

/// Analytic test profiles `φ(x₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Profile {
    /// `exp(−w x²/2)`
    Gaussian { width: f64 },
    /// `exp(−r x)`
    Exponential { rate: f64 },
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { width } => (-0.5 * width * x * x).exp(),
            Profile::Exponential { rate } => (-rate * x).exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { width } => -width * x * self.value(x),
            Profile::Exponential { rate } => -rate * self.value(x),
        }
    }

    /// Point beyond which `φ² < 1e-40`.
    pub fn default_truncation(&self) -> f64 {
        match *self {
            Profile::Gaussian { width } => (2.0 * 46.0 / width).sqrt(),
            Profile::Exponential { rate } => 46.0 / rate,
        }
    }

    fn validate(&self) -> Result<()> {
        let p = match *self {
            Profile::Gaussian { width } => width,
            Profile::Exponential { rate } => rate,
        };
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Usage(format!("profile parameter must be positive, got {p}")));
        }
        Ok(())
    }
}

/// The weighted quotient of an analytic profile on `[0, truncation]`, by
/// adaptive quadrature. `λ = 0` gives the pure kinetic quotient.
pub fn profile_quotient(profile: Profile, lambda: f64, truncation: f64) -> Result<f64> {
    profile.validate()?;
    let tol = 1e-14;
    let num = integrate_adaptive(
        |x| {
            let (u, du) = (profile.value(x), profile.derivative(x));
            (du * du + lambda * x * x * u * u) * x * x
        },
        0.0,
        truncation,
        tol,
    )?;
    let den = integrate_adaptive(|x| profile.value(x).powi(2) * x * x, 0.0, truncation, tol)?;
    Ok(num / den)
}

/// `∫_{tω} g` for a quadratic-or-lower `g`, by direct cubature on the
/// scaled section.
fn slice_integral(section: &Section, t: f64, g: &impl Fn(Point2) -> f64) -> f64 {
    match section {
        Section::Polygon(poly) => {
            // signed triangle fan from the first vertex; exact for quadratics
            let v = poly.vertices();
            let p0 = [t * v[0][0], t * v[0][1]];
            let mut sum = 0.0;
            for i in 1..v.len() - 1 {
                let p1 = [t * v[i][0], t * v[i][1]];
                let p2 = [t * v[i + 1][0], t * v[i + 1][1]];
                let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
                let at = |a: f64, b: f64| {
                    let c = 1.0 - a - b;
                    [c * p0[0] + a * p1[0] + b * p2[0], c * p0[1] + a * p1[1] + b * p2[1]]
                };
                let q = g(at(1.0 / 6.0, 1.0 / 6.0)) + g(at(2.0 / 3.0, 1.0 / 6.0)) + g(at(1.0 / 6.0, 2.0 / 3.0));
                sum += area * q / 3.0;
            }
            sum
        }
        Section::Disc(d) => {
            // Gauss in r, trapezoid in angle (exact for trigonometric degree < 2·n_theta)
            let (c, r) = (d.center(), d.radius() * t);
            let (xr, wr) = gauss_legendre(4);
            let n_theta = 8;
            let mut sum = 0.0;
            for (x, w) in xr.iter().zip(&wr) {
                let rho = 0.5 * r * (1.0 + x);
                for k in 0..n_theta {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
                    let p = [t * c[0] + rho * a.cos(), t * c[1] + rho * a.sin()];
                    sum += w * 0.5 * r * rho * g(p);
                }
            }
            sum * 2.0 * std::f64::consts::PI / n_theta as f64
        }
    }
}

/// Both sides of the reduction identity for the test function `φ(x₃)` on
/// the cone truncated at `x₃ = truncation`: the magnetic Rayleigh quotient
/// by slice-wise cubature in 3D, and the weighted 1D quotient.
pub fn cone_quotient_consistency(
    profile: Profile,
    gauge: &LinearGauge,
    section: &Section,
    truncation: Option<f64>,
) -> Result<(f64, f64)> {
    profile.validate()?;
    if !gauge.is_x3_independent() {
        return Err(Error::Usage("gauge depends on x3".into()));
    }
    let t_max = truncation.unwrap_or_else(|| profile.default_truncation());
    let one = |_: Point2| 1.0;
    let a_sq = |p: Point2| {
        let a = gauge.eval(p);
        a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
    };
    let num = |t: f64| {
        let (u, du) = (profile.value(t), profile.derivative(t));
        du * du * slice_integral(section, t, &one) + u * u * slice_integral(section, t, &a_sq)
    };
    let den = |t: f64| profile.value(t).powi(2) * slice_integral(section, t, &one);
    let panels = 400;
    let lhs = composite_gauss(num, 0.0, t_max, panels, 8) / composite_gauss(den, 0.0, t_max, panels, 8);
    let lambda = gauge.norm_sq(&section.moments()) / section.area();
    let rhs = profile_quotient(profile, lambda, t_max)?;
    let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    if !rel.is_finite() {
        return Err(Error::Accuracy("cone quotient quadrature produced a non-finite value".into()));
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{optimal_gauge, LinearGauge, MagneticField, TransverseGauge};
    use crate::geometry::{Disc, Polygon};

    fn unit_disc() -> Section {
        Section::Disc(Disc::new([0.0, 0.0], 1.0).unwrap())
    }

    #[test]
    fn exact_spectrum_examples() {
        assert_eq!(exact_reduced_spectrum(1.0, 3).unwrap(), vec![3.0, 7.0, 11.0]);
        assert_eq!(exact_reduced_spectrum(4.0, 1).unwrap(), vec![6.0]);
        let v = exact_reduced_spectrum(0.125, 1).unwrap()[0];
        assert!((v - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(exact_reduced_spectrum(0.0, 1).is_err());
        assert!(exact_reduced_spectrum(1.0, 0).is_err());
    }

    #[test]
    fn fd_matches_oscillator() {
        let s = fd_halfline_spectrum(1.0, GridSpec::new(12.0, 4000).unwrap(), 3).unwrap();
        for (v, e) in s.values.iter().zip([3.0, 7.0, 11.0]) {
            assert!((v - e).abs() < 1e-3, "{v} vs {e}");
        }
        assert!(s.warning.is_none());
    }

    #[test]
    fn fd_scales_with_sqrt_lambda() {
        let a = fd_halfline_spectrum(1.0, GridSpec::default_for(1.0), 2).unwrap();
        let b = fd_halfline_spectrum(16.0, GridSpec::default_for(16.0), 2).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((4.0 * x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn coarse_grid_warns() {
        let s = fd_halfline_spectrum(1.0, GridSpec::new(1.0, 16).unwrap(), 1).unwrap();
        assert!(s.warning.is_some());
    }

    #[test]
    fn lambda_examples() {
        let field = MagneticField::new(0.0, 0.0, 1.0);
        let a = optimal_gauge(field, &unit_disc().moments()).unwrap();
        assert!((lambda_from_gauge(&a, &unit_disc()).unwrap() - 0.125).abs() < 1e-15);
        let zero = LinearGauge::from_transverse(MagneticField::new(0.0, 0.0, 0.0), TransverseGauge::symmetric());
        assert!(matches!(lambda_from_gauge(&zero, &unit_disc()), Err(Error::Domain(_))));
        let mut dependent = a;
        dependent.matrix[0][2] = 1.0;
        assert!(matches!(lambda_from_gauge(&dependent, &unit_disc()), Err(Error::Usage(_))));
        let scaled = LinearGauge::from_transverse(MagneticField::new(0.0, 0.0, 3.0), TransverseGauge::symmetric());
        assert!((lambda_from_gauge(&scaled, &unit_disc()).unwrap() - 9.0 * 0.125).abs() < 1e-14);
    }

    #[test]
    fn gaussian_is_ground_state() {
        let u = SampledFunction::from_fn(|x| (-0.5 * x * x).exp(), 12.0, 4001);
        assert!((rayleigh_quotient_1d(&u, 1.0).unwrap() - 3.0).abs() < 1e-6);
        let v = SampledFunction::from_fn(|x| (-x).exp(), 40.0, 8001);
        assert!(rayleigh_quotient_1d(&v, 1.0).unwrap() > 3.0);
        let z = SampledFunction::from_fn(|_| 0.0, 1.0, 101);
        assert!(matches!(rayleigh_quotient_1d(&z, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn width_scan_minimum_at_one() {
        let q = |t: f64| {
            let u = SampledFunction::from_fn(|x| (-0.5 * t * x * x).exp(), 12.0 / t.sqrt(), 2001);
            rayleigh_quotient_1d(&u, 1.0).unwrap()
        };
        let ts: Vec<f64> = (0..41).map(|k| 0.5 + 0.025 * k as f64).collect();
        let best = ts.iter().copied().min_by(|a, b| q(*a).total_cmp(&q(*b))).unwrap();
        assert!((best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_quotient_agrees_on_disc_and_square() {
        let field = MagneticField::new(0.0, 0.0, 1.0);
        let square = Section::Polygon(Polygon::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap());
        for section in [unit_disc(), square] {
            let a = optimal_gauge(field, &section.moments()).unwrap();
            let (l, r) = cone_quotient_consistency(Profile::Gaussian { width: 1.0 }, &a, &section, None).unwrap();
            assert!((l - r).abs() < 1e-4 * r, "{l} vs {r}");
        }
    }

    #[test]
    fn cone_quotient_zero_gauge_is_kinetic() {
        let zero = LinearGauge::new([[0.0; 3]; 3]);
        let (l, r) = cone_quotient_consistency(Profile::Exponential { rate: 1.0 }, &zero, &unit_disc(), None).unwrap();
        // ∫e^{-2x}x² / ∫e^{-2x}x² with derivative factor 1
        assert!((l - 1.0).abs() < 1e-8 && (r - 1.0).abs() < 1e-8);
    }
}
