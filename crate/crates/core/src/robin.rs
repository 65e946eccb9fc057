//! Robin-Laplacian counterparts: explicit half-space and wedge energies,
//! and the upper bound for a cone written in polar form `ρ = b(φ)` around a
//! reference axis.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{cross3, dot3, normalize3, scale_section, Point2, Polygon, Section};
use crate::quadrature::integrate_adaptive;

/// Model domains with explicit Robin ground energies (unit parameter).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RobinModel {
    HalfSpace,
    Wedge { alpha: f64 },
}

/// `−1` for the half-space; `−sin⁻²(α/2)` for a wedge of opening `α ≤ π`
/// and `−1` for `α ≥ π`.
pub fn robin_model_energy(model: RobinModel) -> Result<f64> {
    match model {
        RobinModel::HalfSpace => Ok(-1.0),
        RobinModel::Wedge { alpha } => {
            if !(alpha > 0.0 && alpha < 2.0 * PI) {
                return Err(Error::Domain(format!("wedge opening must lie in (0, 2pi), got {alpha}")));
            }
            if alpha <= PI {
                Ok(-1.0 / (0.5 * alpha).sin().powi(2))
            } else {
                Ok(-1.0)
            }
        }
    }
}

/// One smooth piece of `b` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ProfilePiece {
    /// Straight edge at distance `d` with normal direction `phi0`:
    /// `b = d / cos(φ − φ₀)`.
    Line { start: f64, end: f64, d: f64, phi0: f64 },
    /// Circle of radius `r` centred at `c`, which contains the origin.
    Circle { start: f64, end: f64, c: Point2, r: f64 },
}

impl ProfilePiece {
    fn range(&self) -> (f64, f64) {
        match *self {
            ProfilePiece::Line { start, end, .. } | ProfilePiece::Circle { start, end, .. } => (start, end),
        }
    }

    /// `(b(φ), b′(φ))`.
    fn eval(&self, phi: f64) -> (f64, f64) {
        match *self {
            ProfilePiece::Line { d, phi0, .. } => {
                let (s, c) = (phi - phi0).sin_cos();
                (d / c, d * s / (c * c))
            }
            ProfilePiece::Circle { c, r, .. } => {
                let (s, co) = phi.sin_cos();
                let along = c[0] * co + c[1] * s;
                let across = c[0] * s - c[1] * co;
                let root = (r * r - across * across).sqrt();
                let b = along + root;
                (b, -across * b / root)
            }
        }
    }

    fn rotated(&self, angle: f64) -> Self {
        match *self {
            ProfilePiece::Line { start, end, d, phi0 } => {
                ProfilePiece::Line { start: start + angle, end: end + angle, d, phi0: phi0 + angle }
            }
            ProfilePiece::Circle { start, end, c, r } => {
                let (s, co) = angle.sin_cos();
                let c = [co * c[0] - s * c[1], s * c[0] + co * c[1]];
                ProfilePiece::Circle { start: start + angle, end: end + angle, c, r }
            }
        }
    }
}

/// Polar description `ρ = b(φ)` of a section boundary around the axis point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub pieces: Vec<ProfilePiece>,
}

impl BoundaryProfile {
    /// Profile of the cone `C_ω` around the axis through `(axis, 1)`.
    ///
    /// A polygon is re-projected onto the plane tangent to the unit sphere
    /// at the axis direction; its edges stay straight there. A disc is only
    /// supported around the origin (`axis = None` or `[0, 0]`).
    pub fn from_section(section: &Section, axis: Option<Point2>) -> Result<Self> {
        let a = axis.unwrap_or([0.0, 0.0]);
        if !a[0].is_finite() || !a[1].is_finite() {
            return Err(Error::Usage("axis point must be finite".into()));
        }
        match section {
            Section::Polygon(poly) => polygon_profile(&reproject(poly, a)?),
            Section::Disc(d) => {
                if a != [0.0, 0.0] {
                    return Err(Error::Usage("disc profiles are only supported around the origin axis".into()));
                }
                let c = d.center();
                if c[0].hypot(c[1]) >= d.radius() * (1.0 - 1e-12) {
                    return Err(Error::Domain("axis point is not inside the disc (profile not star-shaped)".into()));
                }
                Ok(Self { pieces: vec![ProfilePiece::Circle { start: 0.0, end: 2.0 * PI, c, r: d.radius() }] })
            }
        }
    }

    /// The same boundary with the angular origin moved by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self { pieces: self.pieces.iter().map(|p| p.rotated(angle)).collect() }
    }

    pub fn eval(&self, phi: f64) -> Option<(f64, f64)> {
        let t0 = self.pieces.first()?.range().0;
        let phi = t0 + (phi - t0).rem_euclid(2.0 * PI);
        self.pieces.iter().find(|p| {
            let (a, b) = p.range();
            a <= phi && phi <= b
        })
        .map(|p| p.eval(phi))
    }
}

/// Section of `C_ω` by the plane tangent to the sphere at `(a, 1)/‖(a, 1)‖`,
/// in an orthonormal frame of that plane centred at the tangency point.
fn reproject(poly: &Polygon, a: Point2) -> Result<Polygon> {
    if a == [0.0, 0.0] {
        return Ok(poly.clone());
    }
    let theta = normalize3([a[0], a[1], 1.0]);
    let ex = [1.0, 0.0, 0.0];
    let s = dot3(ex, theta);
    let u1 = normalize3([ex[0] - s * theta[0], ex[1] - s * theta[1], ex[2] - s * theta[2]]);
    let u2 = cross3(theta, u1);
    let q = poly
        .vertices()
        .iter()
        .map(|v| {
            let x = [v[0], v[1], 1.0];
            let k = dot3(x, theta);
            let p = [x[0] / k, x[1] / k, x[2] / k];
            [dot3(p, u1), dot3(p, u2)]
        })
        .collect();
    Polygon::new(q)
}

fn polygon_profile(poly: &Polygon) -> Result<BoundaryProfile> {
    let v = poly.vertices();
    let n = v.len();
    if !poly.contains([0.0, 0.0]) {
        return Err(Error::Domain("axis point is not inside the section (profile not star-shaped)".into()));
    }
    let mut pieces = Vec::with_capacity(n);
    let mut start = v[0][1].atan2(v[0][0]);
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        let normal = poly.outward_normal(i);
        let d = p[0] * normal[0] + p[1] * normal[1];
        if !(d > 1e-12 * poly.diameter()) {
            return Err(Error::Domain(format!(
                "edge {i} is seen edge-on from the axis point (profile not star-shaped)"
            )));
        }
        let span = (q[1].atan2(q[0]) - p[1].atan2(p[0])).rem_euclid(2.0 * PI);
        let end = start + span;
        pieces.push(ProfilePiece::Line { start, end, d, phi0: normal[1].atan2(normal[0]) });
        start = end;
    }
    Ok(BoundaryProfile { pieces })
}

/// `−(∫σb² / ∫b²)²` with `σ = √(1 + b⁻² + b′²b⁻⁴)`, split at the profile's
/// break angles.
pub fn robin_cone_upper_bound(profile: &BoundaryProfile) -> Result<f64> {
    if profile.pieces.is_empty() {
        return Err(Error::Usage("empty boundary profile".into()));
    }
    let tol = 1e-12;
    let mut weighted = 0.0;
    let mut plain = 0.0;
    for piece in &profile.pieces {
        let (a, b) = piece.range();
        weighted += integrate_adaptive(
            |phi| {
                let (r, dr) = piece.eval(phi);
                (r.powi(4) + r * r + dr * dr).sqrt()
            },
            a,
            b,
            tol,
        )?;
        plain += integrate_adaptive(|phi| piece.eval(phi).0.powi(2), a, b, tol)?;
    }
    if !(plain > 0.0) || !weighted.is_finite() {
        return Err(Error::Domain("profile is not positive".into()));
    }
    Ok(-(weighted / plain).powi(2))
}

/// Log-log slope of `|bound(εω)|` against `ε`.
pub fn robin_scaling_exponent(section: &Section, axis: Option<Point2>, epsilons: &[f64]) -> Result<f64> {
    if epsilons.len() < 3 {
        return Err(Error::Usage(format!("need at least 3 epsilon values, got {}", epsilons.len())));
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Domain("epsilon values must be positive".into()));
    }
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Usage(format!("epsilon ladder must span a decade (got {lo} to {hi})")));
    }
    let points = epsilons
        .iter()
        .map(|&eps| {
            let scaled = scale_section(section, eps)?;
            let axis = axis.map(|a| [eps * a[0], eps * a[1]]);
            let bound = robin_cone_upper_bound(&BoundaryProfile::from_section(&scaled, axis)?)?;
            Ok((eps.ln(), (-bound).ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(least_squares_slope(&points))
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
