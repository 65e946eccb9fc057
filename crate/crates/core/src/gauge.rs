//! Gauge optimization and the bound constant `e(B, ω)`.
//!
//! Among linear, `x₃`-independent potentials with `curl A = B`, the third
//! component is forced (`A₃ = B₁x₂ − B₂x₁`) and the transverse part is
//! `B₃ A'` with `A'` in the affine plane `{curl A' = 1}`. Minimizing the
//! `L²(ω)` norm of `A'` is a projection onto that plane and has a closed
//! form in terms of the second moments of `ω`.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::SQRT_2;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Moments, Point3};
use crate::linalg::solve_dense;

/// Constant magnetic field in the cone's reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticField {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl MagneticField {
    pub fn new(b1: f64, b2: f64, b3: f64) -> Self {
        Self { b1, b2, b3 }
    }

    pub fn norm(&self) -> f64 {
        (self.b1 * self.b1 + self.b2 * self.b2 + self.b3 * self.b3).sqrt()
    }

    pub fn as_array(&self) -> Point3 {
        [self.b1, self.b2, self.b3]
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(t * self.b1, t * self.b2, t * self.b3)
    }

    /// Rotate the `(B₁, B₂)` part by `angle` about the `x₃` axis.
    pub fn rotated_xy(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.b1 - s * self.b2, s * self.b1 + c * self.b2, self.b3)
    }
}

impl FromStr for MagneticField {
    type Err = Error;

    /// Parses `"bx,by,bz"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad field component in {s:?}: {e}")))?;
        match parts[..] {
            [b1, b2, b3] if parts.iter().all(|v| v.is_finite()) => Ok(Self::new(b1, b2, b3)),
            _ => Err(Error::Parse(format!("field must be three finite numbers, got {s:?}"))),
        }
    }
}

/// Linear plane potential `A'(x) = [[a, b], [c, d]] x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseGauge {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TransverseGauge {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// The symmetric potential `½(−x₂, x₁)`.
    pub fn symmetric() -> Self {
        Self::new(0.0, -0.5, 0.5, 0.0)
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// `∂₁A'₂ − ∂₂A'₁`.
    pub fn curl(&self) -> f64 {
        self.c - self.b
    }

    pub fn is_admissible(&self, tol: f64) -> bool {
        (self.curl() - 1.0).abs() <= tol
    }

    /// `‖A'‖²_{L²(ω)}` from the raw moments.
    pub fn norm_sq(&self, m: &Moments) -> f64 {
        (self.a * self.a + self.c * self.c) * m.raw2
            + 2.0 * (self.a * self.b + self.c * self.d) * m.raw1
            + (self.b * self.b + self.d * self.d) * m.raw0
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::new(t * self.a, t * self.b, t * self.c, t * self.d)
    }
}

/// Full linear potential `A(x) = M x` on `ℝ³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGauge {
    pub matrix: [[f64; 3]; 3],
}

impl LinearGauge {
    pub fn new(matrix: [[f64; 3]; 3]) -> Self {
        Self { matrix }
    }

    /// `(B₃ A', B₁x₂ − B₂x₁)`, the potential assembled from a transverse gauge.
    pub fn from_transverse(field: MagneticField, transverse: TransverseGauge) -> Self {
        let t = transverse.scaled(field.b3);
        Self::new([
            [t.a, t.b, 0.0],
            [t.c, t.d, 0.0],
            [-field.b2, field.b1, 0.0],
        ])
    }

    pub fn curl(&self) -> MagneticField {
        let m = &self.matrix;
        MagneticField::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1])
    }

    pub fn is_x3_independent(&self) -> bool {
        self.matrix.iter().all(|row| row[2] == 0.0)
    }

    /// `A` at `(x₁, x₂, ·)`.
    pub fn eval(&self, x: [f64; 2]) -> Point3 {
        let m = &self.matrix;
        [
            m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1],
            m[2][0] * x[0] + m[2][1] * x[1],
        ]
    }

    /// `‖A‖²_{L²(ω)}` from the raw moments (requires `x₃`-independence).
    pub fn norm_sq(&self, m: &Moments) -> f64 {
        self.matrix
            .iter()
            .map(|r| r[0] * r[0] * m.raw2 + 2.0 * r[0] * r[1] * m.raw1 + r[1] * r[1] * m.raw0)
            .sum()
    }
}

/// Output of [`rayleigh_upper_bounds`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub e_constant: f64,
    /// `(n, (4n − 1) e)` for `n = 1..=n_max`.
    pub bounds: Vec<(u32, f64)>,
    pub optimal_gauge: TransverseGauge,
    /// `(M₀M₂ − M₁²) / (M₀ + M₂)`.
    pub transverse_norm_sq: f64,
}

impl Serialize for BoundResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundResult", 4)?;
        st.serialize_field("e", &self.e_constant)?;
        st.serialize_field("transverseNormSq", &self.transverse_norm_sq)?;
        st.serialize_field("gauge", &self.optimal_gauge.matrix())?;
        st.serialize_field("bounds", &self.bounds)?;
        st.end()
    }
}

fn check_moments(m: &Moments) -> Result<()> {
    let s = m.raw0 + m.raw2;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("section has no second moment (M0 + M2 = {s})")));
    }
    Ok(())
}

/// Closed-form minimizer of `‖A'‖_{L²(ω)}` over `{curl A' = 1}`:
/// `[[M₁, −M₂], [M₀, −M₁]] / (M₀ + M₂)`.
pub fn optimal_transverse_gauge(m: &Moments) -> Result<TransverseGauge> {
    check_moments(m)?;
    let s = m.raw0 + m.raw2;
    Ok(TransverseGauge::new(m.raw1 / s, -m.raw2 / s, m.raw0 / s, -m.raw1 / s))
}

/// Minimum of `‖A'‖²_{L²(ω)}` over admissible transverse gauges.
pub fn transverse_norm_sq(m: &Moments) -> Result<f64> {
    check_moments(m)?;
    Ok((m.gram() / (m.raw0 + m.raw2)).max(0.0))
}

/// Independent route to the optimal transverse gauge.
///
/// Parametrizes `{curl A' = 1}` as `[[α, β], [1 + β, γ]]`, samples the
/// quadratic objective `F(α, β, γ) = ‖A'‖²` at finitely many points to
/// recover its gradient and Hessian, then solves the 3×3 normal equations by
/// Gaussian elimination. Never uses the closed form.
pub fn brute_force_gauge(m: &Moments) -> Result<TransverseGauge> {
    let f = |p: [f64; 3]| TransverseGauge::new(p[0], p[1], 1.0 + p[1], p[2]).norm_sq(m);
    // F is quadratic, so unit-step differences recover its derivatives.
    let h = 1.0;
    let origin = [0.0; 3];
    let f0 = f(origin);
    let shift = |p: [f64; 3], i: usize, t: f64| {
        let mut q = p;
        q[i] += t;
        q
    };
    let mut hess = [[0.0; 3]; 3];
    let mut grad = [0.0; 3];
    for i in 0..3 {
        grad[i] = (f(shift(origin, i, h)) - f(shift(origin, i, -h))) / (2.0 * h);
        hess[i][i] = (f(shift(origin, i, h)) - 2.0 * f0 + f(shift(origin, i, -h))) / (h * h);
        for j in 0..i {
            let pp = f(shift(shift(origin, i, h), j, h));
            let pm = f(shift(shift(origin, i, h), j, -h));
            let mp = f(shift(shift(origin, i, -h), j, h));
            let mm = f(shift(shift(origin, i, -h), j, -h));
            hess[i][j] = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[j][i] = hess[i][j];
        }
    }
    let rhs = [-grad[0], -grad[1], -grad[2]];
    let p = solve_dense(hess, rhs)?;
    Ok(TransverseGauge::new(p[0], p[1], 1.0 + p[1], p[2]))
}

/// `e(B, ω)` from the normalized moments.
pub fn e_constant(field: MagneticField, m: &Moments) -> f64 {
    let MagneticField { b1, b2, b3 } = field;
    let sum = m.m0 + m.m2;
    let transverse = if sum > 0.0 { m.normalized_gram() / sum } else { 0.0 };
    let q = b3 * b3 * transverse + b2 * b2 * m.m2 + b1 * b1 * m.m0 - 2.0 * b1 * b2 * m.m1;
    q.max(0.0).sqrt()
}

/// `inf_A ‖A‖_{L²(ω)} / √|ω|`, assembled from the 2D transverse problem and
/// the forced third component. Equal to [`e_constant`]; kept as a second
/// algebraic route.
pub fn decomposed_infimum(field: MagneticField, m: &Moments) -> Result<f64> {
    let MagneticField { b1, b2, b3 } = field;
    let axial = b1 * b1 * m.raw0 - 2.0 * b1 * b2 * m.raw1 + b2 * b2 * m.raw2;
    let total = b3 * b3 * transverse_norm_sq(m)? + axial;
    Ok((total.max(0.0) / m.area).sqrt())
}

/// The optimal full potential for `field` on `ω`.
pub fn optimal_gauge(field: MagneticField, m: &Moments) -> Result<LinearGauge> {
    Ok(LinearGauge::from_transverse(field, optimal_transverse_gauge(m)?))
}

/// Upper bounds `(4n − 1) e(B, ω)` for the first `n_max` Rayleigh quotients.
pub fn rayleigh_upper_bounds(field: MagneticField, m: &Moments, n_max: u32) -> Result<BoundResult> {
    if n_max == 0 {
        return Err(Error::Usage("n_max must be at least 1".into()));
    }
    let e = e_constant(field, m);
    Ok(BoundResult {
        e_constant: e,
        bounds: (1..=n_max).map(|n| (n, (4 * n - 1) as f64 * e)).collect(),
        optimal_gauge: optimal_transverse_gauge(m)?,
        transverse_norm_sq: transverse_norm_sq(m)?,
    })
}

/// Known small-angle asymptotics used for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ReferenceKind {
    /// Plane sector of opening `α`: `‖B‖α/√3`.
    Sector,
    /// Right circular cone, ground state: `‖B‖√(1 + sin²β) 3α/(4√2)`.
    CircularCone,
    /// Wedge of opening `α` (upper bound): `‖B‖α/√3`.
    Wedge,
    /// Right circular cone, `n`-th level: `‖B‖(4n − 1)√(1 + sin²β) α / 2^{5/2}`.
    CircularConeNth,
}

impl FromStr for ReferenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sector" => Ok(Self::Sector),
            "circularCone" | "circular-cone" => Ok(Self::CircularCone),
            "wedge" => Ok(Self::Wedge),
            "circularConeNth" | "circular-cone-nth" => Ok(Self::CircularConeNth),
            other => Err(Error::Usage(format!("unknown reference kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceParams {
    pub alpha: f64,
    pub beta: f64,
    pub b_norm: f64,
    pub n: u32,
}

impl Default for ReferenceParams {
    fn default() -> Self {
        Self { alpha: 0.0, beta: 0.0, b_norm: 1.0, n: 1 }
    }
}

/// Leading-order term of the reference asymptotics, without remainder.
pub fn reference_asymptotics(kind: ReferenceKind, p: ReferenceParams) -> f64 {
    let sqrt3 = 3f64.sqrt();
    let tilt = (1.0 + p.beta.sin().powi(2)).sqrt();
    match kind {
        ReferenceKind::Sector | ReferenceKind::Wedge => p.b_norm * p.alpha / sqrt3,
        ReferenceKind::CircularCone => p.b_norm * tilt * 3.0 * p.alpha / (4.0 * SQRT_2),
        ReferenceKind::CircularConeNth => {
            p.b_norm * (4 * p.n.max(1) - 1) as f64 * tilt * p.alpha / 2f64.powf(2.5)
        }
    }
}

/// `(4n − 1)/2^{3/2} · tan(α/2) · √(1 + sin²β)`: the bound for the right
/// circular cone of opening `α` with a unit field at angle `β` to the axis.
pub fn circular_cone_bound(alpha: f64, beta: f64, n: u32) -> f64 {
    (4 * n - 1) as f64 / 2f64.powf(1.5) * (alpha / 2.0).tan() * (1.0 + beta.sin().powi(2)).sqrt()
}
