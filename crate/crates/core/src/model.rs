//! Model-operator energies: the de Gennes operator and `Θ₀`, the half-space
//! energy `σ(θ)`, wedge upper bounds, the cylinder energy `ℰ(B, ω̂)` and the
//! corner-concentration threshold.
//!
//! All energies are for a unit-strength field unless a norm `‖B‖` is passed;
//! the magnetic Laplacian is homogeneous of degree one in `B`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gauge::{e_constant, MagneticField};
use crate::geometry::{
    cone_face_normal, dot3, face_angle, norm3, scale_section, spherical_vertex_opening, top_edge_opening,
    Point3, Polygon, Section,
};
use crate::linalg::{lanczos_largest, BandCholesky, SymTridiagonal};

/// Truncation of the de Gennes half-line: `[0, max(ξ, 0) + tail]`, step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGennesGrid {
    pub tail: f64,
    pub h: f64,
}

impl Default for DeGennesGrid {
    fn default() -> Self {
        Self { tail: 12.0, h: 0.005 }
    }
}

impl DeGennesGrid {
    pub fn warning(&self) -> Option<String> {
        (self.h > 0.05 || self.tail < 6.0)
            .then(|| format!("coarse de Gennes grid (h = {}, tail = {})", self.h, self.tail))
    }
}

/// Lowest eigenvalue `μ(ξ)` of the de Gennes operator at shift `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeGennesResult {
    pub xi: f64,
    pub mu: f64,
}

/// `μ(ξ)`: lowest eigenvalue of `−u″ + (t − ξ)²` on `ℝ₊`, `u′(0) = 0`.
///
/// Cell-centred nodes `t_j = (j + ½)h` put the Neumann condition on a ghost
/// node (`u₋₁ = u₀`); the far end is Dirichlet.
pub fn degennes_mu(xi: f64, grid: DeGennesGrid) -> Result<DeGennesResult> {
    if !xi.is_finite() || !(grid.h > 0.0) || !(grid.tail > 0.0) {
        return Err(Error::Usage(format!("invalid de Gennes input (xi = {xi}, grid = {grid:?})")));
    }
    let length = xi.max(0.0) + grid.tail;
    let n = (length / grid.h).ceil() as usize;
    if n < 16 {
        return Err(Error::Usage("de Gennes grid needs at least 16 nodes".into()));
    }
    let ih2 = 1.0 / (grid.h * grid.h);
    let diag = (0..n)
        .map(|j| {
            let t = (j as f64 + 0.5) * grid.h;
            let kinetic = if j == 0 { ih2 } else { 2.0 * ih2 };
            kinetic + (t - xi) * (t - xi)
        })
        .collect();
    let mu = SymTridiagonal::new(diag, vec![-ih2; n - 1])?.eigenvalue(0);
    Ok(DeGennesResult { xi, mu })
}

/// `Θ₀ = min_ξ μ(ξ)` by golden-section search on `[0.2, 1.5]`.
pub fn degennes_minimum(grid: DeGennesGrid) -> Result<DeGennesResult> {
    let mu = |xi: f64| degennes_mu(xi, grid).map(|r| r.mu);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.2, 1.5);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (mu(c)?, mu(d)?);
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = mu(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = mu(d)?;
        }
    }
    let xi = 0.5 * (a + b);
    if xi - 0.2 < 1e-6 || 1.5 - xi < 1e-6 {
        return Err(Error::Solver(format!("de Gennes minimum not bracketed (xi = {xi})")));
    }
    degennes_mu(xi, grid)
}

/// `(Θ₀, ξ*)` on the default grid, computed once per process.
pub fn theta0_detail() -> Result<DeGennesResult> {
    static CELL: OnceLock<std::result::Result<DeGennesResult, String>> = OnceLock::new();
    CELL.get_or_init(|| degennes_minimum(DeGennesGrid::default()).map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Solver)
}

/// The de Gennes constant `Θ₀`.
pub fn theta0() -> Result<f64> {
    Ok(theta0_detail()?.mu)
}

/// Finite-difference box for the half-plane model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneGrid {
    /// Side of the square box, in oscillator units.
    pub side: f64,
    pub h: f64,
}

impl Default for HalfPlaneGrid {
    fn default() -> Self {
        Self { side: 20.0, h: 0.1 }
    }
}

impl HalfPlaneGrid {
    /// Warns when the slow direction of the ground state outgrows the box.
    pub fn warning(&self, theta: f64) -> Option<String> {
        if self.h > 0.2 {
            return Some(format!("coarse half-plane grid (h = {})", self.h));
        }
        // the ground state spreads over ~ tan(θ)^{-1/2} along the boundary
        let spread = 6.0 / theta.tan().max(1e-300).sqrt();
        (theta > 0.0 && spread > 0.5 * self.side)
            .then(|| format!("theta = {theta} too small for box side {}; sigma is overestimated", self.side))
    }
}

const SIGMA_SHIFT: f64 = 0.5;

type SigmaKey = (u64, u64, u64);

fn sigma_cache() -> &'static Mutex<HashMap<SigmaKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<SigmaKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `σ(θ)`: ground energy of the half-space with a unit field at angle `θ`
/// to the boundary.
///
/// For `θ > 0` this is the bottom of `−Δ + (t cos θ − s sin θ)²` on the
/// half-plane `t > 0` with Neumann condition at `t = 0`. `σ(0) = Θ₀` comes
/// from the de Gennes solver. Results are memoized per `(θ, grid)`.
pub fn halfspace_sigma(theta: f64, grid: HalfPlaneGrid) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, pi/2], got {theta}")));
    }
    if theta == 0.0 {
        return theta0();
    }
    let key = (theta.to_bits(), grid.side.to_bits(), grid.h.to_bits());
    if let Some(v) = sigma_cache().lock().expect("sigma cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = solve_half_plane(theta, grid)?;
    sigma_cache().lock().expect("sigma cache poisoned").insert(key, v);
    Ok(v)
}

fn solve_half_plane(theta: f64, grid: HalfPlaneGrid) -> Result<f64> {
    if !(grid.h > 0.0) || !(grid.side > 8.0 * grid.h) {
        return Err(Error::Usage(format!("invalid half-plane grid {grid:?}")));
    }
    let h = grid.h;
    let nt = (grid.side / h).round() as usize;
    let ns = nt - 1;
    let (sin, cos) = theta.sin_cos();
    let xi_star = theta0_detail()?.xi;
    // centre the window on the bottom of the well, s tan θ = ξ*
    let s_centre = if theta < FRAC_PI_2 { xi_star * cos / sin } else { 0.0 };
    let s_lo = s_centre - 0.5 * grid.side;
    let t_at = |j: usize| (j as f64 + 0.5) * h;
    let s_at = |k: usize| s_lo + (k + 1) as f64 * h;
    let ih2 = 1.0 / (h * h);
    let n = nt * ns;
    let entry = |i: usize, j: usize| -> f64 {
        if i == j {
            let (k, jt) = (i / nt, i % nt);
            let v = t_at(jt) * cos - s_at(k) * sin;
            let kinetic_t = if jt == 0 { ih2 } else { 2.0 * ih2 };
            kinetic_t + 2.0 * ih2 + v * v - SIGMA_SHIFT
        } else if i - j == nt || (i - j == 1 && !i.is_multiple_of(nt)) {
            -ih2
        } else {
            0.0
        }
    };
    let chol = BandCholesky::factor(n, nt, entry)?;
    let start: Vec<f64> = (0..n)
        .map(|i| {
            let (k, jt) = (i / nt, i % nt);
            let ds = s_at(k) - s_centre;
            let dt = t_at(jt) - xi_star;
            (-0.05 * ds * ds - 0.5 * dt * dt).exp() + 1e-3
        })
        .collect();
    let top = lanczos_largest(
        |x, y| {
            y.copy_from_slice(x);
            chol.solve_in_place(y);
        },
        &start,
        400,
        1e-13,
    )?;
    Ok(SIGMA_SHIFT + 1.0 / top)
}

/// Leading term `‖B‖α/√3` of the wedge ground energy.
///
/// Valid only when `B` lies in the bisector plane of the wedge or is tangent
/// to one of its faces; callers check that with [`wedge_bound_applies`].
pub fn wedge_energy_upper(alpha: f64, b_norm: f64) -> Result<EnergyEstimate> {
    if !(alpha > 0.0 && alpha < 2.0 * PI) {
        return Err(Error::Domain(format!("wedge opening must lie in (0, 2pi), got {alpha}")));
    }
    if !(b_norm >= 0.0) {
        return Err(Error::Domain(format!("field norm must be nonnegative, got {b_norm}")));
    }
    Ok(EnergyEstimate::upper(
        b_norm * alpha / 3f64.sqrt(),
        "wedge leading term; orientation-restricted (bisector plane or tangent to a face)",
    ))
}

/// Whether the wedge leading term applies to field `b` for faces with
/// outward unit normals `n1`, `n2`.
pub fn wedge_bound_applies(b: Point3, n1: Point3, n2: Point3) -> bool {
    let tol = 1e-10 * norm3(b);
    let d = [n1[0] - n2[0], n1[1] - n2[1], n1[2] - n2[2]];
    dot3(b, d).abs() <= tol || dot3(b, n1).abs() <= tol || dot3(b, n2).abs() <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EstimateKind {
    UpperBound,
    LowerBound,
    TwoSided,
}

/// A numeric energy with explicit bound semantics.
///
/// For `TwoSided`, `value` is the upper end (the variational side built
/// from model energies); `lower` carries the user floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnergyEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper: Option<f64>,
    pub source: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

impl EnergyEstimate {
    pub fn upper(value: f64, source: &str) -> Self {
        Self { kind: EstimateKind::UpperBound, value, lower: None, upper: Some(value), source: source.into(), flags: vec![] }
    }

    pub fn lower(value: f64, source: &str) -> Self {
        Self { kind: EstimateKind::LowerBound, value, lower: Some(value), upper: None, source: source.into(), flags: vec![] }
    }

    pub fn two_sided(lower: f64, upper: f64, source: &str) -> Self {
        Self {
            kind: EstimateKind::TwoSided,
            value: upper,
            lower: Some(lower),
            upper: Some(upper),
            source: source.into(),
            flags: vec![],
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lower.unwrap_or(f64::NEG_INFINITY), self.upper.unwrap_or(f64::INFINITY))
    }
}

fn check_floor(c_floor: f64) -> Result<()> {
    if !(c_floor > 0.0 && c_floor <= 1.0) {
        return Err(Error::Usage(format!("cFloor must lie in (0, 1], got {c_floor}")));
    }
    Ok(())
}

/// Half-space face with its outward unit normal.
struct Face {
    normal: Point3,
}

/// Wedge along an edge, with the outward normals of its two faces.
struct Corner {
    index: usize,
    opening: f64,
    n_prev: Point3,
    n_next: Point3,
}

/// Assemble `inf` over interior, faces and corners of the local energies.
fn assemble(
    field: MagneticField,
    faces: &[Face],
    corners: &[Corner],
    c_floor: f64,
    grid: HalfPlaneGrid,
    source: &str,
) -> Result<EnergyEstimate> {
    check_floor(c_floor)?;
    let b = field.as_array();
    let b_norm = field.norm();
    if b_norm == 0.0 {
        let mut est = EnergyEstimate::two_sided(0.0, 0.0, source);
        est.flags.push("degenerate: zero field".into());
        return Ok(est);
    }
    let face_energies = faces
        .par_iter()
        .map(|f| {
            let theta = face_angle(b, f.normal).expect("nonzero field");
            halfspace_sigma(theta.min(FRAC_PI_2), grid).map(|s| s * b_norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    let face_min = face_energies.iter().copied().fold(b_norm, f64::min);
    let mut upper = face_min;
    let mut lower = face_min;
    let mut flags = Vec::new();
    for c in corners {
        let floor = c_floor * b_norm;
        if wedge_bound_applies(b, c.n_prev, c.n_next) {
            let bound = wedge_energy_upper(c.opening, b_norm)?.value;
            upper = upper.min(bound);
            if floor > bound {
                flags.push(format!("vertex {}: cFloor exceeds the wedge upper bound; floor clamped", c.index));
                lower = lower.min(bound);
            } else {
                lower = lower.min(floor);
            }
        } else {
            flags.push(format!("vertex {}: wedge bound orientation-restricted; excluded", c.index));
            lower = lower.min(floor);
        }
    }
    let mut est = EnergyEstimate::two_sided(lower, upper, source);
    est.flags = flags;
    Ok(est)
}

/// Two-sided estimate of `ℰ(B, ω̂)` for the cylinder `ω × ℝ`.
pub fn cylinder_energy(field: MagneticField, section: &Section, c_floor: f64) -> Result<EnergyEstimate> {
    cylinder_energy_with(field, section, c_floor, HalfPlaneGrid::default())
}

pub fn cylinder_energy_with(
    field: MagneticField,
    section: &Section,
    c_floor: f64,
    grid: HalfPlaneGrid,
) -> Result<EnergyEstimate> {
    let poly = section.as_polygon()?;
    let n = poly.len();
    let lift = |v: [f64; 2]| [v[0], v[1], 0.0];
    let faces: Vec<Face> = (0..n).map(|i| Face { normal: lift(poly.outward_normal(i)) }).collect();
    let corners: Vec<Corner> = (0..n)
        .map(|i| Corner {
            index: i,
            opening: poly.interior_angle(i),
            n_prev: faces[(i + n - 1) % n].normal,
            n_next: faces[i].normal,
        })
        .collect();
    assemble(field, &faces, &corners, c_floor, grid, "cylinder: interior |B|, sides sigma(theta)|B|, corners wedge bound / cFloor")
}

/// The same assembly on the cone over `εω` (tangent cones at points of its
/// spherical section), for each `ε`.
pub fn essential_spectrum_limit(
    field: MagneticField,
    section: &Section,
    epsilons: &[f64],
    c_floor: f64,
) -> Result<Vec<(f64, EnergyEstimate)>> {
    let poly = section.as_polygon()?;
    check_floor(c_floor)?;
    if epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Domain("epsilon values must be positive".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Usage("epsilon values must be strictly decreasing".into()));
    }
    epsilons
        .iter()
        .map(|&eps| cone_energy(field, poly, eps, c_floor, HalfPlaneGrid::default()).map(|e| (eps, e)))
        .collect()
}

fn cone_energy(field: MagneticField, poly: &Polygon, eps: f64, c_floor: f64, grid: HalfPlaneGrid) -> Result<EnergyEstimate> {
    let n = poly.len();
    let faces: Vec<Face> = (0..n).map(|i| Face { normal: cone_face_normal(poly, i, eps) }).collect();
    let corners = (0..n)
        .map(|i| {
            Ok(Corner {
                index: i,
                opening: spherical_vertex_opening(poly, i, eps)?,
                n_prev: faces[(i + n - 1) % n].normal,
                n_next: faces[i].normal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(field, &faces, &corners, c_floor, grid, "cone: interior |B|, faces sigma(theta)|B|, edges wedge bound / cFloor")
}

/// `ε* = min(cFloor, ½)‖B‖ / (3 e(B, ω))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcentrationThreshold {
    pub epsilon_star: f64,
    pub floor_used: f64,
    pub e_constant: f64,
    /// `e(B, ω) = 0`: the vertex bound vanishes and every `ε` qualifies.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcentrationVerdict {
    pub epsilon: f64,
    pub epsilon_star: f64,
    pub floor_used: f64,
    pub vertex_bound: f64,
    pub holds: bool,
}

impl ConcentrationThreshold {
    pub fn verdict(&self, eps: f64) -> ConcentrationVerdict {
        let vertex_bound = 3.0 * eps * self.e_constant;
        ConcentrationVerdict {
            epsilon: eps,
            epsilon_star: self.epsilon_star,
            floor_used: self.floor_used,
            vertex_bound,
            holds: vertex_bound < self.floor_used,
        }
    }
}

pub fn concentration_threshold(field: MagneticField, section: &Section, c_floor: f64) -> Result<ConcentrationThreshold> {
    check_floor(c_floor)?;
    let e = e_constant(field, &section.moments());
    let floor_used = c_floor.min(0.5) * field.norm();
    let degenerate = e == 0.0;
    let epsilon_star = if degenerate { f64::INFINITY } else { floor_used / (3.0 * e) };
    Ok(ConcentrationThreshold { epsilon_star, floor_used, e_constant: e, degenerate })
}

/// Edge openings of `Ω(ε) = C_{εω} ∩ {x₃ < 1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TruncatedEdges {
    pub epsilon: f64,
    /// Dihedral angles along the cone edges through the vertices.
    pub lateral: Vec<f64>,
    /// Dihedral angles between each lateral face and the top face.
    pub top: Vec<f64>,
}

impl TruncatedEdges {
    /// Largest `β₀` with `β₀ ≤ α ≤ 2π − β₀` for every edge.
    pub fn beta0_max(&self) -> f64 {
        self.lateral
            .iter()
            .chain(&self.top)
            .map(|a| a.min(2.0 * PI - a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn certifies(&self, beta0: f64) -> bool {
        self.lateral.iter().chain(&self.top).all(|&a| beta0 <= a && a <= 2.0 * PI - beta0)
    }
}

pub fn truncated_domain_edges(section: &Section, eps: f64) -> Result<TruncatedEdges> {
    let poly = section.as_polygon()?;
    scale_section(section, eps)?;
    let lateral = (0..poly.len())
        .map(|i| spherical_vertex_opening(poly, i, eps))
        .collect::<Result<Vec<_>>>()?;
    let top = (0..poly.len()).map(|i| top_edge_opening(poly, i, eps)).collect();
    Ok(TruncatedEdges { epsilon: eps, lateral, top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disc;

    fn square() -> Section {
        Section::Polygon(Polygon::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap())
    }

    #[test]
    fn degennes_at_zero_is_oscillator_ground_state() {
        let r = degennes_mu(0.0, DeGennesGrid::default()).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-4, "{}", r.mu);
        assert!(degennes_mu(-5.0, DeGennesGrid::default()).unwrap().mu > 25.0);
    }

    #[test]
    fn theta0_value_and_identity() {
        let r = theta0_detail().unwrap();
        assert!(r.mu > 0.5900 && r.mu < 0.5903, "{}", r.mu);
        assert!((r.mu - r.xi * r.xi).abs() < 1e-4);
        let d = 1e-4;
        let g = DeGennesGrid::default();
        let slope = (degennes_mu(r.xi + d, g).unwrap().mu - degennes_mu(r.xi - d, g).unwrap().mu) / (2.0 * d);
        assert!(slope.abs() < 1e-4);
    }

    #[test]
    fn sigma_endpoints() {
        let g = HalfPlaneGrid::default();
        assert!((halfspace_sigma(FRAC_PI_2, g).unwrap() - 1.0).abs() < 1e-2);
        assert_eq!(halfspace_sigma(0.0, g).unwrap(), theta0().unwrap());
        assert!(matches!(halfspace_sigma(-0.1, g), Err(Error::Domain(_))));
        assert!(matches!(halfspace_sigma(2.0, g), Err(Error::Domain(_))));
    }

    #[test]
    fn wedge_examples() {
        let w = wedge_energy_upper(PI / 3.0, 1.0).unwrap();
        assert!((w.value - 0.604_599_788_078_072_6).abs() < 1e-12);
        assert_eq!(w.kind, EstimateKind::UpperBound);
        assert!(w.source.contains("orientation-restricted"));
        assert!((wedge_energy_upper(3f64.sqrt(), 2.5).unwrap().value - 2.5).abs() < 1e-15);
        assert!(wedge_energy_upper(0.0, 1.0).is_err());
    }

    #[test]
    fn cylinder_axial_square() {
        let th0 = theta0().unwrap();
        let e = cylinder_energy(MagneticField::new(0.0, 0.0, 1.0), &square(), 0.3).unwrap();
        assert!(e.value <= th0 + 1e-15);
        assert!((e.lower.unwrap() - 0.3).abs() < 1e-15);
        assert!(cylinder_energy(MagneticField::new(0.0, 0.0, 1.0), &square(), 0.0).is_err());
        let disc = Section::Disc(Disc::new([0.0, 0.0], 1.0).unwrap());
        assert!(cylinder_energy(MagneticField::new(0.0, 0.0, 1.0), &disc, 0.5).is_err());
    }

    #[test]
    fn floor_above_wedge_bound_is_clamped() {
        let tri = Section::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap());
        let e = cylinder_energy(MagneticField::new(0.0, 0.0, 1.0), &tri, 1.0).unwrap();
        let (lo, hi) = e.interval();
        assert!(lo <= hi);
        assert!(e.flags.iter().any(|f| f.contains("clamped")));
    }

    #[test]
    fn concentration_disc() {
        let disc = Section::Disc(Disc::new([0.0, 0.0], 1.0).unwrap());
        let c = concentration_threshold(MagneticField::new(0.0, 0.0, 1.0), &disc, 1.0).unwrap();
        assert!((c.epsilon_star - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(c.verdict(0.5 * c.epsilon_star).holds);
        assert!(!c.verdict(1.01 * c.epsilon_star).holds);
        let c2 = concentration_threshold(MagneticField::new(0.0, 0.0, 2.0), &disc, 1.0).unwrap();
        assert!((c2.epsilon_star - c.epsilon_star).abs() < 1e-15);
        let c4 = concentration_threshold(MagneticField::new(0.0, 0.0, 1.0), &disc, 0.4).unwrap();
        assert!((c4.epsilon_star - 0.4 / (3.0 * c.e_constant)).abs() < 1e-15);
        let z = concentration_threshold(MagneticField::new(0.0, 0.0, 0.0), &disc, 1.0).unwrap();
        assert!(z.degenerate && z.epsilon_star.is_infinite());
    }

    #[test]
    fn truncated_edges_square_and_triangle() {
        let e = truncated_domain_edges(&square(), 0.3).unwrap();
        assert!(e.certifies(0.3));
        let small = truncated_domain_edges(&square(), 1e-4).unwrap();
        for a in small.lateral.iter().chain(&small.top) {
            assert!((a - FRAC_PI_2).abs() < 1e-3);
        }
        let tri = Section::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap());
        let t = truncated_domain_edges(&tri, 1e-5).unwrap();
        for (a, b) in t.lateral.iter().zip([FRAC_PI_2, PI / 4.0, PI / 4.0]) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}
