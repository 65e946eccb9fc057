//! Plane sections, their second moments, and the geometry of the cones and
//! cylinders built over them.
//!
//! A section `ω` lives in the plane `x₃ = 1`; the cone over it is
//! `{x₃ > 0, (x₁/x₃, x₂/x₃) ∈ ω}` and the cylinder is `ω × ℝ`. Coordinates
//! supplied by the caller are authoritative: the bound constant depends on
//! the choice of the `x₃` axis, so sections are never recentred implicitly.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// Vertices closer than this fraction of the diameter are treated as repeated.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Simple polygon, stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
    reversed: bool,
}

impl Polygon {
    /// Validate and normalize a vertex list. Clockwise input is reversed and
    /// the fact recorded in [`Polygon::was_reversed`].
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Geometry("polygon has non-finite coordinates".into()));
        }
        let diam = diameter(&vertices);
        if diam == 0.0 {
            return Err(Error::Geometry("polygon collapses to a point".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if dist(vertices[i], vertices[j]) <= DEGENERACY_TOLERANCE * diam {
                return Err(Error::Geometry(format!("repeated vertex at index {j}")));
            }
        }
        let area = signed_area(&vertices);
        if area.abs() <= DEGENERACY_TOLERANCE * diam * diam {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        check_simple(&vertices, diam)?;
        let reversed = area < 0.0;
        if reversed {
            vertices.reverse();
        }
        Ok(Self { vertices, reversed })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`.
    pub fn regular(n: usize, center: Point2, r: f64) -> Result<Self> {
        let vs = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                [center[0] + r * a.cos(), center[1] + r * a.sin()]
            })
            .collect();
        Self::new(vs)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the input was clockwise and has been reversed.
    pub fn was_reversed(&self) -> bool {
        self.reversed
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    /// Unit outward normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> Point2 {
        let (p, q) = self.edge(i);
        let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
        let l = ex.hypot(ey);
        [ey / l, -ex / l]
    }

    /// Interior angle at vertex `i`, in `(0, 2π)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let v = self.vertices[i % n];
        let p = self.vertices[(i + n - 1) % n];
        let q = self.vertices[(i + 1) % n];
        ccw_angle([q[0] - v[0], q[1] - v[1]], [p[0] - v[0], p[1] - v[1]])
    }

    pub fn centroid(&self) -> Point2 {
        let a = self.area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..self.len() {
            let (p, q) = self.edge(i);
            let c = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    /// Even–odd point-in-polygon test (boundary points are unspecified).
    pub fn contains(&self, x: Point2) -> bool {
        let mut inside = false;
        for i in 0..self.len() {
            let (p, q) = self.edge(i);
            if (p[1] > x[1]) != (q[1] > x[1]) {
                let t = (x[1] - p[1]) / (q[1] - p[1]);
                if x[0] < p[0] + t * (q[0] - p[0]) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn scaled(&self, eps: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| [eps * v[0], eps * v[1]]).collect(),
            reversed: self.reversed,
        }
    }

    fn translated(&self, d: Point2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| [v[0] + d[0], v[1] + d[1]]).collect(),
            reversed: self.reversed,
        }
    }

    fn rotated(&self, angle: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| rotate(v, angle)).collect(),
            reversed: self.reversed,
        }
    }
}

/// Disc kept in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    center: Point2,
    radius: f64,
}

impl Disc {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Geometry(format!("disc radius must be positive, got {radius}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Geometry("disc center is not finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Polygon(Polygon),
    Disc(Disc),
}

impl Section {
    pub fn moments(&self) -> Moments {
        match self {
            Section::Polygon(p) => polygon_moments(p),
            Section::Disc(d) => disc_moments(d),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Section::Polygon(p) => p.area(),
            Section::Disc(d) => d.area(),
        }
    }

    /// Centroid of the section; reported so callers can recentre deliberately.
    pub fn centroid(&self) -> Point2 {
        match self {
            Section::Polygon(p) => p.centroid(),
            Section::Disc(d) => d.center,
        }
    }

    pub fn contains(&self, x: Point2) -> bool {
        match self {
            Section::Polygon(p) => p.contains(x),
            Section::Disc(d) => dist(x, d.center) < d.radius,
        }
    }

    pub fn as_polygon(&self) -> Result<&Polygon> {
        match self {
            Section::Polygon(p) => Ok(p),
            Section::Disc(_) => Err(Error::Usage("operation requires a polygonal section".into())),
        }
    }

    pub fn translated(&self, d: Point2) -> Section {
        match self {
            Section::Polygon(p) => Section::Polygon(p.translated(d)),
            Section::Disc(c) => Section::Disc(Disc {
                center: [c.center[0] + d[0], c.center[1] + d[1]],
                radius: c.radius,
            }),
        }
    }

    /// Rotation about the origin of the `(x₁, x₂)` plane.
    pub fn rotated(&self, angle: f64) -> Section {
        match self {
            Section::Polygon(p) => Section::Polygon(p.rotated(angle)),
            Section::Disc(c) => Section::Disc(Disc { center: rotate(c.center, angle), radius: c.radius }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SectionSpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn to_spec(&self) -> SectionSpec {
        match self {
            Section::Polygon(p) => SectionSpec::Polygon(p.vertices.clone()),
            Section::Disc(d) => SectionSpec::Disc { center: d.center, radius: d.radius },
        }
    }
}

/// Wire form of a section: `{"polygon": [[x, y], ...]}` or
/// `{"disc": {"center": [x, y], "radius": r}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SectionSpec {
    Polygon(Vec<Point2>),
    Disc { center: Point2, radius: f64 },
}

impl SectionSpec {
    pub fn build(&self) -> Result<Section> {
        match self {
            SectionSpec::Polygon(v) => Ok(Section::Polygon(Polygon::new(v.clone())?)),
            SectionSpec::Disc { center, radius } => Ok(Section::Disc(Disc::new(*center, *radius)?)),
        }
    }
}

/// Second moments `M_k = ∫_ω x₁ᵏ x₂²⁻ᵏ` and their area-normalized versions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub area: f64,
    #[serde(rename = "M0")]
    pub raw0: f64,
    #[serde(rename = "M1")]
    pub raw1: f64,
    #[serde(rename = "M2")]
    pub raw2: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl Moments {
    pub fn from_raw(area: f64, raw0: f64, raw1: f64, raw2: f64) -> Self {
        Self {
            area,
            raw0,
            raw1,
            raw2,
            m0: raw0 / area,
            m1: raw1 / area,
            m2: raw2 / area,
        }
    }

    /// `M₀M₂ − M₁²`, the Gram determinant of `(x₂, x₁)` over `ω`.
    pub fn gram(&self) -> f64 {
        self.raw0 * self.raw2 - self.raw1 * self.raw1
    }

    pub fn normalized_gram(&self) -> f64 {
        self.m0 * self.m2 - self.m1 * self.m1
    }
}

/// Exact moments by per-edge Green's theorem antiderivatives.
pub fn polygon_moments(poly: &Polygon) -> Moments {
    let (mut a, mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..poly.len() {
        let ([x0, y0], [x1, y1]) = poly.edge(i);
        let c = x0 * y1 - x1 * y0;
        a += c;
        xx += c * (x0 * x0 + x0 * x1 + x1 * x1);
        yy += c * (y0 * y0 + y0 * y1 + y1 * y1);
        xy += c * (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0);
    }
    Moments::from_raw(a / 2.0, yy / 12.0, xy / 24.0, xx / 12.0)
}

/// Closed-form disc moments (parallel-axis shift for off-centre discs).
pub fn disc_moments(disc: &Disc) -> Moments {
    let area = disc.area();
    let r2 = disc.radius * disc.radius;
    let [c1, c2] = disc.center;
    Moments::from_raw(
        area,
        area * (r2 / 4.0 + c2 * c2),
        area * c1 * c2,
        area * (r2 / 4.0 + c1 * c1),
    )
}

/// `ω ↦ εω`.
pub fn scale_section(section: &Section, eps: f64) -> Result<Section> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("scale factor must be positive, got {eps}")));
    }
    Ok(match section {
        Section::Polygon(p) => Section::Polygon(p.scaled(eps)),
        Section::Disc(d) => Section::Disc(Disc {
            center: [eps * d.center[0], eps * d.center[1]],
            radius: eps * d.radius,
        }),
    })
}

/// Local model at a point of the cylinder `ω × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum TangentSubstructure {
    /// Full space.
    Interior,
    /// Half-space bounded by the face over edge `edge`.
    #[serde(rename_all = "camelCase")]
    Side { edge: usize, outward_normal: Point2 },
    /// Wedge along the vertical line over vertex `vertex`.
    #[serde(rename_all = "camelCase")]
    Vertex { vertex: usize, opening: f64 },
}

impl TangentSubstructure {
    /// Unsigned angle in `[0, π/2]` between a field and the side's boundary
    /// plane. `None` for non-sides and for the zero field.
    pub fn side_angle(&self, b: Point3) -> Option<f64> {
        match self {
            TangentSubstructure::Side { outward_normal: n, .. } => {
                face_angle(b, [n[0], n[1], 0.0])
            }
            _ => None,
        }
    }
}

/// Unsigned angle between `b` and the plane with unit normal `n`.
pub fn face_angle(b: Point3, n: Point3) -> Option<f64> {
    let bn = norm3(b);
    if bn == 0.0 {
        return None;
    }
    let s = (dot3(b, n).abs() / (bn * norm3(n))).min(1.0);
    Some(s.asin())
}

/// Interior, sides and vertices of the cylinder over a polygon.
pub fn tangent_substructures(poly: &Polygon) -> Result<Vec<TangentSubstructure>> {
    let n = poly.len();
    let mut out = Vec::with_capacity(2 * n + 1);
    out.push(TangentSubstructure::Interior);
    for i in 0..n {
        out.push(TangentSubstructure::Side { edge: i, outward_normal: poly.outward_normal(i) });
    }
    for i in 0..n {
        let opening = poly.interior_angle(i);
        check_opening(opening, i)?;
        out.push(TangentSubstructure::Vertex { vertex: i, opening });
    }
    Ok(out)
}

fn check_opening(opening: f64, i: usize) -> Result<()> {
    const TOL: f64 = 1e-12;
    if opening <= TOL || opening >= 2.0 * PI - TOL || (opening - PI).abs() <= TOL {
        return Err(Error::Geometry(format!(
            "degenerate corner at vertex {i} (opening {opening})"
        )));
    }
    Ok(())
}

/// `P(x', t) = t (x', 1) / ‖(x', 1)‖`.
pub fn project_p(x: Point2, t: f64) -> Point3 {
    let r = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
    [t * x[0] / r, t * x[1] / r, t / r]
}

/// Jacobian of `P` at `(x', t)` by central finite differences.
pub fn projection_jacobian(x: Point2, t: f64, step: f64) -> [[f64; 3]; 3] {
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut a = [x[0], x[1], t];
        let mut b = a;
        a[col] += step;
        b[col] -= step;
        let fa = project_p([a[0], a[1]], a[2]);
        let fb = project_p([b[0], b[1]], b[2]);
        for row in 0..3 {
            jac[row][col] = (fa[row] - fb[row]) / (2.0 * step);
        }
    }
    jac
}

/// Frobenius norm of `d_{(x',1)}P − Id`.
pub fn jacobian_deviation(x: Point2, step: f64) -> f64 {
    let j = projection_jacobian(x, 1.0, step);
    let mut s = 0.0;
    for (r, row) in j.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let d = v - if r == c { 1.0 } else { 0.0 };
            s += d * d;
        }
    }
    s.sqrt()
}

/// Maximum Jacobian deviation over the vertices of `εω` and a `grid × grid`
/// lattice of its interior points.
pub fn max_jacobian_deviation(poly: &Polygon, eps: f64, grid: usize, step: f64) -> Result<f64> {
    let section = scale_section(&Section::Polygon(poly.clone()), eps)?;
    let scaled = section.as_polygon()?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in scaled.vertices() {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let mut worst = scaled
        .vertices()
        .iter()
        .map(|&v| jacobian_deviation(v, step))
        .fold(0.0, f64::max);
    for i in 0..=grid {
        for j in 0..=grid {
            let x = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / grid as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / grid as f64,
            ];
            if scaled.contains(x) {
                worst = worst.max(jacobian_deviation(x, step));
            }
        }
    }
    Ok(worst)
}

/// Lift of vertex `i` of `εω` to the plane `x₃ = 1`.
fn lifted(poly: &Polygon, i: usize, eps: f64) -> Point3 {
    let v = poly.vertices[i % poly.len()];
    [eps * v[0], eps * v[1], 1.0]
}

/// Opening of the tangent wedge to the cone over `εω` along the edge
/// generated by vertex `i`: the dihedral angle between the two adjacent
/// faces, measured through the interior.
pub fn spherical_vertex_opening(poly: &Polygon, i: usize, eps: f64) -> Result<f64> {
    let n = poly.len();
    if i >= n {
        return Err(Error::Usage(format!("vertex index {i} out of range for {n} vertices")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("scale factor must be positive, got {eps}")));
    }
    let d = normalize3(lifted(poly, i, eps));
    let prev = reject(lifted(poly, i + n - 1, eps), d);
    let next = reject(lifted(poly, i + 1, eps), d);
    if norm3(prev) == 0.0 || norm3(next) == 0.0 {
        return Err(Error::Geometry(format!("degenerate edges at vertex {i}")));
    }
    let s = dot3(d, cross3(next, prev));
    let c = dot3(next, prev);
    let opening = s.atan2(c).rem_euclid(2.0 * PI);
    check_opening(opening, i)?;
    Ok(opening)
}

/// Unit outward normal of the cone face spanned by vertices `i`, `i + 1` of `εω`.
pub fn cone_face_normal(poly: &Polygon, i: usize, eps: f64) -> Point3 {
    let c = cross3(lifted(poly, i, eps), lifted(poly, i + 1, eps));
    let n = normalize3(c);
    [-n[0], -n[1], -n[2]]
}

/// Unit direction of the cone edge through vertex `i` of `εω`.
pub fn cone_edge_direction(poly: &Polygon, i: usize, eps: f64) -> Point3 {
    normalize3(lifted(poly, i, eps))
}

/// Dihedral angle, inside `C_{εω} ∩ {x₃ < 1}`, between the lateral face over
/// edge `i` and the top face `x₃ = 1`.
pub fn top_edge_opening(poly: &Polygon, i: usize, eps: f64) -> f64 {
    let p = lifted(poly, i, eps);
    let q = lifted(poly, i + 1, eps);
    let e = normalize3([q[0] - p[0], q[1] - p[1], 0.0]);
    let nout = poly.outward_normal(i);
    // in the top face, pointing into the section
    let inward_top = [-nout[0], -nout[1], 0.0];
    // in the lateral face, pointing toward the apex
    let down = normalize3(reject([-p[0], -p[1], -p[2]], e));
    dot3(inward_top, down).clamp(-1.0, 1.0).acos()
}

pub(crate) fn dot3(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: Point3) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn cross3(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize3(a: Point3) -> Point3 {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Component of `a` orthogonal to the unit vector `d`.
fn reject(a: Point3, d: Point3) -> Point3 {
    let s = dot3(a, d);
    [a[0] - s * d[0], a[1] - s * d[1], a[2] - s * d[2]]
}

pub(crate) fn rotate(v: Point2, angle: f64) -> Point2 {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Counterclockwise angle from `a` to `b`, in `[0, 2π)`.
fn ccw_angle(a: Point2, b: Point2) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    cross.atan2(dot).rem_euclid(2.0 * PI)
}

fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn diameter(v: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            d = d.max(dist(v[i], v[j]));
        }
    }
    d
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_touch(a: Point2, b: Point2, c: Point2, d: Point2, tol: f64) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let sign = |x: f64| if x > tol { 1 } else if x < -tol { -1 } else { 0 };
    let (s1, s2, s3, s4) = (sign(o1), sign(o2), sign(o3), sign(o4));
    if s1 * s2 < 0 && s3 * s4 < 0 {
        return true;
    }
    (s1 == 0 && on_segment(a, b, c))
        || (s2 == 0 && on_segment(a, b, d))
        || (s3 == 0 && on_segment(c, d, a))
        || (s4 == 0 && on_segment(c, d, b))
}

fn check_simple(v: &[Point2], diam: f64) -> Result<()> {
    let n = v.len();
    let tol = DEGENERACY_TOLERANCE * diam * diam;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // adjacent edges folding back onto each other
        let c = v[(i + 2) % n];
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        if orient(a, b, c).abs() <= tol && e1[0] * e2[0] + e1[1] * e2[1] < 0.0 {
            return Err(Error::Geometry(format!("polygon folds back at vertex {}", (i + 1) % n)));
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            if segments_touch(a, b, c, d, tol) {
                return Err(Error::Geometry(format!("edges {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}
