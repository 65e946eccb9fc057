//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process exits nonzero if any criterion fails, except those listed in
//! `KNOWN_UNATTAINABLE`, which are still evaluated and reported as FAIL.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conebounds_core::gauge::{
    brute_force_gauge, e_constant, optimal_gauge, optimal_transverse_gauge, rayleigh_upper_bounds, MagneticField,
    TransverseGauge,
};
use conebounds_core::geometry::{
    max_jacobian_deviation, scale_section, spherical_vertex_opening, Disc, Moments, Polygon, Section,
};
use conebounds_core::model::{
    concentration_threshold, cylinder_energy, degennes_minimum, essential_spectrum_limit, halfspace_sigma, theta0,
    truncated_domain_edges, DeGennesGrid, HalfPlaneGrid,
};
use conebounds_core::reduced::{cone_quotient_consistency, fd_halfline_spectrum, lambda_from_gauge, GridSpec, Profile};
use conebounds_core::robin::{robin_cone_upper_bound, robin_model_energy, robin_scaling_exponent, BoundaryProfile, RobinModel};

/// Vertex openings of the cone over `εω` deviate from the planar angles at
/// order ε², not ε: the central projection onto the sphere distorts angles
/// only at second order near the axis.
const KNOWN_UNATTAINABLE: &[&str] = &["11b"];

const SEED: u64 = 20_140_917;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, id: &str, title: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {title}: {detail}");
        if !pass {
            self.failures.push(id.to_string());
        }
    }
}

fn unit_disc() -> Section {
    Section::Disc(Disc::new([0.0, 0.0], 1.0).unwrap())
}

fn square() -> Section {
    Section::Polygon(Polygon::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap())
}

fn triangle() -> Section {
    Section::Polygon(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap())
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Least-squares slope of `log y` against `log x`.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Star-shaped polygon around a random centre, hence simple.
fn random_polygon(rng: &mut ChaCha8Rng) -> Polygon {
    let k = rng.gen_range(3..=8);
    let centre = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    let twist = rng.gen_range(0.0..2.0 * PI);
    let vertices = (0..k)
        .map(|i| {
            let t = twist + 2.0 * PI * (i as f64 + rng.gen_range(-0.3..0.3)) / k as f64;
            let r = rng.gen_range(0.3..2.0);
            [centre[0] + r * t.cos(), centre[1] + r * t.sin()]
        })
        .collect();
    Polygon::new(vertices).unwrap()
}

fn random_field(rng: &mut ChaCha8Rng) -> MagneticField {
    MagneticField::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn disc_bound(g: &mut Gate) {
    let start = Instant::now();
    let m = unit_disc().moments();
    let res = rayleigh_upper_bounds(MagneticField::new(0.0, 0.0, 1.0), &m, 3).unwrap();
    let elapsed = start.elapsed();
    let e_exact = 1.0 / (2.0 * 2f64.sqrt());
    let mut err = (res.e_constant - e_exact).abs();
    for &(n, b) in &res.bounds {
        err = err.max((b - (4 * n - 1) as f64 * e_exact).abs());
    }
    let ms = elapsed.as_secs_f64() * 1e3;
    g.check(
        "01",
        "disc bound",
        err <= 1e-12 && ms < 1.0,
        format!("e = {:.15}, max error {err:.1e} (tol 1e-12), runtime {ms:.3} ms (limit 1 ms)", res.e_constant),
    );
}

fn circular_cone_limit(g: &mut Gate) {
    let alpha: f64 = 0.01;
    let mut worst: f64 = 0.0;
    for beta in [0.0, PI / 4.0, FRAC_PI_2] {
        let disc = Section::Disc(Disc::new([0.0, 0.0], (0.5 * alpha).tan()).unwrap());
        let field = MagneticField::new(0.0, beta.sin(), beta.cos());
        let bound = rayleigh_upper_bounds(field, &disc.moments(), 1).unwrap().bounds[0].1;
        let limit = 3.0 / 2f64.powf(2.5) * (1.0 + beta.sin().powi(2)).sqrt();
        worst = worst.max(rel(bound / alpha, limit));
    }
    g.check(
        "02",
        "circular cone small-aperture limit",
        worst <= 0.01,
        format!("alpha = 0.01, beta in {{0, pi/4, pi/2}}, worst relative gap {worst:.2e} (tol 1e-2)"),
    );
}

fn rectangle_formulas(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let l = rng.gen_range(0.05..3.0);
        let big_l = rng.gen_range(0.05..3.0);
        let f = random_field(&mut rng);
        let rect = Section::Polygon(Polygon::rectangle(-l, l, -big_l, big_l).unwrap());
        let res = rayleigh_upper_bounds(f, &rect.moments(), 3).unwrap();
        let q = f.b3 * f.b3 * l * l * big_l * big_l / (l * l + big_l * big_l) + f.b1 * f.b1 * big_l * big_l + f.b2 * f.b2 * l * l;
        for &(n, b) in &res.bounds {
            worst = worst.max(rel(b, (4 * n - 1) as f64 / 3f64.sqrt() * q.sqrt()));
        }
        let sq = Section::Polygon(Polygon::rectangle(-l, l, -l, l).unwrap());
        let res = rayleigh_upper_bounds(f, &sq.moments(), 3).unwrap();
        let q = f.b3 * f.b3 / 2.0 + f.b1 * f.b1 + f.b2 * f.b2;
        let area = 4.0 * l * l;
        for &(n, b) in &res.bounds {
            let k = (4 * n - 1) as f64;
            worst = worst.max(rel(b, k / 3f64.sqrt() * l * q.sqrt()));
            worst = worst.max(rel(b, k / 2.0 * (area / 3.0).sqrt() * q.sqrt()));
        }
    }
    g.check(
        "03",
        "rectangle and square closed forms",
        worst <= 1e-12,
        format!("20 random (l, L, B) triples, n = 1..3, worst relative error {worst:.1e} (tol 1e-12)"),
    );
}

/// Minimizer of `‖[[α, β], [1 + β, γ]] x‖²` from the normal equations,
/// solved by Cramer's rule.
fn normal_equation_gauge(m: &Moments) -> TransverseGauge {
    let (m0, m1, m2) = (m.raw0, m.raw1, m.raw2);
    // rows: ∂α, ∂β, ∂γ of F / 2
    let a = [[m2, m1, 0.0], [m1, m0 + m2, m1], [0.0, m1, m0]];
    let r = [0.0, -m2, -m1];
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det3(a);
    let mut p = [0.0; 3];
    for (k, pk) in p.iter_mut().enumerate() {
        let mut ak = a;
        for i in 0..3 {
            ak[i][k] = r[i];
        }
        *pk = det3(ak) / d;
    }
    TransverseGauge::new(p[0], p[1], 1.0 + p[1], p[2])
}

fn optimizer_equivalence(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut entry_err: f64 = 0.0;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..50 {
        let m = Section::Polygon(random_polygon(&mut rng)).moments();
        let closed = optimal_transverse_gauge(&m).unwrap();
        for oracle in [normal_equation_gauge(&m), brute_force_gauge(&m).unwrap()] {
            for (x, y) in closed.matrix().iter().flatten().zip(oracle.matrix().iter().flatten()) {
                entry_err = entry_err.max((x - y).abs());
            }
        }
        let best = closed.norm_sq(&m);
        for _ in 0..100 {
            let scale = 10f64.powf(rng.gen_range(-4.0..0.0));
            let (da, db, dd) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // c − b is kept fixed, so the perturbed gauge stays admissible
            let p = TransverseGauge::new(closed.a + scale * da, closed.b + scale * db, closed.c + scale * db, closed.d + scale * dd);
            worst_gap = worst_gap.min(p.norm_sq(&m) - best);
        }
    }
    g.check(
        "04",
        "optimal gauge equals normal-equation oracle",
        entry_err <= 1e-10 && worst_gap >= -1e-12,
        format!(
            "50 random polygons, max entry error {entry_err:.1e} (tol 1e-10), min perturbation gain {worst_gap:.1e} (tol -1e-12)"
        ),
    );
}

/// Five-point Gauss-Legendre rule on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Cubature nodes and weights, exact for polynomials of degree ≤ 4 per
/// variable on each test section.
fn cubature(section: &str) -> Vec<([f64; 2], f64)> {
    let mut out = Vec::new();
    match section {
        "square" => {
            for &(x, wx) in &GL5 {
                for &(y, wy) in &GL5 {
                    out.push(([x, y], wx * wy));
                }
            }
        }
        "triangle" => {
            // Duffy map (u, v) ↦ (u(1 − v), uv) of [0,1]² onto the unit triangle
            for &(s, ws) in &GL5 {
                for &(t, wt) in &GL5 {
                    let (u, v) = (0.5 * (s + 1.0), 0.5 * (t + 1.0));
                    out.push(([u * (1.0 - v), u * v], 0.25 * ws * wt * u));
                }
            }
        }
        "disc" => {
            let k = 16;
            for &(s, ws) in &GL5 {
                let r = 0.5 * (s + 1.0);
                for j in 0..k {
                    let t = 2.0 * PI * j as f64 / k as f64;
                    out.push(([r * t.cos(), r * t.sin()], 0.5 * ws * r * 2.0 * PI / k as f64));
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

fn gram_identity(g: &mut Gate) {
    let mut worst: f64 = 0.0;
    for (name, section) in [("disc", unit_disc()), ("square", square()), ("triangle", triangle())] {
        let rule = cubature(name);
        let mut double = 0.0;
        for (x, wx) in &rule {
            for (y, wy) in &rule {
                let c = x[0] * y[1] - y[0] * x[1];
                double += wx * wy * c * c;
            }
        }
        worst = worst.max(rel(section.moments().gram(), 0.5 * double));
    }
    g.check(
        "05",
        "Gram identity against double-integral cubature",
        worst <= 1e-6,
        format!("disc, square, triangle, worst relative error {worst:.1e} (tol 1e-6)"),
    );
}

fn reduced_spectrum(g: &mut Gate) {
    let start = Instant::now();
    let fd = fd_halfline_spectrum(1.0, GridSpec::default_for(1.0), 3).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = fd.values.iter().zip([3.0, 7.0, 11.0]).map(|(v, e)| (v - e).abs()).fold(0.0, f64::max);
    let ns = [250usize, 500, 1000, 2000];
    let errors: Vec<f64> = ns
        .iter()
        .map(|&n| (fd_halfline_spectrum(1.0, GridSpec::new(12.0, n).unwrap(), 1).unwrap().values[0] - 3.0).abs())
        .collect();
    let steps: Vec<f64> = ns.iter().map(|&n| 12.0 / (n + 1) as f64).collect();
    let order = log_slope(&steps, &errors);
    g.check(
        "06",
        "reduced 1D spectrum",
        err <= 1e-3 && secs < 5.0 && (order - 2.0).abs() <= 0.5,
        format!("max |E_n - (3, 7, 11)| = {err:.1e} (tol 1e-3), runtime {secs:.3} s (limit 5 s), order {order:.3} (2 +- 0.5)"),
    );
}

fn quotient_consistency(g: &mut Gate) {
    let field = MagneticField::new(0.2, -0.3, 1.0);
    let mut worst: f64 = 0.0;
    let mut lambdas = Vec::new();
    for section in [unit_disc(), triangle()] {
        let gauge = optimal_gauge(field, &section.moments()).unwrap();
        lambdas.push(lambda_from_gauge(&gauge, &section).unwrap());
        for profile in [Profile::Gaussian { width: 1.0 }, Profile::Exponential { rate: 1.5 }] {
            let (lhs, rhs) = cone_quotient_consistency(profile, &gauge, &section, None).unwrap();
            worst = worst.max(rel(lhs, rhs));
        }
    }
    g.check(
        "07",
        "3D cone quotient equals weighted 1D quotient",
        worst <= 1e-4,
        format!("2 profiles x 2 sections (lambda = {}), worst relative gap {worst:.1e} (tol 1e-4)", sci(&lambdas)),
    );
}

fn norm_and_homogeneity(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let sections = [unit_disc(), square(), triangle(), Section::Polygon(random_polygon(&mut rng))];
    let mut violations = 0usize;
    let mut hom: f64 = 0.0;
    for s in &sections {
        let m = s.moments();
        for _ in 0..1000 {
            let (b, c) = (random_field(&mut rng), random_field(&mut rng));
            let sum = MagneticField::new(b.b1 + c.b1, b.b2 + c.b2, b.b3 + c.b3);
            if e_constant(sum, &m) > e_constant(b, &m) + e_constant(c, &m) + 1e-12 {
                violations += 1;
            }
        }
        for eps in [0.1, 2.0] {
            let scaled = scale_section(s, eps).unwrap().moments();
            for _ in 0..20 {
                let b = random_field(&mut rng);
                hom = hom.max(rel(e_constant(b, &scaled), eps * e_constant(b, &m)));
            }
        }
    }
    g.check(
        "08",
        "norm axioms and homogeneity of e",
        violations == 0 && hom <= 1e-14,
        format!("triangle inequality violations {violations} of 4000, homogeneity relative error {hom:.1e} (tol 1e-14)"),
    );
}

fn theta0_value(g: &mut Gate) {
    let start = Instant::now();
    let r = degennes_minimum(DeGennesGrid::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    g.check(
        "09",
        "de Gennes constant",
        r.mu > 0.5900 && r.mu < 0.5903 && r.mu > 0.5 && secs < 10.0,
        format!("Theta0 = {:.6} at xi = {:.5} (window (0.5900, 0.5903)), runtime {secs:.2} s (limit 10 s)", r.mu, r.xi),
    );
}

fn sigma_profile(g: &mut Gate) {
    let grid = HalfPlaneGrid::default();
    let values: Vec<f64> = (0..=8).map(|k| halfspace_sigma(k as f64 * PI / 16.0, grid).unwrap()).collect();
    let t0 = theta0().unwrap();
    let drop = values.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    let end = values[8];
    let pass = (end - 1.0).abs() <= 1e-2 && (values[0] - t0).abs() <= 1e-2 && drop <= 1e-3;
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    g.check(
        "10",
        "half-space energy sigma(theta)",
        pass,
        format!(
            "sigma(kpi/16) = [{}], |sigma(pi/2) - 1| = {:.1e}, |sigma(0) - Theta0| = {:.1e} (tol 1e-2), largest drop {drop:.1e} (tol 1e-3)",
            shown.join(", "),
            (end - 1.0).abs(),
            (values[0] - t0).abs()
        ),
    );
}

fn geometry_convergence(g: &mut Gate) {
    let eps = [0.4, 0.2, 0.1, 0.05];
    let sq = square();
    let poly = sq.as_polygon().unwrap();
    let jac: Vec<f64> = eps.iter().map(|&e| max_jacobian_deviation(poly, e, 16, 1e-5).unwrap()).collect();
    let p = log_slope(&eps, &jac);
    g.check(
        "11a",
        "Jacobian deviation decays linearly",
        (p - 1.0).abs() <= 0.2,
        format!("square, eps = 0.4..0.05, deviations [{}], fitted exponent {p:.3} (1 +- 0.2)", sci(&jac)),
    );

    let opening_dev = |poly: &Polygon, e: f64| {
        (0..poly.len())
            .map(|i| (spherical_vertex_opening(poly, i, e).unwrap() - poly.interior_angle(i)).abs())
            .fold(0.0, f64::max)
    };
    let open: Vec<f64> = eps.iter().map(|&e| opening_dev(poly, e)).collect();
    let q = log_slope(&eps, &open);
    g.check(
        "11b",
        "spherical vertex openings decay linearly",
        (q - 1.0).abs() <= 0.2,
        format!("square, deviations [{}], fitted exponent {q:.3} (1 +- 0.2)", sci(&open)),
    );

    // no face is tangent to B and no wedge contains it in its bisector plane
    // anywhere on this ladder, so only face energies and floors compete
    let field = MagneticField::new(0.35, 0.15, 1.0);
    let ladder = [0.4, 0.2, 0.1, 0.05, 0.025];
    let cyl = cylinder_energy(field, &sq, 0.5).unwrap();
    let cone = essential_spectrum_limit(field, &sq, &ladder, 0.5).unwrap();
    let gaps: Vec<f64> = cone.iter().map(|(_, e)| (e.value - cyl.value).abs()).collect();
    let lower_gap = cone.iter().map(|(_, e)| (e.lower.unwrap() - cyl.lower.unwrap()).abs()).fold(0.0, f64::max);
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = gaps[gaps.len() - 1] / cyl.value;
    g.check(
        "11c",
        "cone estimates converge to the cylinder value",
        decreasing && last <= 0.03 && lower_gap <= 1e-12,
        format!(
            "B = (0.35, 0.15, 1), cylinder {:.5}, gaps [{}] (strictly decreasing), last relative gap {last:.2e} (tol 3e-2), lower-end gap {lower_gap:.1e}",
            cyl.value,
            sci(&gaps)
        ),
    );
}

fn concentration(g: &mut Gate) {
    let field = MagneticField::new(0.0, 0.0, 1.0);
    let disc = unit_disc();
    let t = concentration_threshold(field, &disc, 1.0).unwrap();
    let exact = 2f64.sqrt() / 3.0;
    let v = t.verdict(t.epsilon_star / 2.0);
    let eps = t.epsilon_star / 2.0;
    let direct = 3.0 * eps * e_constant(field, &disc.moments()) < 0.5 * field.norm();
    let edges = truncated_domain_edges(&square(), 0.3).unwrap();
    let pass = (t.epsilon_star - exact).abs() <= 1e-12 && v.holds && direct && edges.certifies(0.3);
    g.check(
        "12",
        "corner concentration threshold",
        pass,
        format!(
            "eps* = {:.15} (exact {exact:.15}, tol 1e-12), verdict at eps*/2 {}, direct check {direct}, truncated square at eps = 0.3 certifies beta0 = 0.3: {} (largest beta0 {:.4})",
            t.epsilon_star,
            v.holds,
            edges.certifies(0.3),
            edges.beta0_max()
        ),
    );
}

fn robin(g: &mut Gate) {
    let mut wedge_err: f64 = 0.0;
    for (alpha, exact) in [(FRAC_PI_2, -2.0), (PI, -1.0), (1.5 * PI, -1.0)] {
        wedge_err = wedge_err.max((robin_model_energy(RobinModel::Wedge { alpha }).unwrap() - exact).abs());
    }
    let mut disc_err: f64 = 0.0;
    for alpha in [PI / 6.0, PI / 3.0, FRAC_PI_2, 2.0 * PI / 3.0] {
        let disc = Section::Disc(Disc::new([0.0, 0.0], (0.5 * alpha).tan()).unwrap());
        let b = robin_cone_upper_bound(&BoundaryProfile::from_section(&disc, None).unwrap()).unwrap();
        disc_err = disc_err.max((b + 1.0 / (0.5 * alpha).sin().powi(2)).abs());
    }
    let slope = robin_scaling_exponent(&unit_disc(), None, &[0.1, 0.05, 0.025, 0.01]).unwrap();
    g.check(
        "13",
        "Robin model energies and cone bound",
        wedge_err <= 1e-14 && disc_err <= 1e-10 && (slope + 2.0).abs() <= 0.05,
        format!(
            "wedge error {wedge_err:.1e}, disc-profile error {disc_err:.1e} (tol 1e-10), scaling exponent {slope:.4} on eps = 0.1..0.01 (-2 +- 0.05)"
        ),
    );
}

fn main() {
    let mut g = Gate { failures: Vec::new() };
    disc_bound(&mut g);
    circular_cone_limit(&mut g);
    rectangle_formulas(&mut g);
    optimizer_equivalence(&mut g);
    gram_identity(&mut g);
    reduced_spectrum(&mut g);
    quotient_consistency(&mut g);
    norm_and_homogeneity(&mut g);
    theta0_value(&mut g);
    sigma_profile(&mut g);
    geometry_convergence(&mut g);
    concentration(&mut g);
    robin(&mut g);

    let unexpected: Vec<&String> = g.failures.iter().filter(|id| !KNOWN_UNATTAINABLE.contains(&id.as_str())).collect();
    let known = g.failures.len() - unexpected.len();
    println!(
        "acceptance: {} failed ({} known unattainable, {} unexpected)",
        g.failures.len(),
        known,
        unexpected.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
