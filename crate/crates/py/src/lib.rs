//! Python bindings for `conebounds-core`.
//!
//! Exposes sections, fields and moments as small classes, plus the bound,
//! reduced-spectrum, model-energy and Robin operations as functions.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use conebounds_core::cli;
use conebounds_core::gauge::{self, MagneticField};
use conebounds_core::geometry::{self, Disc, Polygon};
use conebounds_core::model::{self, HalfPlaneGrid};
use conebounds_core::reduced::{self, GridSpec};
use conebounds_core::robin::{self, BoundaryProfile, RobinModel};
use conebounds_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        Error::Solver(_) | Error::Accuracy(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Uniform magnetic field `(b1, b2, b3)`.
#[pyclass(name = "Field", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyField {
    inner: MagneticField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(b1: f64, b2: f64, b3: f64) -> Self {
        Self { inner: MagneticField::new(b1, b2, b3) }
    }

    #[getter]
    fn b1(&self) -> f64 {
        self.inner.b1
    }

    #[getter]
    fn b2(&self) -> f64 {
        self.inner.b2
    }

    #[getter]
    fn b3(&self) -> f64 {
        self.inner.b3
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn __repr__(&self) -> String {
        format!("Field({}, {}, {})", self.inner.b1, self.inner.b2, self.inner.b3)
    }
}

/// Second moments of a section, raw and area-normalized.
#[pyclass(name = "Moments", frozen)]
struct PyMoments {
    inner: geometry::Moments,
}

#[pymethods]
impl PyMoments {
    #[getter]
    fn area(&self) -> f64 {
        self.inner.area
    }

    #[getter(M0)]
    fn raw0(&self) -> f64 {
        self.inner.raw0
    }

    #[getter(M1)]
    fn raw1(&self) -> f64 {
        self.inner.raw1
    }

    #[getter(M2)]
    fn raw2(&self) -> f64 {
        self.inner.raw2
    }

    #[getter]
    fn m0(&self) -> f64 {
        self.inner.m0
    }

    #[getter]
    fn m1(&self) -> f64 {
        self.inner.m1
    }

    #[getter]
    fn m2(&self) -> f64 {
        self.inner.m2
    }

    /// `M0 M2 - M1^2`.
    fn gram(&self) -> f64 {
        self.inner.gram()
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        format!("Moments(area={}, M0={}, M1={}, M2={})", m.area, m.raw0, m.raw1, m.raw2)
    }
}

/// Plane section of a cone: a simple polygon or a disc.
#[pyclass(name = "Section", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySection {
    inner: geometry::Section,
}

#[pymethods]
impl PySection {
    #[staticmethod]
    fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<Self> {
        let poly = Polygon::new(vertices.into_iter().map(|(x, y)| [x, y]).collect()).map_err(to_py)?;
        Ok(Self { inner: geometry::Section::Polygon(poly) })
    }

    #[staticmethod]
    fn disc(center: (f64, f64), radius: f64) -> PyResult<Self> {
        let disc = Disc::new([center.0, center.1], radius).map_err(to_py)?;
        Ok(Self { inner: geometry::Section::Disc(disc) })
    }

    /// Parse `{"polygon": [[x, y], ...]}` or `{"disc": {"center": [x, y], "radius": r}}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        geometry::Section::from_json(text).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_spec()).expect("section serializes")
    }

    fn moments(&self) -> PyMoments {
        PyMoments { inner: self.inner.moments() }
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn scaled(&self, eps: f64) -> PyResult<Self> {
        geometry::scale_section(&self.inner, eps).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Section({})", self.to_json())
    }
}

/// `e(B, omega)`.
#[pyfunction]
fn e_constant(field: PyField, section: &PySection) -> f64 {
    gauge::e_constant(field.inner, &section.inner.moments())
}

/// Upper bounds `(4n - 1) e(B, omega)` as `[(n, bound), ...]`.
#[pyfunction]
#[pyo3(signature = (field, section, n_max=3))]
fn upper_bounds(field: PyField, section: &PySection, n_max: u32) -> PyResult<Vec<(u32, f64)>> {
    let r = gauge::rayleigh_upper_bounds(field.inner, &section.inner.moments(), n_max).map_err(to_py)?;
    Ok(r.bounds)
}

/// Entries `(a, b, c, d)` of the norm-minimizing transverse gauge with unit curl.
#[pyfunction]
fn optimal_gauge(section: &PySection) -> PyResult<(f64, f64, f64, f64)> {
    let g = gauge::optimal_transverse_gauge(&section.inner.moments()).map_err(to_py)?;
    Ok((g.a, g.b, g.c, g.d))
}

/// `sqrt(lambda) (4n - 1)` for `n = 1..=n_max`.
#[pyfunction]
#[pyo3(signature = (lam, n_max=3))]
fn exact_reduced_spectrum(lam: f64, n_max: usize) -> PyResult<Vec<f64>> {
    reduced::exact_reduced_spectrum(lam, n_max).map_err(to_py)
}

/// Finite-difference levels of the reduced half-line problem.
#[pyfunction]
#[pyo3(signature = (lam, n_max=3, x_max=None, npoints=None))]
fn reduced_spectrum(lam: f64, n_max: usize, x_max: Option<f64>, npoints: Option<usize>) -> PyResult<Vec<f64>> {
    let d = GridSpec::default_for(lam);
    let grid = GridSpec::new(x_max.unwrap_or(d.x_max), npoints.unwrap_or(d.n)).map_err(to_py)?;
    reduced::fd_halfline_spectrum(lam, grid, n_max).map(|s| s.values).map_err(to_py)
}

/// The de Gennes constant.
#[pyfunction]
fn theta0() -> PyResult<f64> {
    model::theta0().map_err(to_py)
}

/// Half-space ground energy for a unit field at angle `theta` to the boundary.
#[pyfunction]
fn sigma(py: Python<'_>, theta: f64) -> PyResult<f64> {
    py.detach(|| model::halfspace_sigma(theta, HalfPlaneGrid::default())).map_err(to_py)
}

/// `(lower, upper)` estimate of the ground energy on the cylinder over a polygon.
#[pyfunction]
#[pyo3(signature = (field, section, c_floor=0.5))]
fn cylinder_energy(py: Python<'_>, field: PyField, section: &PySection, c_floor: f64) -> PyResult<(f64, f64)> {
    let est = py.detach(|| model::cylinder_energy(field.inner, &section.inner, c_floor)).map_err(to_py)?;
    Ok(est.interval())
}

/// Largest scale `eps` for which the vertex bound `3 eps e` stays below the floor.
#[pyfunction]
#[pyo3(signature = (field, section, c_floor=0.5))]
fn concentration_threshold(field: PyField, section: &PySection, c_floor: f64) -> PyResult<f64> {
    model::concentration_threshold(field.inner, &section.inner, c_floor)
        .map(|t| t.epsilon_star)
        .map_err(to_py)
}

/// Robin ground energy of a wedge of opening `alpha`.
#[pyfunction]
fn robin_wedge(alpha: f64) -> PyResult<f64> {
    robin::robin_model_energy(RobinModel::Wedge { alpha }).map_err(to_py)
}

/// Robin upper bound for the cone over `section`, seen from `axis`.
#[pyfunction]
#[pyo3(signature = (section, axis=None))]
fn robin_cone_bound(section: &PySection, axis: Option<(f64, f64)>) -> PyResult<f64> {
    let profile = BoundaryProfile::from_section(&section.inner, axis.map(|(x, y)| [x, y])).map_err(to_py)?;
    robin::robin_cone_upper_bound(&profile).map_err(to_py)
}

/// Fitted exponent of `|bound(eps)|` against `eps`.
#[pyfunction]
#[pyo3(signature = (section, epsilons, axis=None))]
fn robin_scaling_exponent(section: &PySection, epsilons: Vec<f64>, axis: Option<(f64, f64)>) -> PyResult<f64> {
    robin::robin_scaling_exponent(&section.inner, axis.map(|(x, y)| [x, y]), &epsilons).map_err(to_py)
}

/// Evaluate a JSON run configuration and return the JSON report.
#[pyfunction]
fn run(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg = cli::RunConfig::from_json(config).map_err(to_py)?;
    let report = py.detach(|| cli::run(&cfg)).map_err(to_py)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
fn conebounds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cli::VERSION)?;
    m.add_class::<PyField>()?;
    m.add_class::<PyMoments>()?;
    m.add_class::<PySection>()?;
    m.add_function(wrap_pyfunction!(e_constant, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_gauge, m)?)?;
    m.add_function(wrap_pyfunction!(exact_reduced_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(theta0, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(cylinder_energy, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(robin_wedge, m)?)?;
    m.add_function(wrap_pyfunction!(robin_cone_bound, m)?)?;
    m.add_function(wrap_pyfunction!(robin_scaling_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
