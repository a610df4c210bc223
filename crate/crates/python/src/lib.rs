//! Python bindings. Points are 3-tuples of floats.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gtet_core::analytic::{constant_with, QuantityName, DEFAULT_SERIES_REL_TOL};
use gtet_core::densities::{self, CroftonCdf, SimplexCase};
use gtet_core::events::{Event, EventError, EventOutcome};
use gtet_core::geometry::{self, Point3, Triangle};
use gtet_core::quadrature::QuadratureSpec;
use gtet_core::report::estimate_report;
use gtet_core::sampling::MCEstimate;
use gtet_core::validation::{run_criterion, Scale};

type P = (f64, f64, f64);

fn pt((x, y, z): P) -> Point3 {
    Point3::new(x, y, z)
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn case(name: &str) -> PyResult<SimplexCase> {
    name.parse().map_err(value_err)
}

#[pyclass(name = "Tetrahedron", frozen)]
struct PyTetrahedron(geometry::Tetrahedron);

#[pymethods]
impl PyTetrahedron {
    #[new]
    fn new(a: P, b: P, c: P, d: P) -> Self {
        PyTetrahedron(geometry::Tetrahedron::new(pt(a), pt(b), pt(c), pt(d)))
    }

    #[staticmethod]
    fn regular() -> Self {
        PyTetrahedron(geometry::Tetrahedron::regular())
    }

    fn vertices(&self) -> Vec<P> {
        self.0.vertices().iter().map(|p| (p.x, p.y, p.z)).collect()
    }

    fn volume(&self) -> f64 {
        self.0.volume()
    }

    /// Angles at edges ab, ac, ad, bc, bd, cd.
    fn dihedral_angles(&self) -> PyResult<Vec<f64>> {
        Ok(geometry::dihedral_angles(&self.0).map_err(value_err)?.edges.to_vec())
    }

    /// Solid angles at a, b, c, d.
    fn solid_angles(&self) -> PyResult<Vec<f64>> {
        Ok(geometry::solid_angles(&self.0).map_err(value_err)?.at.to_vec())
    }

    fn is_acute(&self) -> PyResult<bool> {
        geometry::is_acute_tetrahedron(&self.0).map_err(value_err)
    }

    fn is_2_well_centered(&self) -> PyResult<bool> {
        geometry::is_2_well_centered(&self.0).map_err(value_err)
    }

    fn is_3_well_centered(&self) -> PyResult<bool> {
        geometry::is_3_well_centered(&self.0).map_err(value_err)
    }

    /// `(in_gamma, in_reflected, in_parallelogram)` for the projection of d.
    fn cone_events(&self) -> PyResult<(bool, bool, bool)> {
        let t = &self.0;
        let e = geometry::cone_events(t.a, t.b, t.c, t.d).map_err(value_err)?;
        Ok((e.in_gamma, e.in_reflected, e.in_parallelogram))
    }

    fn shadow_is_triangle(&self, normal: P) -> PyResult<bool> {
        geometry::shadow_is_triangle(&self.0, pt(normal)).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Tetrahedron{:?}", self.vertices())
    }
}

#[pyclass(name = "Estimate", frozen, get_all)]
struct PyEstimate {
    event: String,
    value: f64,
    stderr: f64,
    ci_low: f64,
    ci_high: f64,
    n: u64,
    excluded: u64,
    seed: u64,
    target: Option<f64>,
    ks_statistic: Option<f64>,
    ks_critical_01: Option<f64>,
}

#[pymethods]
impl PyEstimate {
    fn z_score(&self, target: f64) -> f64 {
        (self.value - target) / self.stderr
    }

    fn __repr__(&self) -> String {
        format!("Estimate({} = {} ± {}, n = {})", self.event, self.value, self.stderr, self.n)
    }
}

fn event_err(e: EventError) -> PyErr {
    match e {
        EventError::Unknown(_) | EventError::NotATetraSampler(_) => value_err(e),
        _ => runtime_err(e),
    }
}

/// Monte Carlo estimate of a named event; the GIL is released while
/// sampling.
#[pyfunction]
#[pyo3(signature = (event, n = 1_000_000, seed = 1))]
fn estimate(py: Python<'_>, event: &str, n: u64, seed: u64) -> PyResult<PyEstimate> {
    let ev: Event = event.parse().map_err(event_err)?;
    let outcome = py.detach(|| ev.run(n, seed)).map_err(event_err)?;
    let e: &MCEstimate = outcome.estimate();
    let (ks_statistic, ks_critical_01) = match &outcome {
        EventOutcome::Samples { ks_statistic, ks_critical_01, .. } => (Some(*ks_statistic), Some(*ks_critical_01)),
        _ => (None, None),
    };
    Ok(PyEstimate {
        event: ev.to_string(),
        value: e.value,
        stderr: e.stderr,
        ci_low: e.ci_low,
        ci_high: e.ci_high,
        n: e.n,
        excluded: e.excluded,
        seed: e.seed,
        target: ev.target(),
        ks_statistic,
        ks_critical_01,
    })
}

/// The JSON report that the command line `estimate` prints.
#[pyfunction]
#[pyo3(signature = (event, n = 1_000_000, seed = 1))]
fn estimate_json(py: Python<'_>, event: &str, n: u64, seed: u64) -> PyResult<String> {
    let ev: Event = event.parse().map_err(event_err)?;
    py.detach(|| estimate_report(&ev, n, seed)).map(|r| r.to_json()).map_err(event_err)
}

/// `(value, error_bound, method, evaluations)` for a named constant.
#[pyfunction]
#[pyo3(signature = (quantity, tol = 1e-10))]
fn analytic(py: Python<'_>, quantity: &str, tol: f64) -> PyResult<(f64, f64, String, usize)> {
    let q: QuantityName = quantity.parse().map_err(value_err)?;
    let spec = QuadratureSpec::default().with_tolerance(tol);
    spec.validate().map_err(value_err)?;
    let v = py.detach(|| constant_with(q, &spec, DEFAULT_SERIES_REL_TOL.min(tol))).map_err(runtime_err)?;
    Ok((v.value, v.error_bound, v.method.name().to_string(), v.evaluations))
}

#[pyfunction]
fn is_acute_triangle(a: P, b: P, c: P) -> PyResult<bool> {
    geometry::is_acute_triangle(&Triangle::new(pt(a), pt(b), pt(c))).map_err(value_err)
}

/// Solid angle at `apex` subtended by the triangle `p1 p2 p3`.
#[pyfunction]
fn solid_angle(apex: P, p1: P, p2: P, p3: P) -> PyResult<f64> {
    geometry::solid_angle(pt(apex), pt(p1), pt(p2), pt(p3)).map_err(value_err)
}

#[pyfunction]
fn crofton_density(x: f64) -> PyResult<f64> {
    densities::crofton_density(x).map_err(value_err)
}

/// Cumulative distribution of the Crofton density; the table is built on
/// each call.
#[pyfunction]
fn crofton_cdf(xs: Vec<f64>) -> Vec<f64> {
    let t = CroftonCdf::new();
    xs.into_iter().map(|x| t.cdf(x)).collect()
}

#[pyfunction]
#[pyo3(signature = (x, y, case = "general"))]
fn miller_density(x: f64, y: f64, case: &str) -> PyResult<f64> {
    densities::miller_density_simplified(self::case(case)?, [x, y]).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (x, y, case = "general"))]
fn triple_convolution_density(x: f64, y: f64, case: &str) -> PyResult<f64> {
    Ok(densities::triple_convolution_density(self::case(case)?, x, y))
}

#[pyfunction]
#[pyo3(signature = (u, v, case = "general"))]
fn charfun(u: f64, v: f64, case: &str) -> PyResult<Complex64> {
    Ok(densities::charfun(self::case(case)?, u, v))
}

#[pyfunction]
fn miles_joint_density(x: f64, y: f64, z: f64) -> PyResult<f64> {
    densities::miles_joint_density(x, y, z).map_err(value_err)
}

/// Runs one acceptance criterion; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (criterion, scale = "quick"))]
fn validate(py: Python<'_>, criterion: &str, scale: &str) -> PyResult<(bool, String)> {
    let scale: Scale = scale.parse().map_err(value_err)?;
    let r = py
        .detach(|| run_criterion(criterion, scale, &gtet_core::validation::in_process_runner))
        .ok_or_else(|| value_err(format!("unknown criterion '{criterion}'")))?;
    Ok((r.passed, r.to_string()))
}

#[pymodule]
fn gtet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTetrahedron>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_json, m)?)?;
    m.add_function(wrap_pyfunction!(analytic, m)?)?;
    m.add_function(wrap_pyfunction!(is_acute_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(solid_angle, m)?)?;
    m.add_function(wrap_pyfunction!(crofton_density, m)?)?;
    m.add_function(wrap_pyfunction!(crofton_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(miller_density, m)?)?;
    m.add_function(wrap_pyfunction!(triple_convolution_density, m)?)?;
    m.add_function(wrap_pyfunction!(charfun, m)?)?;
    m.add_function(wrap_pyfunction!(miles_joint_density, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
