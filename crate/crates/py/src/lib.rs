//! Python bindings. Reports cross the boundary as JSON strings so the
//! Python side sees exactly what the command-line tool writes.

use jordan_ext::counterexample::{assemble_domain, counterexample_report, phi_file, ReportOptions, SvcSet};
use jordan_ext::geometry::{hyperbolic_dist_disk as disk_dist, hyperbolic_dist_halfplane as halfplane_dist};
use jordan_ext::geometry::{DomainFile, JordanDomain, Point};
use jordan_ext::metrics::{integrate_criterion, quasihyperbolic_field as qh_field, MetricGrid};
use jordan_ext::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use std::sync::Arc;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical { .. } | Error::Construction(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn c(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

fn parse_domain(domain_json: &str) -> PyResult<Arc<JordanDomain>> {
    let file: DomainFile = serde_json::from_str(domain_json).map_err(json_err)?;
    JordanDomain::from_file(&file).map(Arc::new).map_err(to_py)
}

/// Hyperbolic distance in the unit disk.
#[pyfunction]
fn hyperbolic_dist_disk(z: (f64, f64), w: (f64, f64)) -> PyResult<f64> {
    disk_dist(c(z), c(w)).map_err(to_py)
}

/// Hyperbolic distance in the upper half-plane.
#[pyfunction]
fn hyperbolic_dist_halfplane(z: (f64, f64), w: (f64, f64)) -> PyResult<f64> {
    halfplane_dist(c(z), c(w)).map_err(to_py)
}

/// Quasihyperbolic field from `z0` on a grid of spacing `h`, as parallel
/// lists `(xs, ys, values)`; unreached nodes carry `inf`.
#[pyfunction]
fn quasihyperbolic_field(
    py: Python<'_>,
    domain_json: &str,
    z0: (f64, f64),
    h: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let domain = parse_domain(domain_json)?;
    py.detach(|| {
        let grid = MetricGrid::build(domain, h)?;
        let field = qh_field(&grid, Point::new(z0.0, z0.1))?;
        let (xs, ys) = (0..grid.len()).map(|k| grid.position(k)).map(|p| (p.x, p.y)).unzip();
        Ok((xs, ys, field.values().to_vec()))
    })
    .map_err(to_py)
}

/// Criterion report (JSON) for the quasihyperbolic distance from `z0`.
#[pyfunction]
#[pyo3(signature = (domain_json, z0, h, q = 1.0))]
fn criterion(py: Python<'_>, domain_json: &str, z0: (f64, f64), h: f64, q: f64) -> PyResult<String> {
    let domain = parse_domain(domain_json)?;
    let report = py
        .detach(|| {
            let grid = MetricGrid::build(domain, h)?;
            integrate_criterion(&qh_field(&grid, Point::new(z0.0, z0.1))?, q)
        })
        .map_err(to_py)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Removed measure of the Smith–Volterra–Cantor construction after `depth`
/// steps, measured and in closed form.
#[pyfunction]
fn svc_removed_measure(depth: u32) -> PyResult<(f64, f64)> {
    let s = jordan_ext::counterexample::build_svc(depth).map_err(to_py)?;
    Ok((s.removed_measure(), SvcSet::removed_measure_formula(depth)))
}

/// Truncated tree domain: `(domain_json, phi_json)`.
#[pyfunction]
fn counterexample_domain(py: Python<'_>, depth: u32) -> PyResult<(String, String)> {
    let cd = py.detach(|| assemble_domain(depth, None)).map_err(to_py)?;
    let domain = serde_json::to_string(&cd.domain.to_file()).map_err(json_err)?;
    let phi = serde_json::to_string(&phi_file(&cd)).map_err(json_err)?;
    Ok((domain, phi))
}

/// Full verification report (JSON) for the truncated tree domain.
#[pyfunction]
#[pyo3(signature = (depth, seed = 1, grid_check = true))]
fn counterexample_report_json(py: Python<'_>, depth: u32, seed: u64, grid_check: bool) -> PyResult<String> {
    let report = py
        .detach(|| {
            let cd = assemble_domain(depth, None)?;
            let opts = ReportOptions {
                seed,
                grid_check,
                ..Default::default()
            };
            counterexample_report(&cd, &opts)
        })
        .map_err(to_py)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Runs the command-line tool with the given arguments (without the program
/// name) and returns its exit code.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    py.detach(|| jordan_ext::cli::main_with_args(std::iter::once("jordan-ext".to_string()).chain(args)))
}

#[pymodule]
fn jordan_ext_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hyperbolic_dist_disk, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolic_dist_halfplane, m)?)?;
    m.add_function(wrap_pyfunction!(quasihyperbolic_field, m)?)?;
    m.add_function(wrap_pyfunction!(criterion, m)?)?;
    m.add_function(wrap_pyfunction!(svc_removed_measure, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_domain, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_report_json, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("SCHEMA_VERSION", jordan_ext::cli::SCHEMA_VERSION)?;
    Ok(())
}
