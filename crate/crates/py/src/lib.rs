//! Python bindings for the `growfem` library.

use growfem::fixture::generate_fixture;
use growfem::geometry::{self, Curve, Point2};
use growfem::kinetics::{self, NetworkSpec};
use growfem::mesh::triangle_quality;
use growfem::solver::{run_stage, Mode, StageConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Xy = (f64, f64);

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn curve(id: &str, points: Vec<Xy>, closed: bool) -> PyResult<Curve> {
    let pts = points.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
    Curve::new(id, pts, closed).map_err(value_error)
}

#[pyfunction]
fn hill_act(x: f64, k: f64) -> f64 {
    kinetics::hill_act(x, k)
}

#[pyfunction]
fn hill_inh(x: f64, k: f64) -> f64 {
    kinetics::hill_inh(x, k)
}

/// Resample a polyline to `n` equal-chord points.
#[pyfunction]
#[pyo3(signature = (points, n, closed = false))]
fn resample(points: Vec<Xy>, n: usize, closed: bool) -> PyResult<Vec<Xy>> {
    let c = geometry::resample_uniform(&curve("c", points, closed)?, n).map_err(value_error)?;
    Ok(c.points().iter().map(|p| (p.x, p.y)).collect())
}

/// Junctions between two curves as `(x, y, param_a, param_b)`.
#[pyfunction]
#[pyo3(signature = (a, b, closed_a = false, closed_b = false, tol = geometry::INTERSECTION_TOL))]
fn find_intersections(
    a: Vec<Xy>,
    b: Vec<Xy>,
    closed_a: bool,
    closed_b: bool,
    tol: f64,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let (a, b) = (curve("a", a, closed_a)?, curve("b", b, closed_b)?);
    Ok(geometry::find_intersections(&a, &b, tol)
        .into_iter()
        .map(|i| (i.point.x, i.point.y, i.param_a, i.param_b))
        .collect())
}

/// Signed quality of a triangle: 1 for equilateral, negative when inverted.
#[pyfunction]
fn quality(a: Xy, b: Xy, c: Xy) -> f64 {
    let p = |(x, y): Xy| Point2::new(x, y);
    triangle_quality([p(a), p(b), p(c)])
}

/// Run one stage of the built-in fixture and summarize it.
#[pyfunction]
#[pyo3(signature = (scale = 1.0, mode = "model2"))]
fn run_fixture<'py>(py: Python<'py>, scale: f64, mode: &str) -> PyResult<Bound<'py, PyDict>> {
    let mode: Mode = mode.parse().map_err(PyValueError::new_err)?;
    let (g0, g1) = generate_fixture(scale).map_err(value_error)?;
    let result = run_stage(
        &g0,
        &g1,
        &NetworkSpec::default(),
        &StageConfig::default(),
        mode,
        &mut |_| {},
    )
    .map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("mode", result.mode.to_string())?;
    d.set_item("max_junction_error", result.max_junction_error())?;
    d.set_item("max_area_error", result.max_area_error())?;
    d.set_item("any_inverted", result.any_inverted())?;
    d.set_item(
        "integrated_production",
        result.integrated_production.to_vec(),
    )?;
    d.set_item("target_areas", result.target_areas.clone())?;
    let last = result.records.last().expect("at least the initial record");
    d.set_item("final_areas", last.areas.clone())?;
    d.set_item(
        "min_quality",
        result
            .records
            .iter()
            .map(|r| r.min_quality)
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Run the command-line harness with `args` (without the program name) and
/// return its exit code.
#[pyfunction]
fn cli(args: Vec<String>) -> i32 {
    growfem::cli::cli_main(std::iter::once("growfem".to_owned()).chain(args))
}

#[pymodule]
fn pygrowfem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hill_act, m)?)?;
    m.add_function(wrap_pyfunction!(hill_inh, m)?)?;
    m.add_function(wrap_pyfunction!(resample, m)?)?;
    m.add_function(wrap_pyfunction!(find_intersections, m)?)?;
    m.add_function(wrap_pyfunction!(quality, m)?)?;
    m.add_function(wrap_pyfunction!(run_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
