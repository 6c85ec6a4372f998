//! Python bindings. Structured results cross the boundary as JSON text.

use flatpoint::bounds::{CurvatureReport, ReportOptions};
use flatpoint::hexagon::{build_hexagon, MeshFormat};
use flatpoint::rkc::{
    family_report_with, seeded_batch, BoundaryCorrespondence, CorrespondenceSpec,
};
use flatpoint::verify::{run_verify, VerifyConfig};
use flatpoint::{Error, ErrorKind, WeierstrassData};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Numeric => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn report_options(numeric: bool, disk_onto_disk: bool) -> ReportOptions {
    ReportOptions {
        numeric,
        disk_onto_disk,
    }
}

/// Curvature report of the hexagon graph as JSON.
#[pyfunction]
#[pyo3(signature = (numeric = true))]
fn hexagon_report(numeric: bool) -> PyResult<String> {
    let model = build_hexagon();
    let report = if numeric {
        model.kpp_report()
    } else {
        CurvatureReport::for_data(model.data(), report_options(false, false)).map(|mut r| {
            r.annotate(flatpoint::hexagon::EXTREMAL_ANNOTATION);
            r
        })
    };
    report.and_then(|r| r.to_json()).map_err(to_py)
}

/// Polar-grid mesh of the hexagon graph, rendered as `obj` or `csv` text.
#[pyfunction]
#[pyo3(signature = (n_radial = 32, n_angular = 96, r_max = 0.95, format = "obj"))]
fn hexagon_mesh(n_radial: usize, n_angular: usize, r_max: f64, format: &str) -> PyResult<String> {
    let format: MeshFormat = format.parse().map_err(to_py)?;
    build_hexagon()
        .export_mesh(n_radial, n_angular, r_max, format)
        .map(|m| m.render())
        .map_err(to_py)
}

/// Curvature report of Weierstrass data given as a JSON document.
#[pyfunction]
#[pyo3(signature = (data, disk_onto_disk = false, numeric = true))]
fn kpp(data: &str, disk_onto_disk: bool, numeric: bool) -> PyResult<String> {
    let data = WeierstrassData::from_json(data).map_err(to_py)?;
    CurvatureReport::for_data(&data, report_options(numeric, disk_onto_disk))
        .and_then(|r| r.to_json())
        .map_err(to_py)
}

/// Gaussian curvature at `z` of the graph given by a JSON data document.
#[pyfunction]
fn curvature(data: &str, z: Complex64) -> PyResult<f64> {
    WeierstrassData::from_json(data)
        .and_then(|d| d.curvature(z))
        .map_err(to_py)
}

/// Verification suite summary as JSON.
#[pyfunction]
#[pyo3(signature = (seed = 7))]
fn verify(py: Python<'_>, seed: u64) -> PyResult<String> {
    let config = VerifyConfig::new(seed)
        .with_env_overrides()
        .map_err(to_py)?;
    py.detach(|| run_verify(&config).to_json()).map_err(to_py)
}

/// Report for one boundary correspondence given as JSON.
#[pyfunction]
#[pyo3(signature = (spec, numeric = true))]
fn rkc(spec: &str, numeric: bool) -> PyResult<String> {
    CorrespondenceSpec::from_json(spec)
        .and_then(BoundaryCorrespondence::new)
        .and_then(|bc| family_report_with(&bc, numeric))
        .and_then(|r| r.to_json())
        .map_err(to_py)
}

/// Seeded random batch of boundary correspondences as JSON.
#[pyfunction]
#[pyo3(signature = (seed, count = 200, numeric = true))]
fn rkc_batch(py: Python<'_>, seed: u64, count: usize, numeric: bool) -> PyResult<String> {
    let batch = py.detach(|| seeded_batch(seed, count, numeric));
    serde_json::to_string_pretty(&batch).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "flatpoint")]
fn flatpoint_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hexagon_report, m)?)?;
    m.add_function(wrap_pyfunction!(hexagon_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(kpp, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(rkc, m)?)?;
    m.add_function(wrap_pyfunction!(rkc_batch, m)?)?;
    Ok(())
}
