//! Python bindings. Scenarios are passed as a file path, a built-in name or a
//! JSON string; structured results come back as JSON text or plain lists.

use std::collections::BTreeMap;
use std::path::Path;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sirlab::harness::{self, Prepared, Scenario};
use sirlab::{asymptotics, spatial, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Validation { .. } | Error::InvalidParameter { .. } | Error::Json(_) | Error::MixedScenarios { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

pub fn resolve(source: &str, overrides: &[String]) -> sirlab::Result<Scenario> {
    if source.trim_start().starts_with('{') {
        Scenario::from_json_str(source, overrides)
    } else {
        Scenario::load(source, overrides)
    }
}

#[pyfunction]
fn builtin_scenarios() -> Vec<&'static str> {
    harness::builtin_names()
}

/// Resolved scenario (defaults filled) as JSON.
#[pyfunction]
#[pyo3(signature = (source, overrides = None))]
fn load_scenario(source: &str, overrides: Option<Vec<String>>) -> PyResult<String> {
    let sc = resolve(source, &overrides.unwrap_or_default()).map_err(to_py)?;
    Ok(sc.canonical_json())
}

#[pyfunction]
#[pyo3(signature = (source, overrides = None))]
fn scenario_hash(source: &str, overrides: Option<Vec<String>>) -> PyResult<String> {
    let sc = resolve(source, &overrides.unwrap_or_default()).map_err(to_py)?;
    Ok(harness::scenario_hash(&sc))
}

/// Runs the ensemble and returns the manifest as JSON.
#[pyfunction]
#[pyo3(signature = (source, out_dir = None, overrides = None))]
fn run_scenario(py: Python<'_>, source: &str, out_dir: Option<String>, overrides: Option<Vec<String>>) -> PyResult<String> {
    let sc = resolve(source, &overrides.unwrap_or_default()).map_err(to_py)?;
    let manifest = py
        .detach(|| harness::run_scenario(&sc, out_dir.as_deref().map(Path::new)))
        .map_err(to_py)?;
    serde_json::to_string(&manifest).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Recorded trajectory columns for one ensemble member.
#[pyfunction]
#[pyo3(signature = (source, member = 0, overrides = None))]
fn trajectory(
    py: Python<'_>,
    source: &str,
    member: usize,
    overrides: Option<Vec<String>>,
) -> PyResult<BTreeMap<&'static str, Vec<f64>>> {
    let sc = resolve(source, &overrides.unwrap_or_default()).map_err(to_py)?;
    let run = py
        .detach(|| Prepared::new(sc).and_then(|p| p.run_seed(member)))
        .map_err(to_py)?;
    let rows = &run.trajectory.rows;
    let col = |f: fn(&sirlab::dynamics::TrajectoryRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(BTreeMap::from([
        ("t", col(|r| r.t)),
        ("norm_S", col(|r| r.norm_s)),
        ("norm_I", col(|r| r.norm_i)),
        ("norm_R", col(|r| r.norm_r)),
        ("norm_N", col(|r| r.norm_n)),
        ("int_I", col(|r| r.int_i)),
        ("w", col(|r| r.w)),
        ("ratio_IR_over_N", col(|r| r.ratio_ir_over_n)),
        ("gamma", col(|r| r.gamma)),
    ]))
}

/// `(λ₁ʰ, continuum λ₁)` for a Dirichlet grid.
#[pyfunction]
fn first_eigenvalue(lengths: Vec<f64>, n: Vec<usize>) -> PyResult<(f64, f64)> {
    let g = spatial::build_grid(lengths.len(), &lengths, &n).map_err(to_py)?;
    let pair = spatial::first_eigenpair(&g).map_err(to_py)?;
    Ok((pair.lambda1, spatial::continuum_lambda1(&g)))
}

/// `(slope, residual, counts)` of a box-counting fit.
#[pyfunction]
fn box_counting_dimension(points: Vec<Vec<f64>>, eps: Vec<f64>) -> PyResult<(f64, f64, Vec<usize>)> {
    let d = asymptotics::box_counting_dimension(&points, &eps).map_err(to_py)?;
    Ok((d.slope, d.residual, d.counts))
}

#[pymodule]
fn sirlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", harness::SOFTWARE_VERSION)?;
    m.add_function(wrap_pyfunction!(builtin_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(load_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_hash, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(first_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(box_counting_dimension, m)?)?;
    Ok(())
}
