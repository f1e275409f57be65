//! Python bindings. Results come back as plain dicts and lists.

use std::sync::Arc;

use inls_core::dynamics::{evolve as run_evolution, EvolutionConfig, Status};
use inls_core::exponents::{applicable_constructions, verify_with_small_parameters, Value};
use inls_core::groundstate::{
    classify_initial_data, default_map, pohozaev_residuals, solve_ground_state, thresholds, Method,
    SolverOpts,
};
use inls_core::model::{
    check_hypotheses as hypotheses, derive_indices as indices, ModelParams, Sign,
};
use inls_core::radial::{GridMap, RadialField, RadialGrid};
use inls_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::{json, Value as Json};

fn err(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } | Error::SolveFailure(_) | Error::Overflow(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Json) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Json::Null => py.None().into_bound(py),
        Json::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Json::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Json::String(s) => s.into_pyobject(py)?.into_any(),
        Json::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Json::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<T: serde::Serialize>(x: &T) -> PyResult<Json> {
    serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn params(dim: u32, a: f64, b: f64, alpha: f64, focusing: bool) -> PyResult<ModelParams> {
    ModelParams::new(
        dim,
        a,
        b,
        alpha,
        if focusing {
            Sign::Focusing
        } else {
            Sign::Defocusing
        },
    )
    .map_err(err)
}

fn grid_map(name: &str, p: &ModelParams) -> PyResult<GridMap> {
    match name {
        "auto" => Ok(default_map(p)),
        "uniform" => Ok(GridMap::Uniform),
        "clustered" => Ok(GridMap::Clustered {
            kappa: 200.0,
            ell: 0.5,
        }),
        other => Err(PyValueError::new_err(format!(
            "unknown grid map `{other}` (auto, uniform, clustered)"
        ))),
    }
}

#[pyfunction]
#[pyo3(signature = (dim, a, b, alpha))]
fn derive_indices(py: Python<'_>, dim: u32, a: f64, b: f64, alpha: f64) -> PyResult<Py<PyAny>> {
    let p = params(dim, a, b, alpha, true)?;
    Ok(to_py(py, &serialize(&indices(&p).map_err(err)?)?)?.unbind())
}

#[pyfunction]
#[pyo3(signature = (dim, a, b, alpha))]
fn check_hypotheses(py: Python<'_>, dim: u32, a: f64, b: f64, alpha: f64) -> PyResult<Py<PyAny>> {
    let p = params(dim, a, b, alpha, true)?;
    Ok(to_py(py, &serialize(&hypotheses(&p))?)?.unbind())
}

/// Profile on its grid plus the invariants and threshold quantities.
#[pyfunction]
#[pyo3(signature = (dim, a, b, alpha, points = 8192, r_max = 30.0, method = "shooting", polish = true))]
#[allow(clippy::too_many_arguments)]
fn ground_state(
    py: Python<'_>,
    dim: u32,
    a: f64,
    b: f64,
    alpha: f64,
    points: usize,
    r_max: f64,
    method: &str,
    polish: bool,
) -> PyResult<Py<PyAny>> {
    let p = params(dim, a, b, alpha, true)?;
    let method = match method {
        "shooting" => Method::Shooting,
        "gradient_flow" => Method::GradientFlow,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method `{other}` (shooting, gradient_flow)"
            )))
        }
    };
    let opts = SolverOpts {
        method,
        points,
        r_max,
        polish,
        ..SolverOpts::default()
    };
    let gs = py.detach(|| solve_ground_state(&p, &opts)).map_err(err)?;
    let (r1, r2) = pohozaev_residuals(&gs, &p);
    let out = json!({
        "r": gs.profile.grid().r(),
        "q": gs.profile.values().iter().map(|z| z.re).collect::<Vec<_>>(),
        "mass": gs.mass,
        "kinetic": gs.kinetic,
        "potential": gs.potential,
        "energy": gs.energy,
        "sharp_constant": gs.sharp_constant,
        "pohozaev_residuals": [r1, r2],
        "thresholds": serialize(&thresholds(&gs, &p).map_err(err)?)?,
        "solver": serialize(&gs.solver_meta)?,
    });
    Ok(to_py(py, &out)?.unbind())
}

/// Evolves `A exp(-r^2/2w^2)` (`initial = "gaussian"`), its regular counterpart
/// (`"regular_gaussian"`) or `A Q` (`"ground_state"`).
#[pyfunction]
#[pyo3(signature = (
    dim, a, b, alpha, focusing = true, initial = "gaussian", amplitude = 1.0, width = 1.0,
    dt = 1e-3, t_end = 1.0, snapshot_every = 10, points = 4096, r_max = 40.0, grid = "auto"
))]
#[allow(clippy::too_many_arguments)]
fn evolve(
    py: Python<'_>,
    dim: u32,
    a: f64,
    b: f64,
    alpha: f64,
    focusing: bool,
    initial: &str,
    amplitude: f64,
    width: f64,
    dt: f64,
    t_end: f64,
    snapshot_every: usize,
    points: usize,
    r_max: f64,
    grid: &str,
) -> PyResult<Py<PyAny>> {
    let p = params(dim, a, b, alpha, focusing)?;
    let map = grid_map(grid, &p)?;
    let g = Arc::new(RadialGrid::new(dim, points, r_max, map).map_err(err)?);
    let u0 = match initial {
        "gaussian" => RadialField::gaussian(g, amplitude, width),
        "regular_gaussian" => RadialField::regular_gaussian(g, a, amplitude, width),
        "ground_state" => {
            let q = ModelParams {
                lambda: Sign::Focusing,
                ..p
            };
            let opts = SolverOpts {
                points,
                r_max,
                map: Some(map),
                ..SolverOpts::default()
            };
            py.detach(|| solve_ground_state(&q, &opts))
                .map_err(err)?
                .profile
                .scaled_re(amplitude)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown initial data `{other}`"
            )))
        }
    };
    let cfg = EvolutionConfig {
        dt,
        t_end,
        snapshot_every,
        ..EvolutionConfig::default()
    };
    let run = py.detach(|| run_evolution(&u0, &p, &cfg)).map_err(err)?;
    let col = |f: fn(&inls_core::dynamics::TrajectoryRecord) -> f64| {
        run.trajectory.iter().map(f).collect::<Vec<_>>()
    };
    let out = json!({
        "status": run.status.as_str(),
        "t_star": run.t_star,
        "steps": run.steps,
        "rejected": run.rejected,
        "trajectory": {
            "t": col(|r| r.t),
            "mass": col(|r| r.mass),
            "energy": col(|r| r.energy),
            "h1a": col(|r| r.h1a),
            "kinetic": col(|r| r.kinetic),
            "linf": col(|r| r.linf),
            "V": col(|r| r.v),
            "Vp": col(|r| r.vp),
            "Vpp": col(|r| r.vpp),
        },
        "r": run.final_state.grid().r(),
        "final_re": run.final_state.values().iter().map(|z| z.re).collect::<Vec<_>>(),
        "final_im": run.final_state.values().iter().map(|z| z.im).collect::<Vec<_>>(),
        "reached_t_end": run.status == Status::ReachedTEnd,
    });
    Ok(to_py(py, &out)?.unbind())
}

/// Prediction for `c Q` (`initial = "ground_state"`) or a Gaussian.
#[pyfunction]
#[pyo3(signature = (dim, a, b, alpha, initial = "ground_state", amplitude = 1.0, width = 1.0, points = 8192, r_max = 30.0))]
#[allow(clippy::too_many_arguments)]
fn classify(
    py: Python<'_>,
    dim: u32,
    a: f64,
    b: f64,
    alpha: f64,
    initial: &str,
    amplitude: f64,
    width: f64,
    points: usize,
    r_max: f64,
) -> PyResult<String> {
    let p = params(dim, a, b, alpha, true)?;
    let opts = SolverOpts {
        points,
        r_max,
        ..SolverOpts::default()
    };
    let gs = py.detach(|| solve_ground_state(&p, &opts)).map_err(err)?;
    let g = gs.profile.grid_arc().clone();
    let u0 = match initial {
        "ground_state" => gs.profile.scaled_re(amplitude),
        "gaussian" => RadialField::gaussian(g, amplitude, width),
        "regular_gaussian" => RadialField::regular_gaussian(g, a, amplitude, width),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown initial data `{other}`"
            )))
        }
    };
    let th = thresholds(&gs, &p).map_err(err)?;
    Ok(format!(
        "{:?}",
        classify_initial_data(&u0, &th, &p).map_err(err)?
    ))
}

/// Pass/fail of every applicable exponent construction, with the failing checks.
#[pyfunction]
#[pyo3(signature = (dim, a, b, alpha, theta = 1e-3, eps = 1e-3))]
fn verify_pairs(
    py: Python<'_>,
    dim: u32,
    a: f64,
    b: f64,
    alpha: f64,
    theta: f64,
    eps: f64,
) -> PyResult<Py<PyAny>> {
    let p = params(dim, a, b, alpha, true)?;
    let (th, ep) = (Value::from_decimal(theta), Value::from_decimal(eps));
    let mut out = serde_json::Map::new();
    for c in applicable_constructions(&p) {
        let rep = verify_with_small_parameters(c, &p, &th, &ep, 40).map_err(err)?;
        let failures: Vec<String> = rep
            .failures()
            .iter()
            .map(|f| format!("{}: {}", f.subject, f.name))
            .collect();
        out.insert(c.name().into(), json!({ "passed": rep.passed, "theta": rep.theta.to_f64(), "eps": rep.epsilon.to_f64(), "failures": failures }));
    }
    Ok(to_py(py, &Json::Object(out))?.unbind())
}

#[pymodule]
fn inls_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(derive_indices, m)?)?;
    m.add_function(wrap_pyfunction!(check_hypotheses, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_pairs, m)?)?;
    Ok(())
}
