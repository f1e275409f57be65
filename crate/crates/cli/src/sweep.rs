use std::path::{Path, PathBuf};

use inls_core::dynamics::evolve;
use inls_core::groundstate::{solve_ground_state, Prediction};
use inls_core::model::Sign;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{classify, initial_field, prediction_name, write_run, Failure};
use crate::config::{RunConfig, SweepBlock};
use crate::output::{ensure_dir, float, write_json};
use crate::ExitCode;

const AXES: [&str; 4] = ["a", "b", "alpha", "amplitude"];

/// One grid point of the sweep: a value for each swept axis, in `AXES` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub values: Vec<(&'static str, f64)>,
}

impl Point {
    /// Deterministic directory name, e.g. `a=0.5_alpha=2`.
    pub fn name(&self) -> String {
        if self.values.is_empty() {
            return "base".into();
        }
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("_")
    }

    fn apply(&self, base: &RunConfig) -> Result<RunConfig, String> {
        let mut cfg = base.clone();
        for (axis, v) in &self.values {
            match *axis {
                "a" => cfg.model.a = *v,
                "b" => cfg.model.b = *v,
                "alpha" => cfg.model.alpha = *v,
                _ => {
                    let data = cfg
                        .initial_data
                        .as_ref()
                        .ok_or("amplitude axis needs [initial_data]")?;
                    cfg.initial_data = Some(
                        data.with_amplitude(*v)
                            .ok_or("amplitude axis cannot scale data read from a file")?,
                    );
                }
            }
        }
        cfg.model.params().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

pub fn grid_points(sweep: &SweepBlock) -> Result<Vec<Point>, String> {
    if let Some(bad) = sweep.axes.keys().find(|k| !AXES.contains(&k.as_str())) {
        return Err(format!(
            "[sweep]: unknown axis `{bad}` (allowed: {})",
            AXES.join(", ")
        ));
    }
    let axes: Vec<(&'static str, &Vec<f64>)> = AXES
        .iter()
        .filter_map(|k| sweep.axes.get(*k).map(|v| (*k, v)))
        .collect();
    if let Some((k, _)) = axes.iter().find(|(_, v)| v.is_empty()) {
        return Err(format!("[sweep]: axis `{k}` has no values"));
    }
    let size = axes
        .iter()
        .try_fold(1usize, |n, (_, v)| n.checked_mul(v.len()))
        .unwrap_or(usize::MAX);
    if size > sweep.cap {
        return Err(format!(
            "[sweep]: {size} grid points exceed the cap of {}",
            sweep.cap
        ));
    }
    let mut points = vec![Point { values: Vec::new() }];
    for (k, vals) in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |v| {
                    let mut q = p.clone();
                    q.values.push((k, *v));
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSummary {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub amplitude: Option<f64>,
    pub prediction: String,
    pub observed: String,
    pub t_star: Option<f64>,
    pub error: Option<String>,
}

fn run_point(cfg: &RunConfig, dir: &Path) -> Result<PointSummary, Failure> {
    let params = cfg.params();
    let data = cfg
        .initial_data
        .as_ref()
        .ok_or_else(|| Failure::config("missing [initial_data] section"))?;
    let (u0, gs) = initial_field(cfg, data, &params)?;
    let prediction = if params.lambda == Sign::Defocusing {
        prediction_name(Prediction::NoPrediction)
    } else {
        let gs = match gs {
            Some(gs) => Ok(gs),
            None => solve_ground_state(&params, &cfg.solver.opts(&cfg.grid, &params)),
        };
        match gs {
            Ok(gs) => prediction_name(classify(cfg, &u0, &gs, &params)?.prediction),
            Err(e) => format!("unavailable: {e}"),
        }
    };
    let run = evolve(&u0, &params, &cfg.evolution)?;
    let summary = write_run(dir, &run, &params)?;
    write_json(&dir.join("run.json"), &summary)?;
    Ok(PointSummary {
        a: params.a,
        b: params.b,
        alpha: params.alpha,
        amplitude: data.amplitude(),
        prediction,
        observed: run.status.as_str().to_string(),
        t_star: run.t_star,
        error: None,
    })
}

const DONE: &str = "summary.json";

/// Runs every grid point not already completed, then assembles `phase.csv`.
pub fn cmd_sweep(
    base: &RunConfig,
    out: &Path,
    workers: Option<usize>,
    resume: bool,
) -> Result<ExitCode, Failure> {
    let sweep = base
        .sweep
        .clone()
        .ok_or_else(|| Failure::config("missing [sweep] section"))?;
    let points = grid_points(&sweep)?;
    let configs: Vec<(PathBuf, RunConfig)> = points
        .iter()
        .map(|p| {
            Ok((
                out.join("runs").join(p.name()),
                p.apply(base).map_err(|e| format!("{}: {e}", p.name()))?,
            ))
        })
        .collect::<Result<_, String>>()?;
    ensure_dir(&out.join("runs"))?;
    let pending: Vec<&(PathBuf, RunConfig)> = configs
        .iter()
        .filter(|(dir, _)| !(resume && dir.join(DONE).exists()))
        .collect();
    log::info!("sweep: {} points, {} to run", configs.len(), pending.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.or(sweep.workers).unwrap_or(0))
        .build()
        .map_err(|e| Failure::config(e.to_string()))?;
    let written: Vec<Result<(), String>> = pool.install(|| {
        pending
            .par_iter()
            .map(|(dir, cfg)| {
                ensure_dir(dir)?;
                let summary = run_point(cfg, dir).unwrap_or_else(|f| {
                    let p = cfg.params();
                    PointSummary {
                        a: p.a,
                        b: p.b,
                        alpha: p.alpha,
                        amplitude: cfg.initial_data.as_ref().and_then(|d| d.amplitude()),
                        prediction: String::new(),
                        observed: "error".into(),
                        t_star: None,
                        error: Some(f.message),
                    }
                });
                write_json(&dir.join(DONE), &summary)
            })
            .collect()
    });
    for r in &written {
        r.as_ref().map_err(|e| Failure::config(e.clone()))?;
    }

    let mut w = csv::Writer::from_path(out.join("phase.csv"))
        .map_err(|e| Failure::config(e.to_string()))?;
    w.write_record([
        "a",
        "b",
        "alpha",
        "amplitude",
        "prediction",
        "observed",
        "t_star_or_blank",
    ])
    .map_err(|e| Failure::config(e.to_string()))?;
    let mut failed = 0;
    for (dir, _) in &configs {
        let path = dir.join(DONE);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let s: PointSummary = serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        if let Some(e) = &s.error {
            failed += 1;
            log::error!("{}: {e}", dir.display());
        }
        let opt = |x: Option<f64>| x.map(float).unwrap_or_default();
        w.write_record([
            float(s.a),
            float(s.b),
            float(s.alpha),
            opt(s.amplitude),
            s.prediction,
            s.observed,
            opt(s.t_star),
        ])
        .map_err(|e| Failure::config(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::config(e.to_string()))?;
    println!(
        "sweep: {} points, {} run now, {failed} failed",
        configs.len(),
        pending.len()
    );
    Ok(if failed == 0 {
        ExitCode::Ok
    } else {
        ExitCode::Unresolved
    })
}
