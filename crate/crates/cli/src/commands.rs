use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use inls_core::dynamics::{evolve, scattering_diagnostic, virial_audit, Evolution, Status};
use inls_core::exponents::{
    applicable_constructions, construction_hypotheses, verify_with_small_parameters, Construction,
    Value,
};
use inls_core::groundstate::{
    classify_initial_data, coercivity_gap, mass_from_sharp_constant, pohozaev_residuals,
    scaling_report, solve_ground_state, thresholds, CoercivityGap, GroundState, Prediction,
};
use inls_core::model::{derive_indices, ModelParams, Sign};
use inls_core::radial::{energy, RadialField};
use inls_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::{InitialData, RunConfig};
use crate::output::{ensure_dir, write_field, write_json, write_trajectory};
use crate::ExitCode;

/// A failure that maps onto the exit-code vocabulary.
#[derive(Debug)]
pub struct Failure {
    pub code: ExitCode,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: ExitCode::Error,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => ExitCode::NoConvergence,
            _ => ExitCode::Error,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure::config(message)
    }
}

pub type CmdResult = Result<ExitCode, Failure>;

/// `Q` solves the focusing elliptic problem whatever the sign of the evolution.
fn ground_state(cfg: &RunConfig, params: &ModelParams) -> Result<GroundState, Failure> {
    let focusing = ModelParams {
        lambda: Sign::Focusing,
        ..*params
    };
    Ok(solve_ground_state(
        &focusing,
        &cfg.solver.opts(&cfg.grid, &focusing),
    )?)
}

pub fn cmd_ground(cfg: &RunConfig, out: &Path) -> CmdResult {
    let params = cfg.params();
    let gs = ground_state(cfg, &params)?;
    let p = gs.params;
    ensure_dir(out)?;
    write_field(&out.join("profile.txt"), &gs.profile)?;
    let (res_kinetic, res_potential) = pohozaev_residuals(&gs, &p);
    let summary = json!({
        "params": p,
        "indices": derive_indices(&p)?,
        "mass": gs.mass,
        "kinetic": gs.kinetic,
        "potential": gs.potential,
        "energy": gs.energy,
        "sharp_constant": gs.sharp_constant,
        "weinstein": gs.weinstein(),
        "mass_from_sharp_constant": mass_from_sharp_constant(&p, gs.sharp_constant),
        "pohozaev_residuals": [res_kinetic, res_potential],
        "scaling": scaling_report(&gs),
        "thresholds": thresholds(&gs, &p)?,
        "solver": gs.solver_meta,
    });
    write_json(&out.join("ground.json"), &summary)?;
    println!("ground state: mass {:.12e}, sharp constant {:.12e}, Pohozaev residuals {res_kinetic:.2e} {res_potential:.2e}", gs.mass, gs.sharp_constant);
    Ok(ExitCode::Ok)
}

/// Builds `u0`; the ground state is returned when it had to be computed.
pub fn initial_field(
    cfg: &RunConfig,
    data: &InitialData,
    params: &ModelParams,
) -> Result<(RadialField, Option<GroundState>), Failure> {
    Ok(match data {
        InitialData::Gaussian { amplitude, width } => (
            RadialField::gaussian(cfg.grid.build(params)?, *amplitude, *width),
            None,
        ),
        InitialData::RegularGaussian { amplitude, width } => (
            RadialField::regular_gaussian(cfg.grid.build(params)?, params.a, *amplitude, *width),
            None,
        ),
        InitialData::ScaledGroundState { scale } => {
            let gs = ground_state(cfg, params)?;
            (gs.profile.scaled_re(*scale), Some(gs))
        }
        InitialData::FromFile { path } => {
            let f = File::open(path)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            let u = RadialField::read_text(BufReader::new(f))
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            if u.grid().dim() != params.dim {
                return Err(Failure::config(format!(
                    "{}: field is {}-dimensional, model has N = {}",
                    path.display(),
                    u.grid().dim(),
                    params.dim
                )));
            }
            (u, None)
        }
    })
}

fn require_initial_data(cfg: &RunConfig) -> Result<&InitialData, Failure> {
    cfg.initial_data
        .as_ref()
        .ok_or_else(|| Failure::config("missing [initial_data] section"))
}

pub fn exit_for(status: Status) -> ExitCode {
    match status {
        Status::ReachedTEnd => ExitCode::Ok,
        Status::BlowupDetected => ExitCode::Blowup,
        Status::Unresolved | Status::Running => ExitCode::Unresolved,
    }
}

/// Trajectory, snapshots and the JSON summary of one run.
pub fn write_run(
    out: &Path,
    run: &Evolution,
    params: &ModelParams,
) -> Result<serde_json::Value, Failure> {
    ensure_dir(out)?;
    write_trajectory(&out.join("trajectory.csv"), &run.trajectory)?;
    if !run.states.is_empty() {
        let dir = out.join("states");
        ensure_dir(&dir)?;
        for (k, (t, u)) in run.states.iter().enumerate() {
            write_field(&dir.join(format!("state_{k:05}_t{t:.6}.txt")), u)?;
        }
    }
    write_field(&out.join("final_state.txt"), &run.final_state)?;
    let audit = match virial_audit(&run.trajectory, &run.weight, params) {
        Ok(a) => json!(a),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let scattering = if run.status == Status::ReachedTEnd && run.states.len() >= 2 {
        match scattering_diagnostic(run, params) {
            Ok(inc) => json!(inc
                .iter()
                .map(|(t, x)| json!({ "t": t, "increment": x }))
                .collect::<Vec<_>>()),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        serde_json::Value::Null
    };
    Ok(json!({
        "params": params,
        "status": run.status,
        "t_star": run.t_star,
        "t_final": run.trajectory.last().map(|r| r.t),
        "steps": run.steps,
        "rejected": run.rejected,
        "dt_initial": run.dt_initial,
        "dt_final": run.dt_final,
        "max_mass_drift": run.max_mass_drift,
        "max_energy_drift": run.max_energy_drift,
        "virial_weight": run.weight,
        "virial_audit": audit,
        "scattering": scattering,
    }))
}

pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> CmdResult {
    let params = cfg.params();
    let (u0, _) = initial_field(cfg, require_initial_data(cfg)?, &params)?;
    let run = evolve(&u0, &params, &cfg.evolution)?;
    let summary = write_run(out, &run, &params)?;
    write_json(&out.join("summary.json"), &summary)?;
    println!(
        "{} at t = {}, {} steps ({} rejected)",
        run.status.as_str(),
        summary["t_final"],
        run.steps,
        run.rejected
    );
    Ok(exit_for(run.status))
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub prediction: Prediction,
    pub energy: f64,
    pub gap: Option<CoercivityGap>,
    pub note: Option<String>,
}

/// Prediction for `u0`, plus the coercivity gap when the intercritical blow-up/global
/// alternative applies.
pub fn classify(
    cfg: &RunConfig,
    u0: &RadialField,
    gs: &GroundState,
    params: &ModelParams,
) -> Result<Classification, Failure> {
    let th = thresholds(gs, &gs.params)?;
    let prediction = classify_initial_data(u0, &th, params)?;
    let e = energy(u0, params)?;
    let mut gap = None;
    let mut note = None;
    if matches!(
        prediction,
        Prediction::GlobalBelowThreshold | Prediction::BlowupAboveThreshold
    ) {
        let s = inls_core::radial::RadialScheme::for_field(u0, params)?;
        let me = th.me_of(s.mass(u0), s.energy(u0)).unwrap_or(f64::NAN);
        let level = th.me_level.unwrap_or(f64::NAN);
        let delta0 = cfg.classify.delta_fraction * (1.0 - me / level);
        match coercivity_gap(u0, &th, params, delta0) {
            Ok(g) => gap = Some(g),
            Err(err) => note = Some(err.to_string()),
        }
    }
    Ok(Classification {
        prediction,
        energy: e,
        gap,
        note,
    })
}

/// `None` when the prediction says nothing.
pub fn agreement(prediction: Prediction, observed: Status) -> Option<bool> {
    match prediction {
        Prediction::GlobalBelowGroundMass | Prediction::GlobalBelowThreshold => {
            Some(observed == Status::ReachedTEnd)
        }
        Prediction::BlowupNegativeEnergy | Prediction::BlowupAboveThreshold => {
            Some(observed == Status::BlowupDetected)
        }
        Prediction::NoPrediction => None,
    }
}

/// Same spelling as the status names in the trajectory files.
pub fn prediction_name(p: Prediction) -> String {
    format!("{p:?}")
}

pub fn cmd_classify(cfg: &RunConfig, out: &Path) -> CmdResult {
    let params = cfg.params();
    let (u0, gs) = initial_field(cfg, require_initial_data(cfg)?, &params)?;
    let c = if params.lambda == Sign::Defocusing {
        let note = Some("no threshold statement for the defocusing sign".into());
        Classification {
            prediction: Prediction::NoPrediction,
            energy: energy(&u0, &params)?,
            gap: None,
            note,
        }
    } else {
        let gs = match gs {
            Some(gs) => gs,
            None => ground_state(cfg, &params)?,
        };
        classify(cfg, &u0, &gs, &params)?
    };
    ensure_dir(out)?;
    let observed = if cfg.classify.evolve {
        let run = evolve(&u0, &params, &cfg.evolution)?;
        let summary = write_run(&out.join("run"), &run, &params)?;
        write_json(&out.join("run").join("summary.json"), &summary)?;
        Some((run.status, run.t_star))
    } else {
        None
    };
    let agree = observed.and_then(|(s, _)| agreement(c.prediction, s));
    let report = json!({
        "params": params,
        "classification": c,
        "observed": observed.map(|(s, _)| s),
        "t_star": observed.and_then(|(_, t)| t),
        "agree": agree,
    });
    write_json(&out.join("classify.json"), &report)?;
    println!("prediction: {}", prediction_name(c.prediction));
    if let Some((s, t)) = observed {
        println!(
            "observed: {}{}",
            s.as_str(),
            t.map(|t| format!(" at t* = {t:.6}")).unwrap_or_default()
        );
        println!(
            "agree: {}",
            agree.map_or("n/a".to_string(), |a| a.to_string())
        );
    }
    Ok(ExitCode::Ok)
}

fn parse_construction(name: &str) -> Result<Construction, Failure> {
    serde_json::from_value(json!(name)).map_err(|_| {
        let known: Vec<&str> = Construction::ALL.iter().map(|c| c.name()).collect();
        Failure::config(format!(
            "unknown construction `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

pub fn cmd_pairs(cfg: &RunConfig, out: &Path) -> CmdResult {
    let params = cfg.params();
    let requested: Vec<Construction> = cfg
        .pairs
        .constructions
        .iter()
        .map(|n| parse_construction(n))
        .collect::<Result<_, _>>()?;
    if !(cfg.pairs.theta > 0.0 && cfg.pairs.eps > 0.0) {
        return Err(Failure::config("[pairs]: theta and eps must be positive"));
    }
    let targets = if requested.is_empty() {
        applicable_constructions(&params)
    } else {
        requested.clone()
    };
    let (theta, eps) = (
        Value::from_decimal(cfg.pairs.theta),
        Value::from_decimal(cfg.pairs.eps),
    );
    let mut reports = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for c in &targets {
        match verify_with_small_parameters(*c, &params, &theta, &eps, cfg.pairs.max_halvings) {
            Ok(rep) => {
                for f in rep.failures() {
                    failures.push(format!("{}: {} / {}", c.name(), f.subject, f.name));
                }
                reports.push(json!(rep));
            }
            Err(e) => {
                failures.push(format!("{}: {e}", c.name()));
                reports.push(json!({ "construction": c, "error": e.to_string() }));
            }
        }
    }
    let not_applicable: Vec<_> = Construction::ALL
        .iter()
        .filter(|c| !targets.contains(c))
        .map(|c| {
            let failing: Vec<String> = construction_hypotheses(*c, &params)
                .into_iter()
                .filter(|h| !h.holds())
                .map(|h| h.name)
                .collect();
            json!({ "construction": c, "failing_hypotheses": failing })
        })
        .collect();
    if targets.is_empty() {
        failures.push("no construction applies to these parameters".into());
    }
    ensure_dir(out)?;
    write_json(
        &out.join("pairs.json"),
        &json!({
            "params": params,
            "passed": failures.is_empty(),
            "reports": reports,
            "not_applicable": not_applicable,
            "failures": failures,
        }),
    )?;
    for c in &targets {
        println!("checked {}", c.name());
    }
    for f in &failures {
        eprintln!("FAILED {f}");
    }
    Ok(if failures.is_empty() {
        ExitCode::Ok
    } else {
        ExitCode::ChecksFailed
    })
}
