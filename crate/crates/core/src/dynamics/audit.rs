//! Post-processing of trajectories: virial identity audit, truncated-virial bounds and the
//! Cauchy test for the scattering profile.

use num_complex::Complex64;
use serde::Serialize;

use super::{Evolution, Propagator, Status, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::radial::{RadialField, VirialWeight};

#[derive(Debug, Clone, Serialize)]
pub struct VirialAudit {
    pub samples: usize,
    /// Largest `|d2V/dt2 - identity| / max|identity|` over interior samples, where the
    /// identity is `8K - 4 lambda (N alpha + 2b)/(alpha+2) P` evaluated at the sample.
    pub fd_vs_identity: f64,
    /// Same comparison for the recorded integral `V''`.
    pub recorded_vs_identity: f64,
    pub fd_vs_recorded: f64,
    /// `|dV/dt - V'|` relative to `max|V'|`.
    pub first_derivative: f64,
    /// `16 E[u0]`, set in the mass-critical regime where the identity reduces to it.
    pub target_16e: Option<f64>,
    pub fd_vs_16e: Option<f64>,
}

/// Right-hand side of the virial identity from the recorded `K` and `E`.
fn identity(rec: &TrajectoryRecord, params: &ModelParams) -> f64 {
    let nb = params.pohozaev_b();
    // lambda P / (alpha+2) = K/2 - E
    8.0 * rec.kinetic - 4.0 * nb * (0.5 * rec.kinetic - rec.energy)
}

/// Compares finite differences of the recorded `V` against the recorded `V'`, `V''` and the
/// closed-form identity. Needs the quadratic weight and at least five samples.
pub fn virial_audit(
    trajectory: &[TrajectoryRecord],
    weight: &VirialWeight,
    params: &ModelParams,
) -> Result<VirialAudit> {
    if *weight != VirialWeight::Quadratic {
        return Err(Error::Precondition(
            "the virial audit needs the quadratic weight".into(),
        ));
    }
    if trajectory.len() < 5 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            got: trajectory.len(),
        });
    }
    let ids: Vec<f64> = trajectory.iter().map(|r| identity(r, params)).collect();
    let id_scale = ids
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let vp_scale = trajectory
        .iter()
        .fold(0.0f64, |a, r| a.max(r.vp.abs()))
        .max(f64::MIN_POSITIVE);
    let e0 = trajectory[0].energy;
    let critical = crate::model::derive_indices(params)?.regime == Regime::MassCritical;
    let target = critical.then_some(16.0 * e0);

    let mut samples = 0;
    let (mut fd_id, mut rec_id, mut fd_rec, mut first, mut fd_t): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 1..trajectory.len() - 1 {
        let (a, b, c) = (&trajectory[i - 1], &trajectory[i], &trajectory[i + 1]);
        let (h1, h2) = (b.t - a.t, c.t - b.t);
        // uneven gaps (a final partial step) amplify rounding in the second difference
        if !(h1 > 0.0 && h2 > 0.0) || h1 > 2.0 * h2 || h2 > 2.0 * h1 {
            continue;
        }
        samples += 1;
        let d2 = 2.0 * ((c.v - b.v) / h2 - (b.v - a.v) / h1) / (h1 + h2);
        let d1 = (h1 * h1 * (c.v - b.v) + h2 * h2 * (b.v - a.v)) / (h1 * h2 * (h1 + h2));
        fd_id = fd_id.max((d2 - ids[i]).abs() / id_scale);
        rec_id = rec_id.max((b.vpp - ids[i]).abs() / id_scale);
        fd_rec = fd_rec.max((d2 - b.vpp).abs() / id_scale);
        first = first.max((d1 - b.vp).abs() / vp_scale);
        if let Some(t) = target {
            fd_t = fd_t.max((d2 - t).abs() / t.abs().max(f64::MIN_POSITIVE));
        }
    }
    if samples < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples,
        });
    }
    Ok(VirialAudit {
        samples,
        fd_vs_identity: fd_id,
        recorded_vs_identity: rec_id,
        fd_vs_recorded: fd_rec,
        first_derivative: first,
        target_16e: target,
        fd_vs_16e: target.map(|_| fd_t),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedCheck {
    pub weight: VirialWeight,
    pub max_vpp: f64,
    pub worst_t: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `max_t V''_R(t) <= bound + slack |bound|` over stored states.
pub fn truncated_virial_check(
    states: &[(f64, RadialField)],
    params: &ModelParams,
    weight: VirialWeight,
    bound: f64,
    slack: f64,
) -> Result<TruncatedCheck> {
    weight.validate()?;
    let Some((_, first)) = states.first() else {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    };
    let prop = Propagator::new(first.grid_arc().clone(), params)?;
    let s = prop.scheme();
    let mut max_vpp = f64::NEG_INFINITY;
    let mut worst_t = 0.0;
    for (t, u) in states {
        u.check_same_grid(first)?;
        let vpp = s.virial_second_v(&s.to_v(u), &weight);
        if vpp > max_vpp {
            max_vpp = vpp;
            worst_t = *t;
        }
    }
    Ok(TruncatedCheck {
        weight,
        max_vpp,
        worst_t,
        bound,
        slack,
        holds: max_vpp <= bound + slack * bound.abs(),
    })
}

/// Tries the radii in increasing order and returns the first for which the truncated bound holds,
/// together with every check performed.
pub fn smallest_valid_radius(
    states: &[(f64, RadialField)],
    params: &ModelParams,
    radii: &[f64],
    weight_at: impl Fn(f64) -> VirialWeight,
    bound: f64,
    slack: f64,
) -> Result<(Option<f64>, Vec<TruncatedCheck>)> {
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut checks = Vec::new();
    for r in sorted {
        let c = truncated_virial_check(states, params, weight_at(r), bound, slack)?;
        let ok = c.holds;
        checks.push(c);
        if ok {
            return Ok((Some(r), checks));
        }
    }
    Ok((None, checks))
}

/// Splits `[t0, t1]` into `(length, dt)` pieces following the step-size history.
fn step_segments(history: &[(f64, f64)], t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (k, &(start, dt)) in history.iter().enumerate() {
        let end = history.get(k + 1).map_or(f64::INFINITY, |h| h.0);
        let (a, b) = (start.max(t0), end.min(t1));
        if b > a {
            out.push((b - a, dt));
        }
    }
    out
}

/// Cauchy increments `||phi(t_{k+1}) - phi(t_k)||_{H^1_a}` of `phi(t) = e^{i t L_a} u(t)` over the
/// stored states, labelled by `t_{k+1}`.
///
/// The discrete propagator preserves both `M` and `K`, so the increment equals
/// `||e^{i (t_{k+1} - t_k) L_a} u(t_{k+1}) - u(t_k)||` and only the gap has to be flowed back.
/// The backward flow uses the step sizes of the forward run: Crank–Nicolson with a different step
/// has a different dispersion error, which would show up as a spurious drift of `phi`.
pub fn scattering_diagnostic(run: &Evolution, params: &ModelParams) -> Result<Vec<(f64, f64)>> {
    if run.status != Status::ReachedTEnd {
        return Err(Error::Precondition(format!(
            "scattering diagnostic needs a run that reached t_end, got {}",
            run.status.as_str()
        )));
    }
    if run.states.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: run.states.len(),
        });
    }
    let mut prop = Propagator::new(run.states[0].1.grid_arc().clone(), params)?;
    let mut out = Vec::with_capacity(run.states.len() - 1);
    for pair in run.states.windows(2) {
        let ((t0, u0), (t1, u1)) = (&pair[0], &pair[1]);
        let gap = t1 - t0;
        if gap <= 0.0 {
            return Err(Error::Precondition(
                "state snapshots must be at increasing times".into(),
            ));
        }
        let mut v = prop.scheme().to_v(u1);
        for (len, dt) in step_segments(&run.dt_history, *t0, *t1).into_iter().rev() {
            let n = (len / dt).round().max(1.0) as usize;
            let h = len / n as f64;
            for _ in 0..n {
                prop.linear_step_v(&mut v, -h)?;
            }
        }
        let w = prop.scheme().to_v(u0);
        let diff: Vec<Complex64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
        out.push((*t1, prop.scheme().h1a_norm_v(&diff)));
    }
    Ok(out)
}
