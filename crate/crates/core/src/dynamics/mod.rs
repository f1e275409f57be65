//! Strang-split time stepping of the radial equation with conservation and virial tracking.
//!
//! The state is carried in the regular variable `v = r^rho u`. The linear half is
//! Crank–Nicolson on the semi-discrete flow `i V v_t = S v`, the nonlinear half is the exact
//! phase rotation of `i v_t = -lambda (W/V) |v|^alpha v`. Both sub-flows preserve the discrete
//! mass `v* V v`, and their composition conserves the discrete energy to second order.

mod audit;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandLu;
use crate::model::ModelParams;
use crate::radial::{RadialField, RadialScheme, VirialWeight};

pub use audit::{
    scattering_diagnostic, smallest_valid_radius, truncated_virial_check, virial_audit,
    TruncatedCheck, VirialAudit,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Accepted steps between trajectory records.
    pub snapshot_every: usize,
    pub blowup_gradient_factor: f64,
    pub blowup_linf_factor: f64,
    /// Halve `dt` and retry a step whose mass or energy drift exceeds the tolerances.
    pub adapt: bool,
    pub max_steps: usize,
    pub mass_drift_tol: f64,
    /// Per-step energy change relative to `K/2 + |P|/(alpha+2)` of the initial data. As the
    /// solution concentrates the same absolute budget forces ever smaller steps.
    pub energy_drift_tol: f64,
    /// Adaptation gives up below this step; `None` means `dt * 2^-24`.
    pub min_dt: Option<f64>,
    pub virial_weight: VirialWeight,
    /// Times at which the full state is stored (hit exactly).
    pub snapshot_times: Vec<f64>,
    /// Also store the state with every trajectory record.
    pub keep_states: bool,
    /// Drop the nonlinear sub-step (free evolution).
    pub linear_only: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: 1e-3,
            t_end: 1.0,
            snapshot_every: 10,
            blowup_gradient_factor: 1e3,
            blowup_linf_factor: 1e2,
            adapt: true,
            max_steps: 10_000_000,
            mass_drift_tol: 1e-10,
            energy_drift_tol: 1e-7,
            min_dt: None,
            virial_weight: VirialWeight::Quadratic,
            snapshot_times: Vec::new(),
            keep_states: false,
            linear_only: false,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be >= 1".into());
        }
        if !(self.blowup_gradient_factor > 1.0 && self.blowup_linf_factor > 1.0) {
            return bad("blow-up factors must exceed 1".into());
        }
        if !(self.mass_drift_tol > 0.0 && self.energy_drift_tol > 0.0) {
            return bad("drift tolerances must be positive".into());
        }
        if let Some(m) = self.min_dt {
            if !(m > 0.0 && m <= self.dt) {
                return bad(format!("min_dt must lie in (0, dt], got {m}"));
            }
        }
        if self
            .snapshot_times
            .iter()
            .any(|t| !t.is_finite() || *t < 0.0)
        {
            return bad("snapshot times must be finite and non-negative".into());
        }
        self.virial_weight.validate()
    }

    fn min_dt(&self) -> f64 {
        self.min_dt.unwrap_or(self.dt * 2f64.powi(-24))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Running,
    ReachedTEnd,
    BlowupDetected,
    Unresolved,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::Running
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "Running",
            Status::ReachedTEnd => "ReachedTEnd",
            Status::BlowupDetected => "BlowupDetected",
            Status::Unresolved => "Unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h1a: f64,
    pub kinetic: f64,
    pub linf: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Vp")]
    pub vp: f64,
    #[serde(rename = "Vpp")]
    pub vpp: f64,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: RadialField,
    pub trajectory: Vec<TrajectoryRecord>,
    pub status: Status,
    /// Time at which blow-up was declared.
    pub t_star: Option<f64>,
    pub states: Vec<(f64, RadialField)>,
    pub weight: VirialWeight,
    pub steps: usize,
    pub rejected: usize,
    pub dt_initial: f64,
    pub dt_final: f64,
    /// `(t, dt)`: the step in force from time `t` on.
    pub dt_history: Vec<(f64, f64)>,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
}

/// Linear and nonlinear sub-flows on a fixed grid, with the Crank–Nicolson factorizations cached
/// per step size.
pub struct Propagator {
    scheme: RadialScheme,
    /// `r^{-rho}`, to read `|u|` off `v`.
    lift: Vec<f64>,
    cache: Vec<(f64, BandLu<Complex64>)>,
}

const CACHE_LEN: usize = 4;

impl Propagator {
    pub fn new(grid: Arc<crate::radial::RadialGrid>, params: &ModelParams) -> Result<Self> {
        let scheme = RadialScheme::new(grid, params)?;
        let rho = scheme.rho();
        let lift = scheme.grid().r().iter().map(|r| r.powf(-rho)).collect();
        Ok(Propagator {
            scheme,
            lift,
            cache: Vec::new(),
        })
    }

    pub fn scheme(&self) -> &RadialScheme {
        &self.scheme
    }

    fn factor(&mut self, dt: f64) -> Result<usize> {
        if let Some(k) = self.cache.iter().position(|(h, _)| *h == dt) {
            return Ok(k);
        }
        let diag: Vec<Complex64> = self
            .scheme
            .mass_weights()
            .iter()
            .map(|&m| Complex64::new(m, 0.0))
            .collect();
        let a = self
            .scheme
            .stiffness()
            .map(|x| Complex64::new(0.0, 0.5 * dt * x))
            .scaled_plus_diag(Complex64::new(1.0, 0.0), &diag);
        let lu = a.factor()?;
        if self.cache.len() == CACHE_LEN {
            self.cache.remove(0);
        }
        self.cache.push((dt, lu));
        Ok(self.cache.len() - 1)
    }

    /// `(V + i dt/2 S) v+ = (V - i dt/2 S) v`, solved for the increment `v+ - v = -(V + i dt/2 S)^{-1} i dt S v`
    /// so the solver error scales with the change rather than with `v`.
    pub fn linear_step_v(&mut self, v: &mut [Complex64], dt: f64) -> Result<()> {
        let k = self.factor(dt)?;
        let mut inc = self.scheme.apply_stiffness(v);
        let c = Complex64::new(0.0, dt);
        inc.iter_mut().for_each(|x| *x *= c);
        self.cache[k].1.solve_in_place(&mut inc);
        for (x, d) in v.iter_mut().zip(&inc) {
            *x -= d;
        }
        Ok(())
    }

    /// `v_j <- v_j exp(i lambda dt c_j |v_j|^alpha)` with `c_j = W_j / V_j ~ r_j^{-b} r_j^{-rho alpha}`.
    pub fn nonlinear_step_v(&self, v: &mut [Complex64], dt: f64) -> Result<()> {
        let p = self.scheme.params();
        let s = p.lambda_value() * dt;
        for (j, (x, c)) in v.iter_mut().zip(self.scheme.nonlinear_coef()).enumerate() {
            let theta = s * c * x.norm().powf(p.alpha);
            if !theta.is_finite() {
                return Err(Error::Overflow(j));
            }
            *x *= Complex64::from_polar(1.0, theta);
        }
        Ok(())
    }

    pub fn strang_step_v(&mut self, v: &mut [Complex64], dt: f64, linear_only: bool) -> Result<()> {
        if !linear_only {
            self.nonlinear_step_v(v, 0.5 * dt)?;
        }
        self.linear_step_v(v, dt)?;
        if !linear_only {
            self.nonlinear_step_v(v, 0.5 * dt)?;
        }
        Ok(())
    }

    fn linf_u(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(&self.lift)
            .map(|(x, l)| x.norm() * l)
            .fold(0.0, f64::max)
    }

    fn record(
        &self,
        v: &[Complex64],
        t: f64,
        weight: &VirialWeight,
        status: Status,
    ) -> TrajectoryRecord {
        let s = &self.scheme;
        let mass = s.mass_v(v);
        let kinetic = s.kinetic_v(v);
        let tri = s.virial_v(v, weight);
        TrajectoryRecord {
            t,
            mass,
            energy: s.energy_v(v),
            h1a: (mass + kinetic).max(0.0).sqrt(),
            kinetic,
            linf: self.linf_u(v),
            v: tri.v,
            vp: tri.vp,
            vpp: tri.vpp,
            status,
        }
    }
}

/// One Crank–Nicolson step of `i u_t = L_a u`.
pub fn linear_step(u: &RadialField, dt: f64, params: &ModelParams) -> Result<RadialField> {
    let mut p = Propagator::new(u.grid_arc().clone(), params)?;
    let mut v = p.scheme.to_v(u);
    p.linear_step_v(&mut v, dt)?;
    Ok(p.scheme.from_v(&v))
}

/// Exact flow of `i u_t = -lambda r^{-b} |u|^alpha u` over `dt`.
pub fn nonlinear_step(u: &RadialField, dt: f64, params: &ModelParams) -> Result<RadialField> {
    let p = Propagator::new(u.grid_arc().clone(), params)?;
    let mut v = p.scheme.to_v(u);
    p.nonlinear_step_v(&mut v, dt)?;
    Ok(p.scheme.from_v(&v))
}

#[derive(Clone, Copy)]
struct Invariants {
    mass: f64,
    kinetic: f64,
    /// Energy of the flow being integrated: without the nonlinearity only `K/2` is conserved.
    energy: f64,
    scale: f64,
}

fn invariants(s: &RadialScheme, v: &[Complex64], linear_only: bool) -> Invariants {
    let mass = s.mass_v(v);
    let kinetic = s.kinetic_v(v);
    let (energy, scale) = if linear_only {
        (0.5 * kinetic, 0.5 * kinetic.abs())
    } else {
        let al = s.params().alpha;
        let p = s.potential_v(v);
        (
            0.5 * kinetic - s.params().lambda_value() / (al + 2.0) * p,
            0.5 * kinetic.abs() + p.abs() / (al + 2.0),
        )
    };
    Invariants {
        mass,
        kinetic,
        energy,
        scale,
    }
}

impl Invariants {
    /// Mass change relative to `prev`, energy change relative to `scale`.
    fn drift(&self, prev: &Invariants, scale: f64) -> (f64, f64) {
        let dm = (self.mass - prev.mass).abs() / prev.mass.max(f64::MIN_POSITIVE);
        let de = if scale > 0.0 {
            (self.energy - prev.energy).abs() / scale
        } else {
            0.0
        };
        (dm, de)
    }
}

/// Runs the split-step scheme from `u0` until `t_end`, blow-up, or `max_steps`.
///
/// Blow-up is declared once the kinetic energy or the sup norm has grown past the configured
/// factors; a run whose step has to be cut below `min_dt` without such growth is `Unresolved`.
pub fn evolve(u0: &RadialField, params: &ModelParams, cfg: &EvolutionConfig) -> Result<Evolution> {
    cfg.validate()?;
    let mut prop = Propagator::new(u0.grid_arc().clone(), params)?;
    let mut v = prop.scheme.to_v(u0);
    let weight = cfg.virial_weight;

    let first = prop.record(&v, 0.0, &weight, Status::Running);
    let (k0, linf0) = (first.kinetic, first.linf);
    let mut trajectory = vec![first];
    let mut states = Vec::new();
    let mut targets: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= cfg.t_end)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let mut next_target = 0;
    while next_target < targets.len() && targets[next_target] <= 0.0 {
        states.push((0.0, u0.clone()));
        next_target += 1;
    }
    if cfg.keep_states {
        states.push((0.0, u0.clone()));
    }

    let min_dt = cfg.min_dt();
    let mut dt = cfg.dt;
    let mut dt_history = vec![(0.0, dt)];
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut since_record = 0usize;
    let mut status = Status::Running;
    let mut t_star = None;
    let mut max_mass_drift: f64 = 0.0;
    let mut max_energy_drift: f64 = 0.0;
    let mut current = invariants(&prop.scheme, &v, cfg.linear_only);
    let energy_scale = current.scale;

    while status == Status::Running {
        if t >= cfg.t_end {
            status = Status::ReachedTEnd;
            break;
        }
        if steps >= cfg.max_steps {
            status = Status::Unresolved;
            break;
        }
        // land exactly on t_end and on requested snapshot times
        let stop = targets
            .get(next_target)
            .copied()
            .unwrap_or(cfg.t_end)
            .min(cfg.t_end);
        let remaining = stop - t;
        let (h, lands) = if remaining <= dt * (1.0 + 1e-9) {
            (remaining, true)
        } else {
            (dt, false)
        };

        let mut trial = v.clone();
        let outcome = prop.strang_step_v(&mut trial, h, cfg.linear_only);
        let next = match outcome {
            Ok(()) if trial.iter().all(|x| x.re.is_finite() && x.im.is_finite()) => {
                let next = invariants(&prop.scheme, &trial, cfg.linear_only);
                let (dm, de) = next.drift(&current, energy_scale);
                if !cfg.adapt || (dm <= cfg.mass_drift_tol && de <= cfg.energy_drift_tol) {
                    max_mass_drift = max_mass_drift.max(dm);
                    max_energy_drift = max_energy_drift.max(de);
                    Some(next)
                } else {
                    None
                }
            }
            // overflow counts as a failed step; the run ends Unresolved if dt cannot shrink further
            Ok(()) | Err(Error::Overflow(_)) => None,
            Err(e) => return Err(e),
        };
        let Some(next) = next else {
            rejected += 1;
            if !cfg.adapt || h <= min_dt {
                status = Status::Unresolved;
                break;
            }
            dt = 0.5 * h.min(dt);
            if dt < min_dt {
                status = Status::Unresolved;
                break;
            }
            dt_history.push((t, dt));
            log::debug!("step rejected at t = {t:.6e}, dt -> {dt:.3e}");
            continue;
        };

        v = trial;
        t = if lands { stop } else { t + h };
        steps += 1;
        since_record += 1;
        current = next;

        let linf = prop.linf_u(&v);
        if current.kinetic > cfg.blowup_gradient_factor * k0
            || linf > cfg.blowup_linf_factor * linf0
        {
            status = Status::BlowupDetected;
            t_star = Some(t);
            break;
        }
        if lands && next_target < targets.len() && stop == targets[next_target] {
            states.push((t, prop.scheme.from_v(&v)));
            next_target += 1;
        }
        if since_record == cfg.snapshot_every && t < cfg.t_end {
            since_record = 0;
            trajectory.push(prop.record(&v, t, &weight, Status::Running));
            if cfg.keep_states {
                states.push((t, prop.scheme.from_v(&v)));
            }
        }
    }

    let last = prop.record(&v, t, &weight, status);
    trajectory.push(last);
    if cfg.keep_states {
        states.push((t, prop.scheme.from_v(&v)));
    }
    log::info!(
        "evolution finished: {} at t = {t:.6e} after {steps} steps ({rejected} rejected)",
        status.as_str()
    );
    Ok(Evolution {
        final_state: prop.scheme.from_v(&v),
        trajectory,
        status,
        t_star,
        states,
        weight,
        steps,
        rejected,
        dt_initial: cfg.dt,
        dt_final: dt,
        dt_history,
        max_mass_drift,
        max_energy_drift,
    })
}
