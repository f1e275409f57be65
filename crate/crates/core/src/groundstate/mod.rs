//! Ground states `L_a Q + Q - |x|^{-b} Q^{alpha+1} = 0`, the sharp Gagliardo-Nirenberg
//! constant they realize, and the threshold quantities built from them.

mod discrete;
mod shooting;
mod thresholds;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use thresholds::{
    classify_initial_data, coercivity_gap, thresholds, CoercivityGap, Prediction, Side, Thresholds,
};

use crate::error::{Error, Result};
use crate::model::{ground_state_hypotheses, ModelParams};
use crate::radial::{weinstein_from_parts, GridMap, RadialField, RadialGrid, RadialScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Shooting,
    GradientFlow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOpts {
    pub method: Method,
    pub tol: f64,
    /// Bisection steps for shooting, descent steps for the flow. `None` picks the method default.
    pub max_iter: Option<usize>,
    pub points: usize,
    pub r_max: f64,
    /// `None` clusters nodes at the origin whenever the nonlinear weight is singular there.
    pub map: Option<GridMap>,
    /// Finish with Newton on the discrete equations.
    pub polish: bool,
    /// Pseudo-time step of the flow.
    pub tau: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            method: Method::Shooting,
            tol: 1e-8,
            max_iter: None,
            points: 8192,
            r_max: 30.0,
            map: None,
            polish: true,
            tau: 1e3,
        }
    }
}

impl SolverOpts {
    pub fn with_method(method: Method) -> Self {
        SolverOpts {
            method,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverMeta {
    pub method: Method,
    pub iterations: usize,
    pub polish_iterations: usize,
    /// `||L_a Q + Q - r^{-b} Q^{alpha+1}|| / ||Q||_{H^1_a}` on the grid.
    pub residual: f64,
    /// Value of the regular part `r^rho Q` at the origin (shooting only).
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub params: ModelParams,
    pub profile: RadialField,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
    pub sharp_constant: f64,
    pub solver_meta: SolverMeta,
}

impl GroundState {
    fn assemble(scheme: &RadialScheme, v: &[f64], meta: SolverMeta) -> Result<Self> {
        let params = *scheme.params();
        let mass = scheme.mass_real(v);
        let kinetic = scheme.kinetic_real(v);
        let potential = scheme.potential_real(v);
        if potential <= 0.0 {
            return Err(Error::DivisionByZero("sharp constant"));
        }
        let energy = 0.5 * kinetic - potential / (params.alpha + 2.0);
        let vc: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(GroundState {
            params,
            profile: scheme.from_v(&vc),
            mass,
            kinetic,
            potential,
            energy,
            sharp_constant: 1.0 / weinstein_from_parts(&params, mass, kinetic, potential),
            solver_meta: meta,
        })
    }

    pub fn scheme(&self) -> Result<RadialScheme> {
        RadialScheme::for_field(&self.profile, &self.params)
    }

    /// `J_a(Q)`, the minimum of the Weinstein functional.
    pub fn weinstein(&self) -> f64 {
        1.0 / self.sharp_constant
    }

    pub fn h1a_norm(&self) -> f64 {
        (self.mass + self.kinetic).sqrt()
    }
}

/// The profile is `s - c r^{2 - b_eff} + ...` near the origin, with `b_eff = b + rho alpha`; unless
/// that exponent is an even integer a uniform mesh only converges at a reduced rate.
pub fn default_map(params: &ModelParams) -> GridMap {
    let b_eff = params.b + crate::model::rho(params.dim, params.a) * params.alpha;
    if b_eff.abs() < 1e-12 {
        GridMap::Uniform
    } else {
        GridMap::Clustered {
            kappa: 200.0,
            ell: 0.5,
        }
    }
}

/// Computes the positive ground state on a fresh grid built from `opts`.
pub fn solve_ground_state(params: &ModelParams, opts: &SolverOpts) -> Result<GroundState> {
    ground_state_hypotheses(params)?;
    opts.validate()?;
    let map = opts.map.unwrap_or_else(|| default_map(params));
    let grid = Arc::new(RadialGrid::new(params.dim, opts.points, opts.r_max, map)?);
    let scheme = RadialScheme::new(grid.clone(), params)?;
    let (mut v, iterations, amplitude) = match opts.method {
        Method::Shooting => {
            let profile = shooting::Profile {
                d: scheme.effective_dim(),
                b: scheme.effective_b(),
                alpha: params.alpha,
            };
            let res = shooting::shoot(profile, grid.r(), opts.max_iter.unwrap_or(200))?;
            log::debug!(
                "shooting: s = {:.16e} after {} bisections, tail from r = {:.3}",
                res.amplitude,
                res.iterations,
                res.r_cut
            );
            (res.values, res.iterations, Some(res.amplitude))
        }
        Method::GradientFlow => {
            let v0: Vec<f64> = grid.r().iter().map(|r| 1.0 / r.cosh()).collect();
            let (v, it, res) = discrete::gradient_flow(
                &scheme,
                v0,
                opts.tau,
                opts.tol,
                opts.max_iter.unwrap_or(20_000),
            )?;
            log::debug!("flow converged in {it} steps, residual {res:.3e}");
            (v, it, None)
        }
    };
    let mut polish_iterations = 0;
    if opts.polish {
        let (w, it, _) = discrete::newton(&scheme, v, 50)?;
        v = w;
        polish_iterations = it;
    }
    let residual = discrete::relative_residual(&scheme, &v);
    if opts.polish && residual >= opts.tol {
        return Err(Error::NoConvergence {
            iterations: polish_iterations,
            residual,
        });
    }
    let interior = &v[..v.len() - 1];
    if interior.iter().any(|&x| x <= 0.0) {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    let meta = SolverMeta {
        method: opts.method,
        iterations,
        polish_iterations,
        residual,
        amplitude,
    };
    GroundState::assemble(&scheme, &v, meta)
}

/// Relative defects of `K = B/A M` and `P = 2(alpha+2)/A M`, with
/// `A = 4 - 2b - alpha(N-2)` and `B = N alpha + 2b`.
pub fn pohozaev_residuals(gs: &GroundState, params: &ModelParams) -> (f64, f64) {
    pohozaev_from_parts(params, gs.mass, gs.kinetic, gs.potential)
}

pub fn pohozaev_from_parts(
    params: &ModelParams,
    mass: f64,
    kinetic: f64,
    potential: f64,
) -> (f64, f64) {
    let a = params.pohozaev_a();
    let b = params.pohozaev_b();
    let res1 = (kinetic - b / a * mass).abs() / kinetic;
    let res2 = (potential - 2.0 * (params.alpha + 2.0) / a * mass).abs() / potential;
    (res1, res2)
}

/// Pohozaev residuals of an arbitrary real profile (used for sensitivity checks).
pub fn pohozaev_residuals_of(u: &RadialField, params: &ModelParams) -> Result<(f64, f64)> {
    let s = RadialScheme::for_field(u, params)?;
    let v = s.to_v(u);
    Ok(pohozaev_from_parts(
        params,
        s.mass_v(&v),
        s.kinetic_v(&v),
        s.potential_v(&v),
    ))
}

pub fn sharp_constant(gs: &GroundState) -> f64 {
    1.0 / weinstein_from_parts(&gs.params, gs.mass, gs.kinetic, gs.potential)
}

/// Mass of any solution in terms of the sharp constant:
/// `M^{alpha/2} = 2(alpha+2)/(A C_a) (A/B)^{B/4}`.
pub fn mass_from_sharp_constant(params: &ModelParams, c_a: f64) -> f64 {
    let a = params.pohozaev_a();
    let b = params.pohozaev_b();
    let al = params.alpha;
    (2.0 * (al + 2.0) / (a * c_a) * (a / b).powf(b / 4.0)).powf(2.0 / al)
}

/// The closed form `{2(alpha+2)/B A^{(N alpha - (4-2b))/4} / C_a}^{1/(alpha+2)}` as it is usually
/// quoted. It does not agree with `mass_from_sharp_constant`; kept for comparison only.
pub fn quoted_mass_formula(params: &ModelParams, c_a: f64) -> f64 {
    let a = params.pohozaev_a();
    let b = params.pohozaev_b();
    let al = params.alpha;
    let e = (params.n() * al - (4.0 - 2.0 * params.b)) / 4.0;
    (2.0 * (al + 2.0) / b * a.powf(e) / c_a).powf(1.0 / (al + 2.0))
}

/// `g(x) = lambda Q(mu x)` normalized by `||g|| = ||sqrt(L_a) g|| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    /// From the computed norms of `Q`.
    pub mu_fit: f64,
    pub lambda_fit: f64,
    /// `mu = A/B`, `lambda = (A J / (2(alpha+2)))^{1/alpha}`.
    pub mu_quoted: f64,
    pub lambda_quoted: f64,
    /// `mu = sqrt(A/B)`, `lambda = (A / (2(alpha+2) J mu^b))^{1/alpha}`.
    pub mu_closed: f64,
    pub lambda_closed: f64,
}

pub fn scaling_report(gs: &GroundState) -> ScalingReport {
    let p = &gs.params;
    let (a, b, al) = (p.pohozaev_a(), p.pohozaev_b(), p.alpha);
    let j = gs.weinstein();
    let mu_fit = (gs.mass / gs.kinetic).sqrt();
    let lambda_fit = (mu_fit.powf(p.n()) / gs.mass).sqrt();
    let mu_closed = (a / b).sqrt();
    ScalingReport {
        mu_fit,
        lambda_fit,
        mu_quoted: a / b,
        lambda_quoted: (a * j / (2.0 * (al + 2.0))).powf(1.0 / al),
        mu_closed,
        lambda_closed: (a / (2.0 * (al + 2.0) * j * mu_closed.powf(p.b))).powf(1.0 / al),
    }
}
