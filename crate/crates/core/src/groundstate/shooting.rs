//! Shooting for `v'' + (d-1)/r v' = v - r^{-b} v^{alpha+1}` with `v(0) = s`, `v'(0) = 0`.
//!
//! Here `v = r^rho u` is the regular part of the profile, so `v(0) = s` is the same as
//! prescribing the coefficient of the regular branch `r^{-rho}` of `u`. Trajectories with `s`
//! too small turn back up (undershoot); with `s` too large they cross zero (overshoot).

use ode_solvers::continuous_output_model::ContinuousOutputModel;
use ode_solvers::{Dopri5, OutputType, System, Vector2};

use crate::error::{Error, Result};

type State = Vector2<f64>;

const R_START: f64 = 1e-6;
const S_LO: f64 = 1e-6;
const S_HI: f64 = 1e3;
const RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Under,
    Over,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pub d: f64,
    pub b: f64,
    pub alpha: f64,
}

struct Ode {
    p: Profile,
    cap: f64,
    decreased: bool,
}

impl System<f64, State> for Ode {
    fn system(&self, r: f64, y: &State, dy: &mut State) {
        let v = y[0];
        dy[0] = y[1];
        dy[1] =
            -(self.p.d - 1.0) / r * y[1] + v - r.powf(-self.p.b) * v.abs().powf(self.p.alpha) * v;
    }

    fn solout(&mut self, _r: f64, y: &State, _dy: &State) -> bool {
        if y[0] < 0.0 || y[0] > self.cap {
            return true;
        }
        if y[1] < 0.0 {
            self.decreased = true;
        }
        self.decreased && y[1] > 0.0
    }
}

impl Profile {
    /// Leading terms of the regular solution at small `r`: `(v, v')`.
    fn series(&self, s: f64, r: f64) -> (f64, f64) {
        let k = 2.0 - self.b;
        let c = s.powf(self.alpha + 1.0) / (k * (self.d - self.b));
        let v = s + s * r * r / (2.0 * self.d) - c * r.powf(k);
        let dv = s * r / self.d - c * k * r.powf(k - 1.0);
        (v, dv)
    }

    fn start(&self, s: f64) -> State {
        let (v, dv) = self.series(s, R_START);
        State::new(v, dv)
    }

    fn integrate(
        &self,
        s: f64,
        r_end: f64,
        model: Option<&mut ContinuousOutputModel<f64, State>>,
    ) -> (Shot, f64) {
        let ode = Ode {
            p: *self,
            cap: 1e8 * (1.0 + s),
            decreased: false,
        };
        let out = if model.is_some() {
            OutputType::Continuous
        } else {
            OutputType::Sparse
        };
        let mut solver = Dopri5::from_param(
            ode,
            R_START,
            r_end,
            0.0,
            self.start(s),
            RTOL,
            1e-16 * s,
            0.9,
            0.04,
            0.2,
            10.0,
            0.25,
            0.0,
            10_000_000,
            u32::MAX,
            out,
        );
        let res = match model {
            Some(m) => solver.integrate_with_continuous_output_model(m),
            None => solver.integrate(),
        };
        if let Err(e) = res {
            log::debug!("shot s = {s:e} stopped early: {e}");
        }
        let r_stop = solver.x_out().last().copied().unwrap_or(R_START);
        let y = solver
            .y_out()
            .last()
            .copied()
            .unwrap_or_else(|| self.start(s));
        let shot = if y[0] < 0.0 {
            Shot::Over
        } else if y[1] > 0.0 || y[0] > 1e8 * (1.0 + s) {
            Shot::Under
        } else if y[0] + y[1] < 0.0 {
            // still decaying at the end of the window: faster than e^{-r} means it will cross
            Shot::Over
        } else {
            Shot::Under
        };
        (shot, r_stop)
    }
}

/// Solution of `v'' + (d-1)/r v' = v` decaying at infinity, up to a constant:
/// `r^{-(d-1)/2} e^{-r}` times the asymptotic series of `K_nu` with `nu = (d-2)/2`.
fn decaying_tail(d: f64, r: f64) -> f64 {
    let mu = (d - 2.0) * (d - 2.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let j = (2 * k - 1) as f64;
        let next = term * (mu - j * j) / (k as f64 * 8.0 * r);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    r.powf(-(d - 1.0) / 2.0) * (-r).exp() * sum
}

pub(crate) struct ShootResult {
    pub amplitude: f64,
    pub iterations: usize,
    pub r_cut: f64,
    pub values: Vec<f64>,
}

/// Bisects `log s` between the undershoot and overshoot ends, then samples the bracketing
/// trajectories on `nodes`. Past the radius where the two shots separate the profile is
/// continued by the exact linear tail.
pub(crate) fn shoot(p: Profile, nodes: &[f64], max_iter: usize) -> Result<ShootResult> {
    let r_end = nodes.last().copied().unwrap_or(1.0).max(60.0);
    let (mut lo, mut hi) = (S_LO, S_HI);
    if p.integrate(lo, r_end, None).0 != Shot::Under || p.integrate(hi, r_end, None).0 != Shot::Over
    {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let mut iterations = 0;
    while hi / lo - 1.0 > 4.0 * f64::EPSILON {
        if iterations == max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: hi / lo - 1.0,
            });
        }
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        match p.integrate(mid, r_end, None).0 {
            Shot::Under => lo = mid,
            Shot::Over => hi = mid,
        }
        iterations += 1;
    }

    let mut m_lo = ContinuousOutputModel::default();
    let mut m_hi = ContinuousOutputModel::default();
    let (_, end_lo) = p.integrate(lo, r_end, Some(&mut m_lo));
    let (_, end_hi) = p.integrate(hi, r_end, Some(&mut m_hi));
    let r_trust = end_lo.min(end_hi);

    let mut values = Vec::with_capacity(nodes.len());
    let mut peak: f64 = 0.0;
    let mut r_cut = f64::INFINITY;
    for &r in nodes {
        if r <= R_START {
            let v = 0.5 * (p.series(lo, r).0 + p.series(hi, r).0);
            peak = peak.max(v);
            values.push(v);
            continue;
        }
        let pair = if r < r_trust {
            m_lo.evaluate(r).zip(m_hi.evaluate(r))
        } else {
            None
        };
        match pair {
            Some((a, b)) => {
                let v = 0.5 * (a[0] + b[0]);
                let gap = (a[0] - b[0]).abs();
                peak = peak.max(v);
                if gap > 1e-6 * v.abs() || gap > 1e-12 * peak {
                    r_cut = r;
                    break;
                }
                values.push(v);
            }
            None => {
                r_cut = r;
                break;
            }
        }
    }
    if values.len() < nodes.len() {
        let Some(&anchor) = values.last() else {
            return Err(Error::NoConvergence {
                iterations,
                residual: f64::NAN,
            });
        };
        let r0 = nodes[values.len() - 1];
        let c = anchor / decaying_tail(p.d, r0);
        for &r in &nodes[values.len()..] {
            values.push(c * decaying_tail(p.d, r));
        }
    }
    Ok(ShootResult {
        amplitude: (lo * hi).sqrt(),
        iterations,
        r_cut,
        values,
    })
}
