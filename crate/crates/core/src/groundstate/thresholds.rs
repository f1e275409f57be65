//! Threshold quantities and the global/blow-up dichotomy they induce.

use serde::Serialize;

use super::GroundState;
use crate::error::{Error, Result};
use crate::model::{classify_regime, derive_indices, ModelParams, Regime, Sign};
use crate::radial::{energy, RadialField, RadialScheme};

/// Relative margin under which two threshold values count as equal.
pub const EQUALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    pub regime: Regime,
    pub s_c: f64,
    pub alpha: f64,
    pub sharp_constant: f64,
    pub mass_q: f64,
    pub kinetic_q: f64,
    pub energy_q: f64,
    /// `||Q||_{L^2}`.
    pub mass_crit_threshold: f64,
    /// `M(Q)^{1-s_c} E(Q)^{s_c}`; intercritical only, as are the fields below.
    pub me_product: Option<f64>,
    /// `||Q||^{1-s_c} ||sqrt(L_a) Q||^{s_c}`.
    pub grad_product: Option<f64>,
    /// `M(Q)^{(1-s_c)/s_c} E(Q)`, the level compared against in the trapping argument.
    pub me_level: Option<f64>,
    /// Maximizer of `P`.
    pub y_star: Option<f64>,
    exponent: f64,
}

impl Thresholds {
    /// `P(y) = y^2/2 - C_a/(alpha+2) y^{(N alpha + 2b)/2}`.
    pub fn p(&self, y: f64) -> f64 {
        0.5 * y * y - self.sharp_constant / (self.alpha + 2.0) * y.powf(self.exponent)
    }

    /// `(1 - s_c)/s_c`.
    pub fn sigma(&self) -> Option<f64> {
        (self.regime == Regime::Intercritical).then(|| (1.0 - self.s_c) / self.s_c)
    }

    /// `y(f) = ||f||^{(1-s_c)/s_c} ||sqrt(L_a) f||`.
    pub fn y_of(&self, mass: f64, kinetic: f64) -> Option<f64> {
        self.sigma().map(|s| mass.powf(s / 2.0) * kinetic.sqrt())
    }

    /// `M^{(1-s_c)/s_c} E`.
    pub fn me_of(&self, mass: f64, energy: f64) -> Option<f64> {
        self.sigma().map(|s| mass.powf(s) * energy)
    }
}

pub fn thresholds(gs: &GroundState, params: &ModelParams) -> Result<Thresholds> {
    if gs.params != *params {
        return Err(Error::Precondition(
            "ground state was computed for different parameters".into(),
        ));
    }
    let idx = derive_indices(params)?;
    let regime = idx.regime;
    if !matches!(regime, Regime::MassCritical | Regime::Intercritical) {
        return Err(Error::RegimeMismatch(format!(
            "thresholds need the mass-critical or intercritical regime, got {regime:?}"
        )));
    }
    let exponent = params.pohozaev_b() / 2.0;
    let mut th = Thresholds {
        regime,
        s_c: idx.s_c,
        alpha: params.alpha,
        sharp_constant: gs.sharp_constant,
        mass_q: gs.mass,
        kinetic_q: gs.kinetic,
        energy_q: gs.energy,
        mass_crit_threshold: gs.mass.sqrt(),
        me_product: None,
        grad_product: None,
        me_level: None,
        y_star: None,
        exponent,
    };
    if regime == Regime::Intercritical {
        let sc = idx.s_c;
        th.me_product = Some(gs.mass.powf(1.0 - sc) * gs.energy.powf(sc));
        th.grad_product = Some(gs.mass.powf((1.0 - sc) / 2.0) * gs.kinetic.powf(sc / 2.0));
        th.me_level = th.me_of(gs.mass, gs.energy);
        let q = exponent - 2.0;
        th.y_star = Some(((params.alpha + 2.0) / (gs.sharp_constant * exponent)).powf(1.0 / q));
    }
    Ok(th)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// Mass-critical, `||u0|| < ||Q||`: global and bounded.
    GlobalBelowGroundMass,
    /// Mass-critical, negative energy: finite-time blow-up.
    BlowupNegativeEnergy,
    /// Intercritical, below the mass-energy level with the gradient product below `Q`'s.
    GlobalBelowThreshold,
    /// Intercritical, below the mass-energy level with the gradient product above `Q`'s.
    BlowupAboveThreshold,
    NoPrediction,
}

fn strictly_below(x: f64, y: f64) -> bool {
    x < y - EQUALITY_TOL * y.abs().max(x.abs())
}

fn strictly_above(x: f64, y: f64) -> bool {
    x > y + EQUALITY_TOL * y.abs().max(x.abs())
}

struct Data {
    mass: f64,
    kinetic: f64,
    energy: f64,
}

fn measure(u0: &RadialField, params: &ModelParams) -> Result<Data> {
    let e = energy(u0, params)?;
    let s = RadialScheme::for_field(u0, params)?;
    let v = s.to_v(u0);
    Ok(Data {
        mass: s.mass_v(&v),
        kinetic: s.kinetic_v(&v),
        energy: e,
    })
}

/// The strongest statement the threshold results make about the solution from `u0`.
/// Radial data always qualify for the blow-up alternatives.
pub fn classify_initial_data(
    u0: &RadialField,
    th: &Thresholds,
    params: &ModelParams,
) -> Result<Prediction> {
    if params.lambda == Sign::Defocusing || classify_regime(params) != th.regime {
        return Ok(Prediction::NoPrediction);
    }
    let d = measure(u0, params)?;
    Ok(match th.regime {
        Regime::MassCritical => {
            if strictly_below(d.mass, th.mass_q) {
                Prediction::GlobalBelowGroundMass
            } else if d.energy / d.kinetic < -(EQUALITY_TOL + (th.energy_q / th.kinetic_q).abs()) {
                // E(Q) = 0 exactly; on the grid it is not, and E/K is scale invariant here
                Prediction::BlowupNegativeEnergy
            } else {
                Prediction::NoPrediction
            }
        }
        Regime::Intercritical => {
            let (Some(me), Some(level), Some(y), Some(y_star)) = (
                th.me_of(d.mass, d.energy),
                th.me_level,
                th.y_of(d.mass, d.kinetic),
                th.y_star,
            ) else {
                return Ok(Prediction::NoPrediction);
            };
            if !strictly_below(me, level) {
                Prediction::NoPrediction
            } else if strictly_below(y, y_star) {
                Prediction::GlobalBelowThreshold
            } else if strictly_above(y, y_star) {
                Prediction::BlowupAboveThreshold
            } else {
                Prediction::NoPrediction
            }
        }
        _ => Prediction::NoPrediction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityGap {
    /// `P(y) <= (1 - delta0) P(y*)` forces `|y - y*| >= delta y*`.
    pub delta: f64,
    /// Lower bound on `-V''/8` for data above the threshold.
    pub eta: f64,
    /// Roots of `P(y) = (1 - delta0) P(y*)` on either side of `y*` (the lower one is absent when
    /// the level is not positive).
    pub y_lower: Option<f64>,
    pub y_upper: f64,
    pub side: Side,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn coercivity_gap(
    u0: &RadialField,
    th: &Thresholds,
    params: &ModelParams,
    delta0: f64,
) -> Result<CoercivityGap> {
    if th.regime != Regime::Intercritical {
        return Err(Error::RegimeMismatch(
            "the coercivity gap is an intercritical statement".into(),
        ));
    }
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta0 must lie in (0, 1), got {delta0}"
        )));
    }
    let (Some(level), Some(y_star), Some(sigma)) = (th.me_level, th.y_star, th.sigma()) else {
        return Err(Error::RegimeMismatch(
            "missing intercritical thresholds".into(),
        ));
    };
    let d = measure(u0, params)?;
    let me = th.me_of(d.mass, d.energy).unwrap_or(f64::INFINITY);
    if me > (1.0 - delta0) * level {
        return Err(Error::Precondition(format!(
            "M^sigma E = {me:.6e} exceeds (1 - delta0) M(Q)^sigma E(Q) = {:.6e}",
            (1.0 - delta0) * level
        )));
    }
    let target = (1.0 - delta0) * th.p(y_star);
    let g = |y: f64| th.p(y) - target;
    let y_lower = (target > 0.0).then(|| bisect(0.0, y_star, g));
    let mut far = 2.0 * y_star;
    while g(far) > 0.0 {
        far *= 2.0;
    }
    let y_upper = bisect(y_star, far, g);
    let above = y_upper / y_star - 1.0;
    let delta = y_lower.map_or(above, |y| above.min(1.0 - y / y_star));
    let y = th.y_of(d.mass, d.kinetic).unwrap_or(0.0);
    let side = if y > y_star { Side::Above } else { Side::Below };
    let eta = d.mass.powf(-sigma) * delta0 * level * params.pohozaev_b() / 4.0;
    Ok(CoercivityGap {
        delta,
        eta,
        y_lower,
        y_upper,
        side,
    })
}
