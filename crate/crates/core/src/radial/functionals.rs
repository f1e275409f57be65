use super::field::RadialField;
use super::scheme::RadialScheme;
use super::virial::VirialTriple;
use super::weights::VirialWeight;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Sign};

/// Fields whose edge value exceeds this fraction of their peak are treated as truncated.
pub const DECAY_TOL: f64 = 1e-8;

pub fn mass(u: &RadialField) -> f64 {
    u.values()
        .iter()
        .zip(u.grid().weights())
        .map(|(x, w)| w * x.norm_sqr())
        .sum()
}

fn decay_check(u: &RadialField) -> Result<()> {
    let ratio = u.tail_ratio();
    if ratio > DECAY_TOL {
        let peak = u.linf();
        Err(Error::TruncationWarning {
            tail: ratio * peak,
            peak,
        })
    } else {
        Ok(())
    }
}

/// `E = K/2 - lambda/(alpha+2) int r^{-b} |u|^{alpha+2}`; refuses fields that do not decay at `r_max`.
pub fn energy(u: &RadialField, params: &ModelParams) -> Result<f64> {
    decay_check(u)?;
    energy_unchecked(u, params)
}

pub fn energy_unchecked(u: &RadialField, params: &ModelParams) -> Result<f64> {
    Ok(RadialScheme::for_field(u, params)?.energy(u))
}

/// `||sqrt(L_a) u||^2 = int |grad u|^2 + a int |u|^2 / r^2`.
pub fn kinetic_norm_sq(u: &RadialField, a: f64) -> Result<f64> {
    let params = ModelParams::new(u.grid().dim(), a, 0.0, 1.0, Sign::Focusing)?;
    let k = RadialScheme::for_field(u, &params)?.kinetic(u);
    if k < 0.0 {
        Err(Error::NegativeForm(k))
    } else {
        Ok(k)
    }
}

/// `(int r^{-b} |u|^p dx)^{1/p}`.
pub fn weighted_lp(u: &RadialField, p: f64, b: f64) -> Result<f64> {
    let n = u.grid().dim() as f64;
    if p < 1.0 {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    if b >= n {
        return Err(Error::InvalidParameter(format!("b must be < N, got {b}")));
    }
    let g = u.grid();
    let w = g.node_weights(n - 1.0 - b);
    let s: f64 = u
        .values()
        .iter()
        .zip(&w)
        .map(|(x, w)| w * x.norm().powf(p))
        .sum();
    Ok((g.omega() * s).powf(1.0 / p))
}

pub fn weinstein_quotient(u: &RadialField, params: &ModelParams) -> Result<f64> {
    let s = RadialScheme::for_field(u, params)?;
    s.weinstein_v(&s.to_v(u))
}

pub fn virial_quantities(
    u: &RadialField,
    params: &ModelParams,
    weight: &VirialWeight,
) -> Result<VirialTriple> {
    weight.validate()?;
    if *weight == VirialWeight::Quadratic && u.tail_ratio() > DECAY_TOL {
        return Err(Error::FiniteVarianceViolation);
    }
    let s = RadialScheme::for_field(u, params)?;
    Ok(s.virial_v(&s.to_v(u), weight))
}

/// `(sup_{r >= R} |u|, C R^{-(N-1)/2} ||u||^{1/2} ||grad u||^{1/2})` with `C = sqrt(2/omega)`,
/// the constant from `r^{N-1} |u(r)|^2 <= 2 int_r^inf |u||u'| s^{N-1} ds`.
pub fn strauss_bound_check(u: &RadialField, radius: f64) -> Result<(f64, f64)> {
    let g = u.grid();
    let lhs = g
        .r()
        .iter()
        .zip(u.values())
        .filter(|(&r, _)| r >= radius)
        .map(|(_, x)| x.norm())
        .fold(0.0, f64::max);
    let grad = kinetic_norm_sq(u, 0.0)?;
    let c = (2.0 / g.omega()).sqrt();
    let n = g.dim() as f64;
    let rhs = c * radius.powf(-(n - 1.0) / 2.0) * mass(u).powf(0.25) * grad.powf(0.25);
    Ok((lhs, rhs))
}
