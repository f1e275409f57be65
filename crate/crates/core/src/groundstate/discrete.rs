//! The discrete ground-state problem `F(v) = S v + V v - W |v|^alpha v = 0` on a radial grid.

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::radial::RadialScheme;

fn nonlinearity(scheme: &RadialScheme, v: &[f64]) -> Vec<f64> {
    let al = scheme.params().alpha;
    v.iter()
        .zip(scheme.potential_weights())
        .map(|(x, w)| w * x.abs().powf(al) * x)
        .collect()
}

pub(crate) fn defect(scheme: &RadialScheme, v: &[f64]) -> Vec<f64> {
    let sv = scheme.apply_stiffness(v);
    let nl = nonlinearity(scheme, v);
    sv.iter()
        .zip(v)
        .zip(scheme.mass_weights())
        .zip(&nl)
        .map(|(((s, x), m), n)| s + m * x - n)
        .collect()
}

/// `||L_a Q + Q - r^{-b} Q^{alpha+1}||_{L^2} / ||Q||_{H^1_a}`.
pub(crate) fn relative_residual(scheme: &RadialScheme, v: &[f64]) -> f64 {
    let f = defect(scheme, v);
    let num: f64 = f
        .iter()
        .zip(scheme.mass_weights())
        .map(|(x, m)| x * x / m)
        .sum::<f64>()
        * scheme.omega();
    let den = scheme.mass_real(v) + scheme.kinetic_real(v);
    if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).sqrt()
    }
}

/// Rescales `v` onto the Nehari set `K + M = P`.
pub(crate) fn nehari_scale(scheme: &RadialScheme, v: &mut [f64]) -> Result<()> {
    let p = scheme.potential_real(v);
    if p <= 0.0 {
        return Err(Error::DivisionByZero("Nehari rescaling"));
    }
    let c = ((scheme.kinetic_real(v) + scheme.mass_real(v)) / p).powf(1.0 / scheme.params().alpha);
    v.iter_mut().for_each(|x| *x *= c);
    Ok(())
}

/// Semi-implicit descent `(S + (1 + 1/tau) V) v+ = V v / tau + W |v|^alpha v`, i.e.
/// `v+ = v - (S + (1 + 1/tau) V)^{-1} F(v)`, followed by
/// projection onto the Nehari set. The projection removes the one unstable direction (the
/// amplitude) of the plain fixed-point map, so the iteration converges to the positive
/// least-action solution without any mass constraint.
pub(crate) fn gradient_flow(
    scheme: &RadialScheme,
    mut v: Vec<f64>,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let shift: Vec<f64> = scheme
        .mass_weights()
        .iter()
        .map(|m| (1.0 + 1.0 / tau) * m)
        .collect();
    let lu = scheme.stiffness().scaled_plus_diag(1.0, &shift).factor()?;
    nehari_scale(scheme, &mut v)?;
    let mut residual = relative_residual(scheme, &v);
    for it in 1..=max_iter {
        // increment form keeps the solve error proportional to the update, which matters
        // where the rows of the system are tiny (nodes crowded at the origin)
        let mut step = defect(scheme, &v);
        lu.solve_in_place(&mut step);
        v.iter_mut().zip(&step).for_each(|(x, s)| *x -= s);
        nehari_scale(scheme, &mut v)?;
        residual = relative_residual(scheme, &v);
        if !residual.is_finite() {
            break;
        }
        if residual < tol {
            return Ok((v, it, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Newton on `F(v) = 0` with the banded Jacobian `S + V - (alpha+1) W |v|^alpha`.
pub(crate) fn newton(
    scheme: &RadialScheme,
    mut v: Vec<f64>,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let al = scheme.params().alpha;
    let mut residual = relative_residual(scheme, &v);
    for it in 1..=max_iter {
        let diag: Vec<f64> = v
            .iter()
            .zip(scheme.mass_weights())
            .zip(scheme.potential_weights())
            .map(|((x, m), w)| m - (al + 1.0) * w * x.abs().powf(al))
            .collect();
        let jac: BandMatrix<f64> = scheme.stiffness().scaled_plus_diag(1.0, &diag);
        let mut step = defect(scheme, &v);
        jac.factor()?.solve_in_place(&mut step);
        let size = step.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        v.iter_mut().zip(&step).for_each(|(x, s)| *x -= s);
        let next = relative_residual(scheme, &v);
        if !next.is_finite() {
            break;
        }
        residual = next;
        if size <= 1e-14 * scale {
            return Ok((v, it, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}
