//! Virial weights `phi(r)` and their radial derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VirialWeight {
    Quadratic,
    /// `R^2 psi(r/R)` with `psi = r^2` on `[0,1]`, `r^2 - (r-1)^4/2` on `(1,2]`, `7/2` beyond.
    TruncatedCritical(f64),
    /// `R^2 psi(r/R)` with `psi = r^2` on `[0,1]`, a quintic `psi'` on `[1,2]` and a plateau beyond;
    /// `psi` is C^3 and `psi'' <= 2`.
    TruncatedIntercritical(f64),
}

/// `psi'(1 + t) = 2 + 2t - 32t^3 + 46t^4 - 18t^5` on `[0,1]`, the unique quintic matching
/// `r^2` to third order at `t = 0` and vanishing to third order at `t = 1`.
const INTER_P: [f64; 6] = [2.0, 2.0, 0.0, -32.0, 46.0, -18.0];

fn poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * t + x)
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &x)| k as f64 * x)
        .collect()
}

fn integ(c: &[f64], c0: f64) -> Vec<f64> {
    let mut out = vec![c0];
    out.extend(c.iter().enumerate().map(|(k, &x)| x / (k + 1) as f64));
    out
}

/// Derivatives `[psi, psi', psi'', psi''', psi'''']` of a unit-scale profile on one piece.
fn psi_piece(kind: u8, piece: usize, s: f64) -> [f64; 5] {
    match (kind, piece) {
        (_, 0) => [s * s, 2.0 * s, 2.0, 0.0, 0.0],
        (0, 1) => {
            let t = s - 1.0;
            [
                s * s - t.powi(4) / 2.0,
                2.0 * s - 2.0 * t.powi(3),
                2.0 - 6.0 * t * t,
                -12.0 * t,
                -12.0,
            ]
        }
        (0, _) => [3.5, 0.0, 0.0, 0.0, 0.0],
        (1, 1) => {
            let t = s - 1.0;
            let p1 = INTER_P.to_vec();
            let p0 = integ(&p1, 1.0);
            let p2 = deriv(&p1);
            let p3 = deriv(&p2);
            [
                poly(&p0, t),
                poly(&p1, t),
                poly(&p2, t),
                poly(&p3, t),
                poly(&deriv(&p3), t),
            ]
        }
        (1, _) => [intercritical_plateau(), 0.0, 0.0, 0.0, 0.0],
        _ => unreachable!(),
    }
}

/// `psi(2)` for the intercritical profile (11/5).
pub fn intercritical_plateau() -> f64 {
    poly(&integ(&INTER_P, 1.0), 1.0)
}

impl VirialWeight {
    pub fn validate(&self) -> Result<()> {
        match *self {
            VirialWeight::Quadratic => Ok(()),
            VirialWeight::TruncatedCritical(r) | VirialWeight::TruncatedIntercritical(r) => {
                if r > 0.0 && r.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "truncation radius must be positive, got {r}"
                    )))
                }
            }
        }
    }

    fn scale_kind(&self) -> Option<(f64, u8)> {
        match *self {
            VirialWeight::Quadratic => None,
            VirialWeight::TruncatedCritical(r) => Some((r, 0)),
            VirialWeight::TruncatedIntercritical(r) => Some((r, 1)),
        }
    }

    /// Points where some derivative of `phi` may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.scale_kind() {
            None => vec![],
            Some((r, _)) => vec![r, 2.0 * r],
        }
    }

    /// `[phi, phi', phi'', phi''', phi'''']` at `r`; at a breakpoint `right` picks the outer piece.
    pub fn derivatives_side(&self, r: f64, right: bool) -> [f64; 5] {
        match self.scale_kind() {
            None => [r * r, 2.0 * r, 2.0, 0.0, 0.0],
            Some((big_r, kind)) => {
                let s = r / big_r;
                let piece = if s < 1.0 || (s == 1.0 && !right) {
                    0
                } else if s < 2.0 || (s == 2.0 && !right) {
                    1
                } else {
                    2
                };
                let p = psi_piece(kind, piece, s);
                // phi^(k)(r) = R^{2-k} psi^(k)(r/R)
                [
                    big_r * big_r * p[0],
                    big_r * p[1],
                    p[2],
                    p[3] / big_r,
                    p[4] / (big_r * big_r),
                ]
            }
        }
    }

    pub fn derivatives(&self, r: f64) -> [f64; 5] {
        self.derivatives_side(r, false)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.derivatives(r)[0]
    }
}

/// Radial Laplacian data of `phi` in dimension `n`: `(Delta phi, (Delta phi)', Delta Delta phi)`.
pub fn laplacian_data(d: &[f64; 5], r: f64, n: f64) -> (f64, f64, f64) {
    let [_, p1, p2, p3, p4] = *d;
    let k = n - 1.0;
    let lap = p2 + k * p1 / r;
    let lap_d = p3 + k * (p2 / r - p1 / (r * r));
    let lap_dd = p4 + k * (p3 / r - 2.0 * p2 / (r * r) + 2.0 * p1 / (r * r * r));
    (lap, lap_d, lap_dd + k * lap_d / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercritical_profile_shape() {
        assert!((intercritical_plateau() - 2.2).abs() < 1e-14);
        let w = VirialWeight::TruncatedIntercritical(1.0);
        for k in 0..=4000 {
            let r = k as f64 * 1e-3;
            assert!(w.derivatives(r)[2] <= 2.0 + 1e-12);
        }
        // C^3 across both breakpoints
        for bp in [1.0, 2.0] {
            let l = w.derivatives_side(bp, false);
            let r = w.derivatives_side(bp, true);
            for k in 0..4 {
                assert!((l[k] - r[k]).abs() < 1e-12, "derivative {k} jumps at {bp}");
            }
        }
    }

    #[test]
    fn critical_profile_has_a_kink_at_two_r() {
        let w = VirialWeight::TruncatedCritical(3.0);
        let l = w.derivatives_side(6.0, false);
        let r = w.derivatives_side(6.0, true);
        assert!((l[0] - r[0]).abs() < 1e-12);
        assert!((l[1] - 6.0).abs() < 1e-12 && r[1] == 0.0);
        let l = w.derivatives_side(3.0, false);
        let r = w.derivatives_side(3.0, true);
        for k in 0..4 {
            assert!((l[k] - r[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_laplacians() {
        let w = VirialWeight::Quadratic;
        let (lap, lap_d, lap_dd) = laplacian_data(&w.derivatives(1.7), 1.7, 3.0);
        assert!((lap - 6.0).abs() < 1e-14 && lap_d.abs() < 1e-14 && lap_dd.abs() < 1e-14);
    }
}
