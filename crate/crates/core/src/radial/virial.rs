//! Localized virial quantities `V = int phi |u|^2`, `V'`, `V''` for radial weights.
//!
//! `V''` is assembled from the Morawetz-type identity
//! `V'' = lambda (4/(alpha+2) - 2) int r^{-b} |u|^{alpha+2} Delta phi
//!        - lambda 4b/(alpha+2) int r^{-b-1} |u|^{alpha+2} phi'
//!        + 4 int (phi'/r) (|u_r|^2 + a |u|^2/r^2) + 4 int (phi'' - phi'/r) |u_r|^2
//!        - int |u|^2 Delta^2 phi`,
//! with the point masses produced by jumps of `phi'`, `phi''`, `phi'''` added explicitly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scheme::RadialScheme;
use super::weights::{laplacian_data, VirialWeight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialTriple {
    pub v: f64,
    pub vp: f64,
    pub vpp: f64,
}

/// Finite-difference weights for derivatives 0..=2 at `x` from nodes `xs` (Fornberg).
fn fornberg(xs: &[f64], x: f64) -> [Vec<f64>; 3] {
    let n = xs.len();
    let m = 2;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    [
        c.iter().map(|r| r[0]).collect(),
        c.iter().map(|r| r[1]).collect(),
        c.iter().map(|r| r[2]).collect(),
    ]
}

/// `(v, v_r, v_rr)` at an arbitrary radius from the six nearest nodes.
pub(crate) fn local_jet(r: &[f64], v: &[Complex64], x: f64) -> [Complex64; 3] {
    let m = r.len();
    let k = r.partition_point(|&y| y < x);
    let lo = k.saturating_sub(3).min(m.saturating_sub(6));
    let hi = (lo + 6).min(m);
    let w = fornberg(&r[lo..hi], x);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (d, wd) in w.iter().enumerate() {
        out[d] = wd.iter().zip(&v[lo..hi]).map(|(c, y)| y * c).sum();
    }
    out
}

impl RadialScheme {
    pub fn variance_v(&self, v: &[Complex64], weight: &VirialWeight) -> f64 {
        let r = self.grid().r();
        self.omega()
            * v.iter()
                .zip(self.mass_weights())
                .zip(r)
                .map(|((x, w), &rj)| w * weight.phi(rj) * x.norm_sqr())
                .sum::<f64>()
    }

    /// `V' = 2 Im int phi' conj(u) u_r dx`, discretized as `2 omega Im (D(phi v))* Lambda (D v)`,
    /// which is the exact time derivative of the discrete `V` under the semi-discrete linear flow.
    pub fn virial_first_v(&self, v: &[Complex64], weight: &VirialWeight) -> f64 {
        let r = self.grid().r();
        let pv: Vec<Complex64> = v.iter().zip(r).map(|(x, &rj)| x * weight.phi(rj)).collect();
        let dpv = self.face_derivative(&pv);
        let dv = self.face_derivative(v);
        let fj = self.grid().face_jac();
        // face_derivative divides by g'; the face weights already carry one 1/g'
        2.0 * self.omega()
            * dpv
                .iter()
                .zip(&dv)
                .zip(self.face_weights())
                .zip(fj)
                .map(|(((a, b), w), j)| w * j * j * (a.conj() * b).im)
                .sum::<f64>()
    }

    pub fn virial_second_v(&self, v: &[Complex64], weight: &VirialWeight) -> f64 {
        let p = *self.params();
        let n = p.n();
        let lam = p.lambda_value();
        let al = p.alpha;
        let rho = self.rho();
        let d = self.effective_dim();
        let omega = self.omega();
        let grid = self.grid().clone();
        let r = grid.r();
        let c_lap = lam * (4.0 / (al + 2.0) - 2.0);
        let c_b = -lam * 4.0 * p.b / (al + 2.0);

        // node sums
        let mut nl = 0.0;
        let mut mass_terms = 0.0;
        for j in 0..v.len() {
            let rj = r[j];
            let dd = weight.derivatives(rj);
            let (lap, _, lap2) = laplacian_data(&dd, rj, n);
            let g = dd[1] / rj;
            let g_prime = (dd[2] - g) / rj;
            let m2 = v[j].norm_sqr();
            let pw = self.potential_weights()[j] * v[j].norm().powf(al + 2.0);
            nl += pw * (c_lap * lap + c_b * g);
            mass_terms += self.mass_weights()[j] * m2 * (4.0 * rho * g_prime / rj - lap2);
        }

        // face sums
        let dv = self.face_derivative(v);
        let vf = self.face_values(v);
        let faces = grid.faces();
        let mut grad_terms = 0.0;
        for f in 0..dv.len() {
            let rf = faces[f];
            let dd = weight.derivatives(rf);
            let g = dd[1] / rf;
            let hess = dd[2] - g;
            let fw = self.face_weights()[f] * grid.face_jac()[f] * grid.face_jac()[f];
            let mut t = 4.0 * g * dv[f].norm_sqr();
            if hess != 0.0 {
                t += 4.0 * hess * (dv[f] - vf[f] * (rho / rf)).norm_sqr();
            }
            grad_terms += fw * t;
        }
        let mut total = omega * (nl + mass_terms + grad_terms);

        // point masses at the breakpoints
        for rk in weight.breakpoints() {
            if rk >= grid.r_max() {
                continue;
            }
            let l = weight.derivatives_side(rk, false);
            let rr = weight.derivatives_side(rk, true);
            let c1 = rr[1] - l[1];
            let c2 = rr[2] - l[2];
            let c3 = rr[3] - l[3];
            if c1 == 0.0 && c2 == 0.0 && c3 == 0.0 {
                continue;
            }
            let [vk, vk1, vk2] = local_jet(r, v, rk);
            let s = rk.powf(-rho);
            let u = vk * s;
            let u1 = (vk1 - vk * (rho / rk)) * s;
            let u2 = (vk2 - vk1 * (2.0 * rho / rk) + vk * (rho * (rho + 1.0) / (rk * rk))) * s;
            let f0 = u.norm_sqr();
            let f1 = 2.0 * (u.conj() * u1).re;
            let f2 = 2.0 * u1.norm_sqr() + 2.0 * (u.conj() * u2).re;
            let lap_f = f2 + (n - 1.0) * f1 / rk;
            let jump_lap = c2 + (n - 1.0) * c1 / rk;
            let jump_lap_d = c3 + (n - 1.0) * (c2 / rk - c1 / (rk * rk));
            let area = omega * rk.powf(n - 1.0);
            let pot = rk.powf(-p.b) * u.norm().powf(al + 2.0);
            let mut sing = c_lap * c1 * pot + 4.0 * c1 * u1.norm_sqr();
            sing -= f0 * jump_lap_d - f1 * jump_lap + c1 * lap_f;
            total += area * sing;
            // integration by parts of the rho-term across the jump of phi'/r
            total += 4.0 * omega * rho * (c1 / rk) * rk.powf(d - 2.0) * vk.norm_sqr();
        }
        total
    }

    pub fn virial_v(&self, v: &[Complex64], weight: &VirialWeight) -> VirialTriple {
        VirialTriple {
            v: self.variance_v(v, weight),
            vp: self.virial_first_v(v, weight),
            vpp: self.virial_second_v(v, weight),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::radial::{RadialField, RadialGrid};
    use std::sync::Arc;

    #[test]
    fn fornberg_reproduces_quadratics() {
        let xs = [0.1, 0.35, 0.5, 0.9, 1.3, 1.4];
        let w = fornberg(&xs, 0.77);
        let f = |x: f64| 3.0 * x * x - x + 2.0;
        let v0: f64 = w[0].iter().zip(&xs).map(|(c, &x)| c * f(x)).sum();
        let v1: f64 = w[1].iter().zip(&xs).map(|(c, &x)| c * f(x)).sum();
        let v2: f64 = w[2].iter().zip(&xs).map(|(c, &x)| c * f(x)).sum();
        assert!((v0 - f(0.77)).abs() < 1e-12);
        assert!((v1 - (6.0 * 0.77 - 1.0)).abs() < 1e-11);
        assert!((v2 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_weight_closed_form() {
        let params = ModelParams::focusing(3, 0.5, 0.5, 1.2).unwrap();
        let grid = Arc::new(RadialGrid::uniform(3, 2048, 20.0).unwrap());
        let s = RadialScheme::new(grid.clone(), &params).unwrap();
        let u = RadialField::from_fn(grid, |r| {
            Complex64::from_polar(1.3 * (-r * r / 2.0).exp(), 0.4 * r * r)
        });
        let v = s.to_v(&u);
        let t = s.virial_v(&v, &VirialWeight::Quadratic);
        let expect =
            8.0 * s.kinetic_v(&v) + 8.0 * ((3.0 - 0.5) / (1.2 + 2.0) - 1.5) * s.potential_v(&v);
        assert!((t.vpp - expect).abs() < 1e-10 * expect.abs());
    }

    #[test]
    fn truncated_weight_equals_quadratic_inside_support() {
        let params = ModelParams::focusing(3, 0.0, 0.0, 2.0).unwrap();
        let grid = Arc::new(RadialGrid::uniform(3, 2048, 20.0).unwrap());
        let s = RadialScheme::new(grid.clone(), &params).unwrap();
        // smooth bump supported in r < 2
        let bump = |r: f64| {
            if r < 2.0 {
                (-1.0 / (4.0 - r * r)).exp() * 10.0
            } else {
                0.0
            }
        };
        let u = RadialField::from_fn(grid, |r| Complex64::from_polar(bump(r), 0.3 * r * r));
        let v = s.to_v(&u);
        let q = s.virial_v(&v, &VirialWeight::Quadratic);
        for w in [
            VirialWeight::TruncatedCritical(3.0),
            VirialWeight::TruncatedIntercritical(3.0),
        ] {
            let t = s.virial_v(&v, &w);
            assert!((t.v - q.v).abs() < 1e-12 * q.v.abs());
            assert!((t.vp - q.vp).abs() < 1e-12 * q.vp.abs().max(1.0));
            assert!((t.vpp - q.vpp).abs() < 1e-12 * q.vpp.abs().max(1.0));
        }
    }
}
