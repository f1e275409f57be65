//! Discretization of `L_a` through the ground-state substitution `u = r^{-rho} v`.
//!
//! With `d = N - 2 rho` the operator becomes `L_a u = -r^{-rho} (v'' + (d-1)/r v')`, so
//! `v` solves a Bessel-type problem in an effective dimension `d > 2` and stays regular at the
//! origin. Quadratic forms are assembled from a fourth-order staggered difference `D`:
//! `K = omega v* S v` with `S = D^T diag(h r_f^{d-1}) D`, which is symmetric positive
//! semi-definite by construction (a discrete Hardy inequality for free).

use num_complex::Complex64;
use std::sync::Arc;

use super::field::RadialField;
use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, Scalar};
use crate::model::{self, ModelParams};

/// Face stencil after folding the ghost nodes: up to four `(node, coefficient)` entries.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub len: usize,
    pub idx: [usize; 4],
    pub coef: [f64; 4],
}

impl Stencil {
    fn push(&mut self, i: usize, c: f64) {
        if let Some(k) = self.idx[..self.len].iter().position(|&j| j == i) {
            self.coef[k] += c;
        } else {
            self.idx[self.len] = i;
            self.coef[self.len] = c;
            self.len += 1;
        }
    }

    #[inline]
    pub fn apply<T: Scalar>(&self, v: &[T]) -> T {
        let mut acc = T::zero();
        for k in 0..self.len {
            acc = acc + v[self.idx[k]] * T::from_real(self.coef[k]);
        }
        acc
    }
}

/// Difference and interpolation stencils to the faces for a grid with `m` nodes and spacing `h`.
/// Even reflection at the origin, odd reflection (Dirichlet) at `r_max`.
pub(crate) fn face_stencils(m: usize, h: f64) -> (Vec<Stencil>, Vec<Stencil>) {
    let fold = |i: isize| -> (usize, f64) {
        if i < 0 {
            ((-i - 1) as usize, 1.0)
        } else if i as usize >= m {
            ((2 * m as isize - 1 - i) as usize, -1.0)
        } else {
            (i as usize, 1.0)
        }
    };
    let mut diff = Vec::with_capacity(m);
    let mut interp = Vec::with_capacity(m);
    let dc = [
        1.0 / (24.0 * h),
        -27.0 / (24.0 * h),
        27.0 / (24.0 * h),
        -1.0 / (24.0 * h),
    ];
    let ic = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
    for f in 0..m as isize {
        let mut d = Stencil {
            len: 0,
            idx: [0; 4],
            coef: [0.0; 4],
        };
        let mut s = d;
        for (k, off) in (-1..=2).enumerate() {
            let (i, sign) = fold(f + off);
            d.push(i, sign * dc[k]);
            s.push(i, sign * ic[k]);
        }
        diff.push(d);
        interp.push(s);
    }
    (diff, interp)
}

/// Everything needed to evaluate functionals and propagate in the `v` variable.
#[derive(Debug, Clone)]
pub struct RadialScheme {
    grid: Arc<RadialGrid>,
    params: ModelParams,
    rho: f64,
    d: f64,
    b_eff: f64,
    omega: f64,
    rpow: Vec<f64>,
    mass_w: Vec<f64>,
    pot_w: Vec<f64>,
    nl_coef: Vec<f64>,
    face_w: Vec<f64>,
    diff: Vec<Stencil>,
    interp: Vec<Stencil>,
    stiff: BandMatrix<f64>,
}

impl RadialScheme {
    pub fn new(grid: Arc<RadialGrid>, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if grid.dim() != params.dim {
            return Err(Error::GridMismatch(format!(
                "grid dimension {} vs model dimension {}",
                grid.dim(),
                params.dim
            )));
        }
        let rho = model::rho(params.dim, params.a);
        let d = params.n() - 2.0 * rho;
        let b_eff = params.b + rho * params.alpha;
        if b_eff >= d {
            return Err(Error::InvalidParameter(format!(
                "nonlinear weight r^(-{b_eff}) is not integrable in effective dimension {d}"
            )));
        }
        let m = grid.len();
        let rpow: Vec<f64> = grid.r().iter().map(|r| r.powf(rho)).collect();
        let mass_w = grid.node_weights(d - 1.0);
        let pot_w = grid.node_weights(d - 1.0 - b_eff);
        let nl_coef = pot_w.iter().zip(&mass_w).map(|(w, v)| w / v).collect();
        let face_w = grid.face_weights(d - 1.0);
        let (diff, interp) = face_stencils(m, grid.h());
        let mut stiff = BandMatrix::zeros(m, 3, 3);
        for (st, &w) in diff.iter().zip(&face_w) {
            for a in 0..st.len {
                for b in 0..st.len {
                    stiff.add_to(st.idx[a], st.idx[b], w * st.coef[a] * st.coef[b]);
                }
            }
        }
        Ok(RadialScheme {
            omega: grid.omega(),
            grid,
            params: *params,
            rho,
            d,
            b_eff,
            rpow,
            mass_w,
            pot_w,
            nl_coef,
            face_w,
            diff,
            interp,
            stiff,
        })
    }

    pub fn for_field(u: &RadialField, params: &ModelParams) -> Result<Self> {
        Self::new(u.grid_arc().clone(), params)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Effective dimension `N - 2 rho` of the `v` problem.
    pub fn effective_dim(&self) -> f64 {
        self.d
    }

    /// Exponent of the nonlinear weight in the `v` variable, `b + rho alpha`.
    pub fn effective_b(&self) -> f64 {
        self.b_eff
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn len(&self) -> usize {
        self.rpow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rpow.is_empty()
    }

    pub fn mass_weights(&self) -> &[f64] {
        &self.mass_w
    }

    pub fn potential_weights(&self) -> &[f64] {
        &self.pot_w
    }

    pub fn face_weights(&self) -> &[f64] {
        &self.face_w
    }

    /// `W_j / V_j`: the discrete version of `r^{-b} |u|^alpha / |v|^alpha`.
    pub fn nonlinear_coef(&self) -> &[f64] {
        &self.nl_coef
    }

    pub fn stiffness(&self) -> &BandMatrix<f64> {
        &self.stiff
    }

    pub fn to_v(&self, u: &RadialField) -> Vec<Complex64> {
        u.values()
            .iter()
            .zip(&self.rpow)
            .map(|(x, p)| x * p)
            .collect()
    }

    pub fn from_v(&self, v: &[Complex64]) -> RadialField {
        let values = v.iter().zip(&self.rpow).map(|(x, p)| x / p).collect();
        RadialField::from_parts_unchecked(self.grid.clone(), values)
    }

    pub fn to_v_real(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.rpow).map(|(x, p)| x * p).collect()
    }

    pub fn from_v_real(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.rpow).map(|(x, p)| x / p).collect()
    }

    /// `v` derivative at the faces, with respect to `r`.
    pub fn face_derivative<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let fj = self.grid.face_jac();
        self.diff
            .iter()
            .zip(fj)
            .map(|(s, &j)| s.apply(v) * T::from_real(1.0 / j))
            .collect()
    }

    /// Fourth-order interpolation of `v` to the faces.
    pub fn face_values<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        self.interp.iter().map(|s| s.apply(v)).collect()
    }

    pub fn mass_v(&self, v: &[Complex64]) -> f64 {
        self.omega
            * v.iter()
                .zip(&self.mass_w)
                .map(|(x, w)| w * x.norm_sqr())
                .sum::<f64>()
    }

    pub fn kinetic_v(&self, v: &[Complex64]) -> f64 {
        self.omega
            * self
                .diff
                .iter()
                .zip(&self.face_w)
                .map(|(s, w)| w * s.apply(v).norm_sqr())
                .sum::<f64>()
    }

    /// `int r^{-b} |u|^{alpha+2} dx`.
    pub fn potential_v(&self, v: &[Complex64]) -> f64 {
        let p = self.params.alpha + 2.0;
        self.omega
            * v.iter()
                .zip(&self.pot_w)
                .map(|(x, w)| w * x.norm().powf(p))
                .sum::<f64>()
    }

    pub fn energy_v(&self, v: &[Complex64]) -> f64 {
        0.5 * self.kinetic_v(v)
            - self.params.lambda_value() / (self.params.alpha + 2.0) * self.potential_v(v)
    }

    pub fn mass_real(&self, v: &[f64]) -> f64 {
        self.omega
            * v.iter()
                .zip(&self.mass_w)
                .map(|(x, w)| w * x * x)
                .sum::<f64>()
    }

    pub fn kinetic_real(&self, v: &[f64]) -> f64 {
        self.omega
            * self
                .diff
                .iter()
                .zip(&self.face_w)
                .map(|(s, w)| w * s.apply(v).powi(2))
                .sum::<f64>()
    }

    pub fn potential_real(&self, v: &[f64]) -> f64 {
        let p = self.params.alpha + 2.0;
        self.omega
            * v.iter()
                .zip(&self.pot_w)
                .map(|(x, w)| w * x.abs().powf(p))
                .sum::<f64>()
    }

    /// `S v` (without the sphere area).
    pub fn apply_stiffness<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        for (s, &w) in self.diff.iter().zip(&self.face_w) {
            let dv = s.apply(v) * T::from_real(w);
            for k in 0..s.len {
                out[s.idx[k]] = out[s.idx[k]] + dv * T::from_real(s.coef[k]);
            }
        }
        out
    }

    /// `L_a` in the `v` variable: `V^{-1} S v`.
    pub fn apply_l<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let mut out = self.apply_stiffness(v);
        for (o, w) in out.iter_mut().zip(&self.mass_w) {
            *o = *o * T::from_real(1.0 / w);
        }
        out
    }

    pub fn mass(&self, u: &RadialField) -> f64 {
        self.mass_v(&self.to_v(u))
    }

    pub fn kinetic(&self, u: &RadialField) -> f64 {
        self.kinetic_v(&self.to_v(u))
    }

    pub fn potential(&self, u: &RadialField) -> f64 {
        self.potential_v(&self.to_v(u))
    }

    pub fn energy(&self, u: &RadialField) -> f64 {
        self.energy_v(&self.to_v(u))
    }

    /// `sqrt(M + K)`.
    pub fn h1a_norm_v(&self, v: &[Complex64]) -> f64 {
        (self.mass_v(v) + self.kinetic_v(v)).sqrt()
    }

    /// Weinstein functional `K^{B/4} M^{A/4} / P` with `A = 4-2b-alpha(N-2)`, `B = N alpha + 2b`.
    pub fn weinstein_v(&self, v: &[Complex64]) -> Result<f64> {
        let p = self.potential_v(v);
        if p == 0.0 {
            return Err(Error::DivisionByZero("Weinstein quotient"));
        }
        Ok(weinstein_from_parts(
            &self.params,
            self.mass_v(v),
            self.kinetic_v(v),
            p,
        ))
    }
}

pub fn weinstein_from_parts(params: &ModelParams, mass: f64, kinetic: f64, potential: f64) -> f64 {
    let big_a = params.pohozaev_a();
    let big_b = params.pohozaev_b();
    kinetic.powf(big_b / 4.0) * mass.powf(big_a / 4.0) / potential
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scheme(n: u32, a: f64, m: usize, r_max: f64) -> RadialScheme {
        let grid = Arc::new(RadialGrid::uniform(n, m, r_max).unwrap());
        RadialScheme::new(grid, &ModelParams::focusing(n, a, 0.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn stiffness_is_symmetric_and_matches_form() {
        let s = scheme(3, 0.4, 64, 8.0);
        let st = s.stiffness();
        for i in 0..st.n() {
            for j in 0..st.n() {
                assert!((st.get(i, j) - st.get(j, i)).abs() < 1e-12);
            }
        }
        let v: Vec<Complex64> = s
            .grid()
            .r()
            .iter()
            .map(|r| Complex64::new((-r * r).exp(), r.sin() * (-r).exp()))
            .collect();
        let sv = s.apply_stiffness(&v);
        let form: f64 = v
            .iter()
            .zip(&sv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            * s.omega();
        assert!((form - s.kinetic_v(&v)).abs() < 1e-12 * form);
        let via_band = st.map(|x| Complex64::new(x, 0.0)).mul_vec(&v);
        for (a, b) in sv.iter().zip(&via_band) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_gradient_norm() {
        // a = 0, N = 3: int |grad e^{-r^2/2}|^2 dx = (3/2) pi^{3/2}
        let s = scheme(3, 0.0, 4096, 40.0);
        let u = RadialField::gaussian(s.grid().clone(), 1.0, 1.0);
        let k = s.kinetic(&u);
        let exact = 1.5 * PI.powf(1.5);
        assert!(((k - exact) / exact).abs() < 1e-9, "{k} vs {exact}");
        let m = s.mass(&u);
        assert!(((m - PI.powf(1.5)) / m).abs() < 1e-12);
    }

    #[test]
    fn regular_profile_kinetic_with_potential() {
        // u = r^{-rho} e^{-r^2/2}: ||sqrt(L_a) u||^2 = omega d/2 Gamma(d/2) / 2 in effective dimension d
        for a in [-0.2, 0.5, 2.0] {
            let s = scheme(3, a, 4096, 40.0);
            let rho = s.rho();
            let d = s.effective_dim();
            let u =
                RadialField::from_real(s.grid().clone(), |r| r.powf(-rho) * (-r * r / 2.0).exp());
            let k = s.kinetic(&u);
            let exact = s.omega() * (d / 2.0) * statrs::function::gamma::gamma(d / 2.0) / 2.0;
            assert!(((k - exact) / exact).abs() < 1e-8, "a={a}: {k} vs {exact}");
        }
    }
}
