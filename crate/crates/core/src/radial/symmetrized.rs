//! Independent discretization of `L_a` acting on `w = r^{(N-1)/2} u`:
//! `-w'' + c_eff w / r^2` with `c_eff = a + (N-1)(N-3)/4`, using the five-point
//! fourth-order second difference and odd reflection at both ends.

use num_complex::Complex64;

use super::field::RadialField;
use super::grid::RadialGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedOperator {
    pub c_eff: f64,
    h: f64,
    r: Vec<f64>,
    omega: f64,
    dim: u32,
}

impl SymmetrizedOperator {
    pub fn new(grid: &RadialGrid, a: f64) -> Result<Self> {
        if !grid.is_uniform() {
            return Err(Error::InvalidParameter(
                "the symmetrized stencil needs a uniform grid".into(),
            ));
        }
        let n = grid.dim() as f64;
        Ok(SymmetrizedOperator {
            c_eff: a + (n - 1.0) * (n - 3.0) / 4.0,
            h: grid.h(),
            r: grid.r().to_vec(),
            omega: grid.omega(),
            dim: grid.dim(),
        })
    }

    /// Stencil weights `(-1, 16, -30, 16, -1) / (12 h^2)` for `w''`.
    pub fn stencil(&self) -> [f64; 5] {
        let s = 12.0 * self.h * self.h;
        [-1.0 / s, 16.0 / s, -30.0 / s, 16.0 / s, -1.0 / s]
    }

    fn at(w: &[Complex64], i: isize) -> Complex64 {
        let m = w.len() as isize;
        if i < 0 {
            -w[(-i - 1) as usize]
        } else if i >= m {
            -w[(2 * m - 1 - i) as usize]
        } else {
            w[i as usize]
        }
    }

    pub fn apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        let c = self.stencil();
        (0..w.len() as isize)
            .map(|i| {
                let lap: Complex64 = (-2..=2)
                    .zip(c.iter())
                    .map(|(o, &k)| Self::at(w, i + o) * k)
                    .sum();
                let r = self.r[i as usize];
                -lap + w[i as usize] * (self.c_eff / (r * r))
            })
            .collect()
    }

    pub fn to_w(&self, u: &RadialField) -> Vec<Complex64> {
        let p = (self.dim as f64 - 1.0) / 2.0;
        u.values()
            .iter()
            .zip(&self.r)
            .map(|(x, r)| x * r.powf(p))
            .collect()
    }

    /// `omega h sum conj(w) (A w)`; `NegativeForm` if the result is negative.
    pub fn quadratic_form(&self, u: &RadialField) -> Result<f64> {
        let w = self.to_w(u);
        let aw = self.apply(&w);
        let q = self.omega
            * self.h
            * w.iter()
                .zip(&aw)
                .map(|(x, y)| (x.conj() * y).re)
                .sum::<f64>();
        if q < 0.0 {
            Err(Error::NegativeForm(q))
        } else {
            Ok(q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn symmetric_on_random_vectors() {
        let grid = RadialGrid::uniform(4, 40, 5.0).unwrap();
        let op = SymmetrizedOperator::new(&grid, 0.3).unwrap();
        let x: Vec<Complex64> = (0..40)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64).cos()))
            .collect();
        let y: Vec<Complex64> = (0..40)
            .map(|i| Complex64::new((i as f64 * 1.3).cos(), 0.2 * i as f64))
            .collect();
        let ax = op.apply(&x);
        let ay = op.apply(&y);
        let l: Complex64 = y.iter().zip(&ax).map(|(a, b)| a.conj() * b).sum();
        let r: Complex64 = ay.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        assert!((l - r).norm() < 1e-9 * l.norm());
    }

    #[test]
    fn free_gaussian_gradient() {
        let grid = Arc::new(RadialGrid::uniform(3, 4096, 40.0).unwrap());
        let op = SymmetrizedOperator::new(&grid, 0.0).unwrap();
        let u = RadialField::gaussian(grid, 1.0, 1.0);
        let q = op.quadratic_form(&u).unwrap();
        let exact = 1.5 * std::f64::consts::PI.powf(1.5);
        assert!(((q - exact) / exact).abs() < 1e-9);
    }
}
