use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::hurwitz_zeta_half;

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_R_MAX: f64 = 40.0;

/// Node placement. `Clustered` refines the cells near the origin by `kappa`
/// through the odd map `r = A (xi - beta ell tanh(xi / ell))`, `beta = 1 - 1/kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridMap {
    Uniform,
    Clustered { kappa: f64, ell: f64 },
}

/// Cell-centred radial mesh. Nodes sit at `r_j = g((j - 1/2) h)` and faces at
/// `g(j h)`, where `g` is the identity for a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: u32,
    map: GridMap,
    h: f64,
    r_max: f64,
    scale: f64,
    r: Vec<f64>,
    jac: Vec<f64>,
    faces: Vec<f64>,
    face_jac: Vec<f64>,
    weights: Vec<f64>,
}

/// Area of the unit sphere in R^N.
pub fn sphere_area(dim: u32) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(n / 2.0) / gamma(n / 2.0)
}

impl RadialGrid {
    pub fn uniform(dim: u32, points: usize, r_max: f64) -> Result<Self> {
        Self::new(dim, points, r_max, GridMap::Uniform)
    }

    pub fn default_for(dim: u32) -> Result<Self> {
        Self::uniform(dim, DEFAULT_POINTS, DEFAULT_R_MAX)
    }

    pub fn new(dim: u32, points: usize, r_max: f64, map: GridMap) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be >= 3, got {dim}"
            )));
        }
        if points < 8 {
            return Err(Error::InvalidParameter(format!(
                "need at least 8 grid points, got {points}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        let (beta, ell) = match map {
            GridMap::Uniform => (0.0, 1.0),
            GridMap::Clustered { kappa, ell } => {
                if !(kappa >= 1.0 && ell > 0.0 && ell < r_max / 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "clustered grid needs kappa >= 1 and 0 < ell < r_max/2, got kappa={kappa}, ell={ell}"
                    )));
                }
                (1.0 - 1.0 / kappa, ell)
            }
        };
        let x_max = r_max;
        let scale = r_max / (x_max - beta * ell * (x_max / ell).tanh());
        let g = |x: f64| scale * (x - beta * ell * (x / ell).tanh());
        let dg = |x: f64| {
            let s = 1.0 / (x / ell).cosh();
            scale * (1.0 - beta * s * s)
        };
        let h = x_max / points as f64;
        let mut r = Vec::with_capacity(points);
        let mut jac = Vec::with_capacity(points);
        let mut faces = Vec::with_capacity(points);
        let mut face_jac = Vec::with_capacity(points);
        for j in 0..points {
            let x = (j as f64 + 0.5) * h;
            r.push(g(x));
            jac.push(dg(x));
            let xf = (j + 1) as f64 * h;
            faces.push(if j + 1 == points { r_max } else { g(xf) });
            face_jac.push(dg(xf));
        }
        let mut grid = RadialGrid {
            dim,
            map,
            h,
            r_max,
            scale: scale * (1.0 - beta),
            r,
            jac,
            faces,
            face_jac,
            weights: vec![],
        };
        let omega = sphere_area(dim);
        grid.weights = grid
            .node_weights(dim as f64 - 1.0)
            .into_iter()
            .map(|w| omega * w)
            .collect();
        Ok(grid)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn map(&self) -> GridMap {
        self.map
    }

    pub fn is_uniform(&self) -> bool {
        self.map == GridMap::Uniform
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Spacing in the computational coordinate (equal to the radial spacing on a uniform grid).
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Radial width of the cells at the origin.
    pub fn h_origin(&self) -> f64 {
        self.h * self.scale
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// dr/dxi at the nodes.
    pub fn jac(&self) -> &[f64] {
        &self.jac
    }

    /// Face radii; face `f` separates nodes `f` and `f + 1`, the last face is `r_max`.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn face_jac(&self) -> &[f64] {
        &self.face_jac
    }

    /// Quadrature weights for `dV = omega r^{N-1} dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn omega(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Midpoint weights `h g'(xi_j) r_j^p` for integrands `r^p G(r)` with `G` regular at the origin.
    /// The first weight carries the leading endpoint correction `-zeta(-p, 1/2) (g'(0) h)^{p+1}`,
    /// which removes the `h^{p+1}` error term of the midpoint rule for non-even `p`.
    pub fn node_weights(&self, p: f64) -> Vec<f64> {
        let mut w: Vec<f64> = self
            .r
            .iter()
            .zip(&self.jac)
            .map(|(&r, &j)| self.h * j * r.powf(p))
            .collect();
        if p > -1.0 && p < 6.0 {
            let h0 = self.h_origin();
            let corr = hurwitz_zeta_half(-p) * h0.powf(p + 1.0);
            if corr.is_finite() && corr.abs() < 0.5 * w[0] {
                w[0] -= corr;
            }
        }
        w
    }

    /// Face weights `h r_f^p / g'(xi_f)` for integrands `|d/dr v|^2 r^p`.
    pub fn face_weights(&self, p: f64) -> Vec<f64> {
        self.faces
            .iter()
            .zip(&self.face_jac)
            .map(|(&r, &j)| self.h * r.powf(p) / j)
            .collect()
    }

    /// Measure of the ball of radius `radius`, accumulated cell by cell with the partial cell
    /// integrated exactly. Reproduces `omega R^N / N` and checks the cell layout.
    pub fn ball_volume(&self, radius: f64) -> f64 {
        let n = self.dim as f64;
        let omega = self.omega();
        let mut lo = 0.0;
        let mut acc = 0.0;
        for &f in &self.faces {
            if lo >= radius {
                break;
            }
            let hi = f.min(radius);
            acc += omega * (hi.powf(n) - lo.powf(n)) / n;
            lo = f;
        }
        acc
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.r
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * f(r))
            .sum()
    }

    pub fn same_layout(&self, other: &RadialGrid) -> bool {
        self == other
    }
}
