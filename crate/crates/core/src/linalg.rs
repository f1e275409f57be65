//! Banded matrices with an LU factorization using partial pivoting.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<T>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![T::zero(); n * (kl + ku + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            None
        } else {
            Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.idx(i, j).map_or(T::zero(), |k| self.data[k])
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j).expect("entry outside band");
        self.data[k] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j).expect("entry outside band");
        self.data[k] = self.data[k] + v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::zero(); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = T::zero();
            for j in lo..=hi {
                acc = acc + self.get(i, j) * x[j];
            }
            *yi = acc;
        }
        y
    }

    /// Entry-wise map into another scalar type (used to lift real operators to complex ones).
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> BandMatrix<U> {
        BandMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self * s + diag`.
    pub fn scaled_plus_diag(&self, s: T, diag: &[T]) -> Self {
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v = *v * s;
        }
        for (i, &d) in diag.iter().enumerate() {
            m.add_to(i, i, d);
        }
        m
    }

    pub fn factor(&self) -> Result<BandLu<T>> {
        BandLu::new(self)
    }
}

/// LU factors in LAPACK `gbtrf` layout: U has `kl + ku` super-diagonals after pivoting.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    w: usize,
    data: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    fn new(a: &BandMatrix<T>) -> Result<Self> {
        let (n, kl) = (a.n, a.kl);
        let ku = a.ku + a.kl;
        let w = 2 * kl + a.ku + 1;
        let mut lu = BandLu {
            n,
            kl,
            w,
            data: vec![T::zero(); n * w],
            piv: vec![0; n],
        };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + a.ku).min(n.saturating_sub(1));
            for j in lo..=hi {
                let k = lu.at(i, j);
                lu.data[k] = a.get(i, j);
            }
        }
        let scale = a.data.iter().map(|v| v.modulus()).fold(0.0, f64::max);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.at(k, k)].modulus();
            for i in k + 1..=last {
                let m = lu.data[lu.at(i, k)].modulus();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == 0.0 || best <= scale * 1e-300 {
                return Err(Error::SolveFailure(k));
            }
            lu.piv[k] = p;
            let jmax = (k + ku).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let (x, y) = (lu.at(k, j), lu.at(p, j));
                    lu.data.swap(x, y);
                }
            }
            let pivot = lu.data[lu.at(k, k)];
            for i in k + 1..=last {
                let ik = lu.at(i, k);
                let l = lu.data[ik] / pivot;
                lu.data[ik] = l;
                for j in k + 1..=jmax {
                    let kj = lu.data[lu.at(k, j)];
                    let ij = lu.at(i, j);
                    lu.data[ij] = lu.data[ij] - l * kj;
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.w + (j + self.kl - i)
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let ku = self.w - 1 - self.kl;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            let last = (k + self.kl).min(n - 1);
            for i in k + 1..=last {
                b[i] = b[i] - self.data[self.at(i, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let jmax = (i + ku).min(n - 1);
            let mut acc = b[i];
            for j in i + 1..=jmax {
                acc = acc - self.data[self.at(i, j)] * b[j];
            }
            b[i] = acc / self.data[self.at(i, i)];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &BandMatrix<f64>, x: &[f64]) -> Vec<f64> {
        (0..a.n())
            .map(|i| (0..a.n()).map(|j| a.get(i, j) * x[j]).sum())
            .collect()
    }

    #[test]
    fn solves_indefinite_system_needing_pivots() {
        let n = 9;
        let mut a = BandMatrix::zeros(n, 2, 3);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 3).min(n - 1) {
                let v = ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 0.0 } else { 0.5 };
                a.set(i, j, v);
            }
        }
        a.set(0, 0, 0.0);
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let b = dense_mul(&a, &x);
        assert_eq!(b, a.mul_vec(&x));
        let got = a.factor().unwrap().solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }
    }

    #[test]
    fn complex_system() {
        let n = 12;
        let mut a = BandMatrix::<Complex64>::zeros(n, 3, 3);
        for i in 0..n {
            for j in i.saturating_sub(3)..=(i + 3).min(n - 1) {
                let re = if i == j {
                    4.0
                } else {
                    -1.0 / (1.0 + (i + j) as f64)
                };
                a.set(i, j, Complex64::new(re, 0.3 * (i as f64 - j as f64)));
            }
        }
        let x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(i as f64, 1.0 - i as f64))
            .collect();
        let b = a.mul_vec(&x);
        let got = a.factor().unwrap().solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = BandMatrix::<f64>::zeros(4, 1, 1);
        assert!(matches!(a.factor(), Err(Error::SolveFailure(0))));
    }
}
