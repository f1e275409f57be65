//! Exponent pairs `(q, r)`, stored through their reciprocals so `q = inf` is `1/q = 0`.

use std::fmt;

use serde::Serialize;

use super::value::{is_positive, Value};
use crate::error::{Error, Result};
use crate::model::{rho, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairQR {
    pub inv_q: Value,
    pub inv_r: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PairClass {
    SAdmissible,
    HsAdmissible(f64),
    DualHsAdmissible(f64),
    NotAdmissible,
}

impl PairQR {
    pub fn new(q: Value, r: Value) -> Self {
        PairQR {
            inv_q: q.recip(),
            inv_r: r.recip(),
        }
    }

    pub fn with_infinite_q(r: Value) -> Self {
        PairQR {
            inv_q: Value::int(0),
            inv_r: r.recip(),
        }
    }

    pub fn from_inverses(inv_q: Value, inv_r: Value) -> Self {
        PairQR { inv_q, inv_r }
    }

    /// `None` stands for `+inf`.
    pub fn q(&self) -> Option<Value> {
        (!self.inv_q.is_zero()).then(|| self.inv_q.recip())
    }

    pub fn r(&self) -> Option<Value> {
        (!self.inv_r.is_zero()).then(|| self.inv_r.recip())
    }

    pub fn dual(&self) -> PairQR {
        PairQR {
            inv_q: 1 - &self.inv_q,
            inv_r: 1 - &self.inv_r,
        }
    }

    pub fn q_f64(&self) -> f64 {
        self.q().map_or(f64::INFINITY, |v| v.to_f64())
    }

    pub fn r_f64(&self) -> f64 {
        self.r().map_or(f64::INFINITY, |v| v.to_f64())
    }

    /// `N/2 - N/r - 2/q`, the regularity level this pair scales like.
    pub fn scaling_level(&self, n: u32) -> Value {
        let nn = Value::int(n as i64);
        &nn / 2 - &nn * &self.inv_r - 2 * &self.inv_q
    }

    pub fn classify(&self, n: u32, s: &Value) -> PairClass {
        if is_s_admissible(self, n) {
            PairClass::SAdmissible
        } else if is_positive(s) && is_hs_admissible(self, s, n) {
            PairClass::HsAdmissible(s.to_f64())
        } else if is_positive(s) && is_dual_hs_admissible(self, s, n) {
            PairClass::DualHsAdmissible(s.to_f64())
        } else {
            PairClass::NotAdmissible
        }
    }
}

impl fmt::Display for PairQR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.q().map_or("inf".to_string(), |v| v.to_string());
        let r = self.r().map_or("inf".to_string(), |v| v.to_string());
        write!(f, "({q}, {r})")
    }
}

fn lt(a: &Value, b: &Value) -> bool {
    a.compare(b) == Some(std::cmp::Ordering::Less)
}

fn le(a: &Value, b: &Value) -> bool {
    matches!(
        a.compare(b),
        Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
    )
}

/// `2/q = N/2 - N/r` with `2 <= r <= 2N/(N-2)`.
pub fn is_s_admissible(pair: &PairQR, n: u32) -> bool {
    let nn = Value::int(n as i64);
    let half = Value::ratio(1, 2);
    let endpoint = (&nn - 2) / (2 * &nn);
    pair.scaling_level(n) == Value::int(0)
        && le(&pair.inv_r, &half)
        && le(&endpoint, &pair.inv_r)
        && le(&Value::int(0), &pair.inv_q)
}

/// `2/q = N/2 - N/r - s` with `2N/(N-2s) <= r < 2N/(N-2)`; the pair with `q = inf` is not used.
pub fn is_hs_admissible(pair: &PairQR, s: &Value, n: u32) -> bool {
    let nn = Value::int(n as i64);
    if !is_positive(s) || !lt(s, &(&nn / 2)) || pair.inv_q.is_zero() {
        return false;
    }
    let lower = (&nn - 2 * s) / (2 * &nn); // 1/r at r = 2N/(N-2s)
    let upper = (&nn - 2) / (2 * &nn);
    pair.scaling_level(n) == *s
        && le(&pair.inv_r, &lower)
        && lt(&upper, &pair.inv_r)
        && is_positive(&pair.inv_q)
}

/// `2/q = N/2 - N/r + s` with `2N/(N-2s) < r < 2N/(N-2)`.
pub fn is_dual_hs_admissible(pair: &PairQR, s: &Value, n: u32) -> bool {
    let nn = Value::int(n as i64);
    if !is_positive(s) || !lt(s, &(&nn / 2)) {
        return false;
    }
    let lower = (&nn - 2 * s) / (2 * &nn);
    let upper = (&nn - 2) / (2 * &nn);
    pair.scaling_level(n) == -s.clone()
        && lt(&pair.inv_r, &lower)
        && lt(&upper, &pair.inv_r)
        && is_positive(&pair.inv_q)
}

/// Open interval of exponents `r` on which `||L_a^{s/2} f||_r ~ ||D^s f||_r`.
pub fn sobolev_equivalence_window(s: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidParameter(format!("need 0 < s < 2, got {s}")));
    }
    let n = params.n();
    let (lo, hi) = if params.a > 0.0 {
        (1.0, n / s)
    } else if params.a < 0.0 {
        let rho = rho(params.dim, params.a);
        (n / (n - rho), n / (s + rho))
    } else {
        (1.0, f64::INFINITY)
    };
    if lo >= hi {
        Err(Error::EmptyWindow { lo, hi })
    } else {
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(q: Value, r: Value) -> PairQR {
        PairQR::new(q, r)
    }

    #[test]
    fn s_admissible_examples() {
        assert!(is_s_admissible(&PairQR::with_infinite_q(Value::int(2)), 3));
        assert!(is_s_admissible(&pair(Value::int(2), Value::int(6)), 3));
        // 2/4 = 3/2 - 3/3, so (4, 3) does satisfy the relation
        assert!(is_s_admissible(&pair(Value::int(4), Value::int(3)), 3));
        assert!(!is_s_admissible(&pair(Value::int(4), Value::int(4)), 3));
        assert!(is_s_admissible(&pair(Value::ratio(8, 3), Value::int(4)), 3));
        assert!(!is_s_admissible(&pair(Value::int(1), Value::int(12)), 3));
    }

    #[test]
    fn hs_admissible_examples() {
        let s = Value::ratio(1, 2);
        // 2/8 = 3/2 - 3/4 - 1/2; (8/3, 4) is S-admissible and misses this relation
        assert!(is_hs_admissible(&pair(Value::int(8), Value::int(4)), &s, 3));
        assert!(!is_hs_admissible(
            &pair(Value::ratio(8, 3), Value::int(4)),
            &s,
            3
        ));
        // the q = inf endpoint is excluded
        assert!(!is_hs_admissible(
            &PairQR::with_infinite_q(Value::int(3)),
            &s,
            3
        ));
        // r at or beyond 2N/(N-2)
        assert!(!is_hs_admissible(
            &pair(Value::ratio(4, 3), Value::int(6)),
            &s,
            3
        ));
        assert!(!is_hs_admissible(
            &pair(Value::int(1), Value::int(12)),
            &s,
            3
        ));
    }

    #[test]
    fn classification_and_duality() {
        let p = pair(Value::ratio(8, 3), Value::int(4));
        assert_eq!(p.classify(3, &Value::int(0)), PairClass::SAdmissible);
        assert_eq!(p.dual().dual(), p);
        let s = Value::ratio(1, 2);
        let h = pair(Value::int(4), Value::int(6));
        assert_eq!(h.classify(3, &s), PairClass::NotAdmissible); // r = 6 is the excluded endpoint
        let h = pair(Value::int(8), Value::int(4));
        // 2/8 = 3/2 - 3/4 - 1/2
        assert_eq!(h.classify(3, &s), PairClass::HsAdmissible(0.5));
        // 2/q = 3/2 - 3/4 + 1/2 = 5/4
        let d = pair(Value::ratio(8, 5), Value::int(4));
        assert_eq!(d.classify(3, &s), PairClass::DualHsAdmissible(0.5));
    }

    #[test]
    fn windows() {
        let p = ModelParams::focusing(4, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(sobolev_equivalence_window(1.0, &p).unwrap(), (1.0, 4.0));
        let p0 = p.with_a(0.0);
        assert_eq!(
            sobolev_equivalence_window(1.0, &p0).unwrap(),
            (1.0, f64::INFINITY)
        );
        let near = p.with_a(-1.0 + 1e-10);
        let (lo, hi) = sobolev_equivalence_window(1.0, &near).unwrap();
        assert!((lo - 4.0 / 3.0).abs() < 1e-4 && (hi - 2.0).abs() < 1e-4);
        assert!(sobolev_equivalence_window(2.0, &p).is_err());
    }
}
