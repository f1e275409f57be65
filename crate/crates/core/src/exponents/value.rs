//! Exact-or-approximate scalars for exponent arithmetic.
//!
//! Rational inputs stay rational through `+ - * /`; anything that touches an
//! irrational quantity degrades to `f64`, after which comparisons use a
//! relative tolerance of `1e-12`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

/// Machine-word rationals, promoted to arbitrary precision when an operation would overflow.
#[derive(Debug, Clone)]
pub enum Rational {
    Small(Ratio<i128>),
    Big(BigRational),
}

impl Rational {
    fn big(&self) -> BigRational {
        match self {
            Rational::Small(r) => {
                BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Rational::Big(r) => r.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_zero(),
            Rational::Big(r) => r.is_zero(),
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Rational::Small(r) => r.is_positive(),
            Rational::Big(r) => r.is_positive(),
        }
    }

    fn to_f64(&self) -> Option<f64> {
        match self {
            Rational::Small(r) => r.to_f64(),
            Rational::Big(r) => r.to_f64(),
        }
    }

    fn cmp(&self, other: &Rational) -> Ordering {
        match (self, other) {
            (Rational::Small(a), Rational::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }

    fn neg(self) -> Rational {
        match self {
            Rational::Small(r) if *r.numer() != i128::MIN => Rational::Small(-r),
            other => Rational::Big(-other.big()),
        }
    }

    fn apply(
        &self,
        other: &Rational,
        small: impl Fn(&Ratio<i128>, &Ratio<i128>) -> Option<Ratio<i128>>,
        big: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Rational {
        if let (Rational::Small(a), Rational::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Rational::Small(r);
            }
        }
        Rational::Big(big(&self.big(), &other.big()))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Rational::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Rational::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Rational::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Exact(Rational::Small(Ratio::from_integer(n as i128)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Value::Exact(Rational::Small(Ratio::new(p as i128, q as i128)))
    }

    pub fn approx(x: f64) -> Self {
        Value::Approx(x)
    }

    /// Reads `x` through its shortest round-trip decimal form, so `0.3` becomes `3/10`.
    pub fn from_decimal(x: f64) -> Self {
        if !x.is_finite() {
            return Value::Approx(x);
        }
        let s = format!("{x}");
        let (neg, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        let digits = format!("{int_part}{frac_part}");
        let r = match (
            digits.parse::<i128>(),
            10i128.checked_pow(frac_part.len() as u32),
        ) {
            (Ok(m), Some(scale)) => Rational::Small(Ratio::new(m, scale)),
            _ => {
                let m: BigInt = digits.parse().expect("decimal digits");
                Rational::Big(BigRational::new(
                    m,
                    num_traits::pow(BigInt::from(10), frac_part.len()),
                ))
            }
        };
        Value::Exact(if neg { r.neg() } else { r })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }

    pub fn recip(&self) -> Value {
        Value::int(1) / self
    }

    pub fn pow(&self, k: u32) -> Value {
        let mut out = Value::int(1);
        for _ in 0..k {
            out = out * self;
        }
        out
    }

    /// Ordering with the float tolerance applied when either side is approximate;
    /// `None` for NaN.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let (x, y) = (self.to_f64(), other.to_f64());
                if x.is_nan() || y.is_nan() {
                    return None;
                }
                if x == y {
                    return Some(Ordering::Equal);
                }
                if x.is_infinite() || y.is_infinite() {
                    return x.partial_cmp(&y);
                }
                let scale = 1f64.max(x.abs()).max(y.abs());
                if (x - y).abs() <= TOLERANCE * scale {
                    Some(Ordering::Equal)
                } else {
                    x.partial_cmp(&y)
                }
            }
        }
    }

    pub fn max(self, other: Value) -> Value {
        if self.compare(&other) == Some(Ordering::Less) {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Value) -> Value {
        if self.compare(&other) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Some(Ordering::Equal)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::int(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Approx(x) => write!(f, "{x:.17e}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Value", 2)?;
        st.serialize_field("value", &self.to_f64())?;
        st.serialize_field("exact", &self.is_exact().then(|| self.to_string()))?;
        st.end()
    }
}

fn add(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => {
            Value::Exact(x.apply(y, |p, q| p.checked_add(q), |p, q| p + q))
        }
        _ => Value::Approx(a.to_f64() + b.to_f64()),
    }
}

fn sub(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => {
            Value::Exact(x.apply(y, |p, q| p.checked_sub(q), |p, q| p - q))
        }
        _ => Value::Approx(a.to_f64() - b.to_f64()),
    }
}

fn mul(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => {
            Value::Exact(x.apply(y, |p, q| p.checked_mul(q), |p, q| p * q))
        }
        _ => Value::Approx(a.to_f64() * b.to_f64()),
    }
}

// exact division by zero falls back to the IEEE result (inf or NaN)
fn div(a: &Value, b: &Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) if !y.is_zero() => {
            Value::Exact(x.apply(y, |p, q| p.checked_div(q), |p, q| p / q))
        }
        _ => Value::Approx(a.to_f64() / b.to_f64()),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<Value> for Value {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Value> for Value {
            type Output = Value;
            fn $m(self, rhs: &Value) -> Value {
                $f(&self, rhs)
            }
        }
        impl $tr<Value> for &Value {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                $f(self, &rhs)
            }
        }
        impl $tr<&Value> for &Value {
            type Output = Value;
            fn $m(self, rhs: &Value) -> Value {
                $f(self, rhs)
            }
        }
        impl $tr<i64> for Value {
            type Output = Value;
            fn $m(self, rhs: i64) -> Value {
                $f(&self, &Value::int(rhs))
            }
        }
        impl $tr<i64> for &Value {
            type Output = Value;
            fn $m(self, rhs: i64) -> Value {
                $f(self, &Value::int(rhs))
            }
        }
        impl $tr<Value> for i64 {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                $f(&Value::int(self), &rhs)
            }
        }
        impl $tr<&Value> for i64 {
            type Output = Value;
            fn $m(self, rhs: &Value) -> Value {
                $f(&Value::int(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.neg()),
            Value::Approx(x) => Value::Approx(-x),
        }
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        -self.clone()
    }
}

/// Sign test that is strict for exact values and tolerance-aware for floats.
pub fn is_positive(v: &Value) -> bool {
    match v {
        Value::Exact(r) => r.is_positive(),
        _ => v.compare(&Value::int(0)) == Some(Ordering::Greater),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_reading_is_exact() {
        assert_eq!(Value::from_decimal(0.3).to_string(), "3/10");
        assert_eq!(Value::from_decimal(-2.5).to_string(), "-5/2");
        assert_eq!(Value::from_decimal(4.0).to_string(), "4");
        assert_eq!(Value::from_decimal(1e-3).to_string(), "1/1000");
    }

    #[test]
    fn arithmetic_stays_exact() {
        let x = Value::ratio(1, 3) + Value::ratio(1, 6);
        assert!(x.is_exact());
        assert_eq!(x.to_string(), "1/2");
        assert_eq!((2 * x.clone()).to_string(), "1");
        let y = x / Value::int(0);
        assert!(!y.is_exact() && y.to_f64().is_infinite());
    }

    #[test]
    fn overflow_promotes_to_big_integers() {
        let big = Value::int(i64::MAX);
        let x = big.pow(4) / big.pow(3);
        assert!(x.is_exact());
        assert_eq!(x.to_string(), i64::MAX.to_string());
        let tiny = Value::ratio(1, i64::MAX).pow(3) * Value::int(3);
        assert!(is_positive(&tiny) && tiny.compare(&Value::int(0)) == Some(Ordering::Greater));
        assert_eq!(-(-Value::from_decimal(0.125)), Value::ratio(1, 8));
    }

    #[test]
    fn mixed_comparison_uses_tolerance() {
        let a = Value::ratio(1, 3);
        let b = Value::approx(1.0 / 3.0 + 1e-15);
        assert_eq!(a, b);
        assert_ne!(a, Value::approx(0.3334));
        assert!(Value::approx(f64::NAN).compare(&a).is_none());
    }
}
