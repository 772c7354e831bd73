//! Exact signed rationals.
//!
//! Every coordinate, distance, radius and constant in the crate is a
//! [`Rational`]. Values are always kept in lowest terms with a positive
//! denominator, so structural equality is numeric equality and the derived
//! `Hash` is consistent with `Eq`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Rational {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Rational> {
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    /// `2^exp`, for negative exponents too.
    pub fn pow2(exp: i32) -> Rational {
        let p = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational(BigRational::from_integer(p))
        } else {
            Rational(BigRational::new(BigInt::one(), p))
        }
    }

    /// `k / 2^exp`.
    pub fn dyadic(k: i64, exp: u32) -> Rational {
        Rational(BigRational::new(BigInt::from(k), BigInt::one() << exp))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Rational) -> Rational {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Rational) -> Rational {
        std::cmp::max(self, other)
    }

    pub fn floor(&self) -> Rational {
        Rational(self.0.floor())
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract_unit(&self) -> Rational {
        Rational(&self.0 - self.0.floor())
    }

    /// Exact quotient; `None` for a zero divisor.
    pub fn checked_div(&self, other: &Rational) -> Option<Rational> {
        if other.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &other.0))
        }
    }

    /// Integer power with a non-negative exponent.
    pub fn powi(&self, exp: u32) -> Rational {
        Rational(num_traits::pow::pow(self.0.clone(), exp as usize))
    }

    /// If the value is `2^e` for some integer `e`, return `e`.
    pub fn log2_exact(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        let n = self.0.numer();
        let d = self.0.denom();
        let is_pow2 = |v: &BigInt| v.is_positive() && (v & (v - BigInt::one())).is_zero();
        if n.is_one() && is_pow2(d) {
            Some(-(d.bits() as i64 - 1))
        } else if d.is_one() && is_pow2(n) {
            Some(n.bits() as i64 - 1)
        } else {
            None
        }
    }

    /// Whether the denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        (d & (d - BigInt::one())).is_zero()
    }

    /// Lossy conversion for human-readable rendering only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    /// Parse `"p/q"`, an integer, or a terminating decimal whose reduced
    /// denominator is a power of two (`"0.375"`).
    pub fn parse(text: &str) -> Result<Rational> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((p, q)) = t.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            return Rational::from_big(p, q);
        }
        if let Some((int, frac)) = t.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int_part = if int.is_empty() || int == "-" { "0" } else { int };
            let i = BigInt::from_str(int_part).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("{t}: bad decimal fraction")));
            }
            let f = BigInt::from_str(frac).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            let scale = num_traits::pow::pow(BigInt::from(10), frac.len());
            let frac_part = BigRational::new(f, scale);
            let value = if neg {
                BigRational::from_integer(i) - frac_part
            } else {
                BigRational::from_integer(i) + frac_part
            };
            let r = Rational(value);
            if !r.is_dyadic() {
                return Err(Error::Parse(format!(
                    "{t}: decimal values must have a power-of-two denominator; use p/q"
                )));
            }
            return Ok(r);
        }
        let i = BigInt::from_str(t).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
        Ok(Rational(BigRational::from_integer(i)))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rational> {
        Rational::parse(s)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        Rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::integer(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational((&self.0).$m(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Greatest common divisor of machine integers, used for cycle periods.
pub fn gcd(a: usize, b: usize) -> usize {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn spec_arithmetic_examples() {
        assert_eq!(r("1/2") + r("1/4"), r("3/4"));
        assert_eq!(r("7/8").min(r("15/16")), r("7/8"));
        assert_eq!((r("1/4") - r("1/2")).abs(), r("1/4"));
        assert_eq!(r("3/4").cmp(&r("5/8")), Ordering::Greater);
    }

    #[test]
    fn lowest_terms_and_sign() {
        assert_eq!(Rational::new(2, -4).to_string(), "-1/2");
        assert_eq!(Rational::zero().to_string(), "0/1");
        assert_eq!(r("6/8"), r("3/4"));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(r("0.375"), Rational::new(3, 8));
        assert_eq!(r("-1.5"), Rational::new(-3, 2));
        assert_eq!(r(".5"), Rational::new(1, 2));
        assert_eq!(r("3"), Rational::integer(3));
        assert!(Rational::parse("0.1").is_err());
        assert!(Rational::parse("1/0").is_err());
        assert!(Rational::parse("abc").is_err());
    }

    #[test]
    fn pow2_and_log2() {
        assert_eq!(Rational::pow2(-3), r("1/8"));
        assert_eq!(Rational::pow2(2), r("4"));
        assert_eq!(r("1/64").log2_exact(), Some(-6));
        assert_eq!(r("8").log2_exact(), Some(3));
        assert_eq!(r("3/8").log2_exact(), None);
        assert_eq!(Rational::zero().log2_exact(), None);
    }

    #[test]
    fn serde_string_form() {
        let v = serde_json::to_string(&r("3/12")).unwrap();
        assert_eq!(v, "\"1/4\"");
        let back: Rational = serde_json::from_str(&v).unwrap();
        assert_eq!(back, r("1/4"));
    }

    #[test]
    fn fract_unit_wraps_negative() {
        assert_eq!(r("-1/4").fract_unit(), r("3/4"));
        assert_eq!(r("5/4").fract_unit(), r("1/4"));
    }
}
