//! Exact rational numbers.
//!
//! [`ExactRational`] is a thin wrapper over [`rug::Rational`], which keeps
//! every value canonical: the denominator is positive and coprime to the
//! numerator. The text form is `p/q`, or just `p` when `q = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(Rational);

impl ExactRational {
    pub fn new(numerator: impl Into<Integer>, denominator: impl Into<Integer>) -> Result<Self> {
        let den: Integer = denominator.into();
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(ExactRational(Rational::from((numerator.into(), den))))
    }

    pub fn zero() -> Self {
        ExactRational(Rational::new())
    }

    pub fn one() -> Self {
        ExactRational(Rational::from(1))
    }

    pub fn from_integer(value: impl Into<Integer>) -> Self {
        ExactRational(Rational::from(value.into()))
    }

    pub fn numerator(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denominator(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0().is_eq()
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn abs(&self) -> Self {
        ExactRational(Rational::from(self.0.abs_ref()))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// `true` when the stored form is reduced with a positive denominator.
    /// Always holds; exposed so tests can state the invariant.
    pub fn is_canonical(&self) -> bool {
        *self.0.denom() > 0 && Integer::from(self.0.numer().gcd_ref(self.0.denom())) == 1
    }

    /// Rounds to a binary float with `prec` bits.
    pub fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl From<Rational> for ExactRational {
    fn from(r: Rational) -> Self {
        ExactRational(r)
    }
}

impl From<Integer> for ExactRational {
    fn from(i: Integer) -> Self {
        ExactRational(Rational::from(i))
    }
}

impl From<i64> for ExactRational {
    fn from(i: i64) -> Self {
        ExactRational(Rational::from(i))
    }
}

impl From<ExactRational> for Rational {
    fn from(r: ExactRational) -> Self {
        r.0
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn parse_integer(text: &str, whole: &str) -> Result<Integer> {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed rational '{whole}'")));
    }
    Integer::from_str_radix(text, 10).map_err(|_| Error::Parse(format!("malformed rational '{whole}'")))
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `p`, `p/q`, with an optional sign on `p` and no whitespace.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            None => Ok(ExactRational::from_integer(parse_integer(s, s)?)),
            Some((p, q)) => {
                if q.starts_with(['+', '-']) {
                    return Err(Error::Parse(format!("malformed rational '{s}': sign belongs on the numerator")));
                }
                let num = parse_integer(p, s)?;
                let den = parse_integer(q, s)?;
                if den == 0 {
                    return Err(Error::Parse(format!("malformed rational '{s}': zero denominator")));
                }
                ExactRational::new(num, den)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: Self) -> ExactRational {
        ExactRational(Rational::from(&self.0 + &rhs.0))
    }
}

impl Sub for &ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: Self) -> ExactRational {
        ExactRational(Rational::from(&self.0 - &rhs.0))
    }
}

impl Mul for &ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: Self) -> ExactRational {
        ExactRational(Rational::from(&self.0 * &rhs.0))
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}
