//! Complex numbers over MPFR floats with an explicit binary precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Minimum precision accepted for a [`PrecisionComplex`].
pub const MIN_PRECISION: u32 = 53;

/// A complex number whose real and imaginary parts share one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionComplex {
    re: Float,
    im: Float,
}

impl PrecisionComplex {
    pub fn zero(prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        PrecisionComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        PrecisionComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn real(re: &Float, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        PrecisionComplex { re: Float::with_val(prec, re), im: Float::new(prec) }
    }

    /// Both parts are rounded to `prec` bits.
    pub fn from_parts(re: &Float, im: &Float, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        PrecisionComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Copy rounded to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::from_parts(&self.re, &self.im, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `Some(n)` when the value is exactly the integer `n`.
    pub fn as_integer(&self) -> Option<i64> {
        if !self.im.is_zero() || !self.re.is_integer() {
            return None;
        }
        self.re.to_integer().and_then(|i| i.to_i64())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let prec = self.prec();
        PrecisionComplex {
            re: Float::with_val(prec, &self.re * factor),
            im: Float::with_val(prec, &self.im * factor),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let prec = self.prec().max(rhs.prec());
        let den = Float::with_val(prec, rhs.re.square_ref()) + Float::with_val(prec, rhs.im.square_ref());
        let re = (Float::with_val(prec, &self.re * &rhs.re) + &self.im * &rhs.im) / &den;
        let im = (Float::with_val(prec, &self.im * &rhs.re) - &self.re * &rhs.im) / &den;
        PrecisionComplex { re, im }
    }

    /// `base^exponent` for a positive real base, principal branch.
    ///
    /// A real exponent goes through MPFR's correctly rounded `pow`; otherwise
    /// `exp(exponent · ln base)` is formed from a shared logarithm.
    pub fn positive_base_pow(base: &Float, exponent: &PrecisionComplex, prec: u32) -> Self {
        debug_assert!(*base > 0);
        let prec = prec.max(MIN_PRECISION);
        if exponent.im.is_zero() {
            let base = Float::with_val(prec, base);
            return PrecisionComplex { re: base.pow(&exponent.re), im: Float::new(prec) };
        }
        let log = Float::with_val(prec + 16, base.ln_ref());
        let magnitude = Float::with_val(prec + 16, &exponent.re * &log).exp();
        let angle = Float::with_val(prec + 16, &exponent.im * &log);
        let (sin, cos) = angle.sin_cos(Float::new(prec + 16));
        PrecisionComplex {
            re: Float::with_val(prec, &magnitude * &cos),
            im: Float::with_val(prec, &magnitude * &sin),
        }
    }

    /// Parses `a`, `bi`, `a+bi` or `a-bi` with decimal parts and no whitespace.
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed complex number '{text}'"));
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(bad());
        }
        let prec = prec.max(MIN_PRECISION);
        let parse_part = |part: &str| -> Result<Float> {
            let lower = part.to_ascii_lowercase();
            let digits = lower.trim_start_matches(['+', '-']);
            if digits.is_empty() || digits.contains(['i', 'n', 'a', '@']) || part.len() - digits.len() > 1 {
                return Err(bad());
            }
            Float::parse(part).map(|p| Float::with_val(prec, p)).map_err(|_| bad())
        };
        let Some(body) = text.strip_suffix('i') else {
            return Ok(PrecisionComplex { re: parse_part(text)?, im: Float::new(prec) });
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
        let (re_text, im_text) = match split {
            Some(p) => (&body[..p], &body[p..]),
            None => ("0", body),
        };
        let im = match im_text {
            "" | "+" => Float::with_val(prec, 1),
            "-" => Float::with_val(prec, -1),
            t => parse_part(t)?,
        };
        Ok(PrecisionComplex { re: parse_part(re_text)?, im })
    }

    /// Decimal digits that make `to_string` → `parse` exact at `prec` bits.
    pub fn round_trip_digits(prec: u32) -> usize {
        (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }
}

impl fmt::Display for PrecisionComplex {
    /// `a+bi` / `a-bi` with round-trip-exact digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = Some(Self::round_trip_digits(self.prec()));
        let re = self.re.to_string_radix(10, digits);
        let im_abs = Float::with_val(self.prec(), self.im.abs_ref());
        let im = im_abs.to_string_radix(10, digits);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "{re}{sign}{im}i")
    }
}

impl Add for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn add(self, rhs: Self) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        PrecisionComplex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl Sub for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn sub(self, rhs: Self) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        PrecisionComplex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl Mul for &PrecisionComplex {
    type Output = PrecisionComplex;
    fn mul(self, rhs: Self) -> PrecisionComplex {
        let prec = self.prec().max(rhs.prec());
        let re = Float::with_val(prec, &self.re * &rhs.re) - Float::with_val(prec, &self.im * &rhs.im);
        let im = Float::with_val(prec, &self.re * &rhs.im) + Float::with_val(prec, &self.im * &rhs.re);
        PrecisionComplex { re, im }
    }
}

impl Neg for PrecisionComplex {
    type Output = PrecisionComplex;
    fn neg(self) -> PrecisionComplex {
        PrecisionComplex { re: -self.re, im: -self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let p = 128;
        let c = PrecisionComplex::parse("2+3i", p).unwrap();
        assert_eq!(c.to_f64_pair(), (2.0, 3.0));
        let c = PrecisionComplex::parse("-1.5e-3-2.25E+2i", p).unwrap();
        assert_eq!(c.to_f64_pair(), (-1.5e-3, -225.0));
        let c = PrecisionComplex::parse("-4i", p).unwrap();
        assert_eq!(c.to_f64_pair(), (0.0, -4.0));
        let c = PrecisionComplex::parse("7", p).unwrap();
        assert!(c.is_real());
        assert_eq!(c.as_integer(), Some(7));
        let c = PrecisionComplex::parse("1-i", p).unwrap();
        assert_eq!(c.to_f64_pair(), (1.0, -1.0));
        for bad in ["", "2 +3i", "abc", "1+2j", "1++2i", "nan", "inf", "--1", "1e"] {
            assert!(PrecisionComplex::parse(bad, p).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        let p = 200;
        let third = Float::with_val(p, 1) / 3u32;
        let c = PrecisionComplex::from_parts(&third, &Float::with_val(p, -&third), p);
        let text = c.to_string();
        assert_eq!(PrecisionComplex::parse(&text, p).unwrap(), c);
    }

    #[test]
    fn pow_of_positive_base() {
        let p = 256;
        let two = Float::with_val(p, 2);
        let s = PrecisionComplex::from_f64(-2.0, 0.0, p);
        assert_eq!(PrecisionComplex::positive_base_pow(&two, &s, p).to_f64_pair(), (0.25, 0.0));
        // 2^{i π / ln 2} = e^{iπ} = −1
        let angle = PrecisionComplex::pi(p) / Float::with_val(p, two.ln_ref());
        let s = PrecisionComplex::from_parts(&Float::new(p), &angle, p);
        let v = PrecisionComplex::positive_base_pow(&two, &s, p);
        let err = (&v - &PrecisionComplex::from_f64(-1.0, 0.0, p)).abs();
        assert!(err < Float::with_val(p, 1e-70));
    }

    #[test]
    fn arithmetic() {
        let p = 64;
        let a = PrecisionComplex::from_f64(1.0, 2.0, p);
        let b = PrecisionComplex::from_f64(3.0, -1.0, p);
        assert_eq!((&a * &b).to_f64_pair(), (5.0, 5.0));
        assert_eq!((&a + &b).to_f64_pair(), (4.0, 1.0));
        assert_eq!((&a - &b).to_f64_pair(), (-2.0, 3.0));
        assert_eq!((&a * &b).div(&b).to_f64_pair(), (1.0, 2.0));
        assert_eq!(a.abs().to_f64(), 5f64.sqrt());
    }
}
