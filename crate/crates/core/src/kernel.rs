//! Mellin kernels of the integral representations.
//!
//! With `u = e^{−t}` and `v = 1 − e^{−t}`:
//!
//! ```text
//! φ(t)    = t·u/v² − u/v                      = Σ_{n≥1} v^{n−1} u / (n+1)
//! φₓ(t)   = e^{−xt} (t/v² − 1/v + (x−1)·t/v)  = Σ_{n≥1} v^{n−1} e^{−xt} (1/(n+1) + (x−1)/n)
//! η(t)    = t·u/v = t/(eᵗ − 1)                = Σ_{n≥0} vⁿ u / (n+1)
//! gₙ(t)   = v^{n−1} u
//! ```
//!
//! All four are analytic at `t = 0`. Below [`SWITCH`] the closed forms lose
//! about `2·log₂(1/t)` bits to cancellation, so a Taylor series is used there.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{bernoulli_poly_oracle, bernoulli_recurrence_oracle, binomial};
use crate::rational::ExactRational;

/// Closed form for `t ≥ 2^-10`, Taylor series below.
pub const SWITCH: f64 = 1.0 / 1024.0;

const GUARD: u32 = 32;

/// A kernel sample `(t, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPoint {
    pub t: Float,
    pub value: Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Phi,
    PhiX(ExactRational),
    Eta,
    /// `(1 − e^{−t})^{n−1} e^{−t}`, the Mellin kernel of `Γ(s)·Sₙ(s)`.
    PartialSum(u32),
}

pub fn kernel_phi(t: &Float, prec: u32) -> Float {
    Kernel::Phi.eval(t, prec)
}

pub fn kernel_phi_x(t: &Float, x: &ExactRational, prec: u32) -> Result<Float> {
    let kernel = Kernel::phi_x(x)?;
    Ok(kernel.eval(t, prec))
}

pub fn kernel_eta(t: &Float, prec: u32) -> Float {
    Kernel::Eta.eval(t, prec)
}

impl Kernel {
    /// `PhiX(x)` after checking `0 < x ≤ 1`.
    pub fn phi_x(x: &ExactRational) -> Result<Kernel> {
        if *x.as_rational() <= 0 || *x.as_rational() > 1 {
            return Err(Error::Domain(format!("kernel parameter x = {x} must lie in (0, 1]")));
        }
        Ok(Kernel::PhiX(x.clone()))
    }

    pub fn point(&self, t: &Float, prec: u32) -> KernelPoint {
        KernelPoint { t: t.clone(), value: self.eval(t, prec) }
    }

    /// Kernel value at `t > 0`.
    pub fn eval(&self, t: &Float, prec: u32) -> Float {
        if *t < SWITCH {
            return self.eval_taylor(t, prec);
        }
        let wp = prec + GUARD;
        let t = Float::with_val(wp, t);
        let v = -Float::with_val(wp, (-t.clone()).exp_m1_ref());
        let u = Float::with_val(wp, 1) - &v;
        let value = match self {
            Kernel::Phi => {
                let tv = Float::with_val(wp, &t / &v);
                (tv - 1u32) * &u / &v
            }
            Kernel::Eta => Float::with_val(wp, &t * &u) / &v,
            Kernel::PhiX(x) => {
                let xf = x.to_float(wp);
                let decay = Float::with_val(wp, &xf * &t);
                let decay = (-decay).exp();
                let tv = Float::with_val(wp, &t / &v);
                let bracket = Float::with_val(wp, &tv / &v) - Float::with_val(wp, v.recip_ref())
                    + Float::with_val(wp, &xf - 1u32) * &tv;
                bracket * decay
            }
            Kernel::PartialSum(n) => {
                let power = Float::with_val(wp, (&v).pow(n - 1));
                power * &u
            }
        };
        Float::with_val(prec, value)
    }

    fn eval_taylor(&self, t: &Float, prec: u32) -> Float {
        let wp = prec + GUARD;
        let t = Float::with_val(wp, t);
        // |t| < 2^-10 and the radius is at least 2π, so each term shrinks by
        // more than 2^-12; prec/12 terms plus a margin reach 2^-prec.
        let count = (wp / 12 + 8) as usize;
        let coeffs = self.taylor_coefficients(count, wp);
        let mut acc = Float::with_val(wp, 0);
        for c in coeffs.iter().rev() {
            acc *= &t;
            acc += c;
        }
        Float::with_val(prec, acc)
    }

    /// First `count` exact Taylor coefficients at `t = 0`.
    pub fn taylor_coefficients_exact(&self, count: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(count);
        let mut factorial = Integer::from(1);
        for m in 0..count {
            if m > 0 {
                factorial *= m as u32;
            }
            let numerator = match self {
                // φ(t) = d/dt(−t/(eᵗ−1)) = −Σ B_{m+1} t^m / m!
                Kernel::Phi => -bernoulli_recurrence_oracle(m as u32 + 1).into_inner(),
                // φₓ(t) = −Σ B_{m+1}(1−x) t^m / m!
                Kernel::PhiX(x) => {
                    let y = &ExactRational::one() - x;
                    -bernoulli_poly_oracle(m as u32 + 1, &y).into_inner()
                }
                Kernel::Eta => bernoulli_recurrence_oracle(m as u32).into_inner(),
                // e^{−(j+1)t} expanded termwise.
                Kernel::PartialSum(n) => {
                    let mut sum = Integer::new();
                    for j in 0..*n {
                        let term = binomial(n - 1, j) * Integer::from(j + 1).pow(m as u32);
                        if j % 2 == 0 {
                            sum += term;
                        } else {
                            sum -= term;
                        }
                    }
                    if m % 2 == 1 {
                        sum = -sum;
                    }
                    Rational::from(sum)
                }
            };
            out.push(numerator / &factorial);
        }
        out
    }

    pub fn taylor_coefficients(&self, count: usize, prec: u32) -> Vec<Float> {
        self.taylor_coefficients_exact(count)
            .into_iter()
            .map(|c| Float::with_val(prec, &c))
            .collect()
    }

    /// `(A, r)` with `|k(t)| ≤ A·(t+1)·e^{−r t}` for `t ≥ 1`.
    ///
    /// For `t ≥ 1`, `1/(1−e^{−t}) ≤ 1.6` and `1/(1−e^{−t})² ≤ 2.6`.
    pub fn envelope(&self) -> (f64, f64) {
        match self {
            Kernel::Phi => (2.6, 1.0),
            Kernel::Eta => (1.6, 1.0),
            // |e^{−xt}(t/v² − 1/v + (x−1)t/v)| ≤ e^{−xt}(2.6t + 1.6 + 1.6t)
            Kernel::PhiX(x) => (4.2, x.to_f64()),
            Kernel::PartialSum(_) => (1.0, 1.0),
        }
    }
}
