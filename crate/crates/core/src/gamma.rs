//! Γ(s) for real `s > 0` at arbitrary precision.
//!
//! The argument is shifted upward with `Γ(s) = Γ(s+m) / (s(s+1)…(s+m−1))`
//! until the Stirling series
//!
//! ```text
//! ln Γ(z) = (z − ½) ln z − z + ½ ln 2π + Σ_{k≥1} B_{2k} / (2k(2k−1) z^{2k−1})
//! ```
//!
//! reaches the requested precision before its terms start to grow. The
//! smallest Stirling term is about `e^{−2πz}`, so `z ≳ 0.11 · bits` suffices.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::exact::bernoulli_recurrence_oracle;

const GUARD: u32 = 32;

pub fn gamma(s: &Float, prec: u32) -> Result<Float> {
    if !(s.is_finite() && *s > 0) {
        return Err(Error::Domain(format!("gamma is implemented for real s > 0, got {}", s.to_f64())));
    }
    let wp = prec + GUARD;
    let threshold = (0.11 * f64::from(wp)).ceil() + 8.0;
    let s = Float::with_val(wp, s);

    let mut z = s.clone();
    let mut product = Float::with_val(wp, 1);
    while z < threshold {
        product *= &z;
        z += 1u32;
    }

    let ln_z = Float::with_val(wp, z.ln_ref());
    let half_ln_two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let half_ln_two_pi = half_ln_two_pi.ln() / 2u32;
    let mut ln_gamma = Float::with_val(wp, &z - 0.5f64) * &ln_z - &z + half_ln_two_pi;

    let z_sq = Float::with_val(wp, z.square_ref());
    let mut z_pow = z.clone(); // z^{2k−1}
    let limit = Float::with_val(wp, ln_gamma.abs_ref()) >> wp;
    let mut previous: Option<Float> = None;
    for k in 1u32.. {
        let b = bernoulli_recurrence_oracle(2 * k).to_float(wp);
        let term = b / (Float::with_val(wp, 2 * k) * (2 * k - 1)) / &z_pow;
        let size = Float::with_val(32, term.abs_ref());
        if let Some(prev) = &previous {
            if size > *prev {
                // Asymptotic series started diverging before converging:
                // the shift threshold is too small for this precision.
                return Err(Error::Domain("Stirling series diverged; increase shift".into()));
            }
        }
        ln_gamma += &term;
        if size <= limit {
            break;
        }
        previous = Some(size);
        z_pow *= &z_sq;
    }
    let value = ln_gamma.exp() / product;
    Ok(Float::with_val(prec, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b);
        (d / b).abs().to_f64()
    }

    #[test]
    fn known_values() {
        let p = 256;
        let one = gamma(&Float::with_val(p, 1), p).unwrap();
        assert!(rel_err(&one, &Float::with_val(p, 1)) < 1e-75);
        let two = gamma(&Float::with_val(p, 2), p).unwrap();
        assert!(rel_err(&two, &Float::with_val(p, 1)) < 1e-75);
        let half = gamma(&Float::with_val(p, 0.5), p).unwrap();
        let sqrt_pi = Float::with_val(p, Constant::Pi).sqrt();
        assert!(rel_err(&half, &sqrt_pi) < 1e-75);
        let ten = gamma(&Float::with_val(p, 10), p).unwrap();
        assert!(rel_err(&ten, &Float::with_val(p, 362_880)) < 1e-75);
    }

    #[test]
    fn matches_mpfr_gamma() {
        for prec in [64, 200, 320, 700] {
            for s in [0.001, 0.25, 0.5, 1.5, 3.5, 6.0, 17.25, 80.0] {
                let x = Float::with_val(prec, s);
                let ours = gamma(&x, prec).unwrap();
                let reference = Float::with_val(prec, x.gamma_ref());
                let tol = 2f64.powi(-(prec as i32) + 4);
                assert!(rel_err(&ours, &reference) < tol, "prec={prec} s={s}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma(&Float::with_val(64, 0), 64).is_err());
        assert!(gamma(&Float::with_val(64, -1.5), 64).is_err());
    }
}
