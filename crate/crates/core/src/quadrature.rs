//! Mellin integrals `∫₀^∞ k(t) t^{s−1} dt` for real `s > 0`.
//!
//! The range is split at `t₀ = 1/4`. On `[0, t₀]` the kernel's Taylor series
//! is integrated termwise against `t^{s−1}`, which absorbs the endpoint
//! singularity for `s < 1`. On `[t₀, T]` Gauss–Legendre panels are bisected
//! until two halves agree with the whole. Beyond `T` the envelope
//! `|k(t)| ≤ A(t+1)e^{−rt}` bounds the tail.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::kernel::Kernel;
use crate::rational::ExactRational;

const SPLIT: f64 = 0.25;
const MAX_DEPTH: u32 = 12;
const MAX_TAYLOR_TERMS: usize = 4000;
const MAX_CUTOFF: f64 = 1.0e5;

#[derive(Clone, Debug, PartialEq)]
pub enum Variant {
    Riemann,
    Hurwitz(ExactRational),
    /// Returns ζ(s+1).
    Hasse,
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: Float,
    /// Sum of the Taylor remainder, panel disagreement and tail bound.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub cutoff: f64,
}

type Rule = Arc<Vec<(Float, Float)>>;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, cached per `(n, prec)`.
fn gauss_legendre(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&(n, prec)) {
        return rule.clone();
    }
    let wp = prec + 32;
    let pi = Float::with_val(wp, Constant::Pi);
    let eps = Float::with_val(32, 1) >> (prec + 4);
    let mut nodes = Vec::with_capacity(n);
    for i in 1..=n.div_ceil(2) {
        let guess = (i as f64 - 0.25) / (n as f64 + 0.5);
        let mut x = Float::with_val(wp, &pi * guess).cos();
        let mut derivative = Float::new(wp);
        for _ in 0..200 {
            let (p, dp) = legendre(n, &x, wp);
            let dx = Float::with_val(wp, &p / &dp);
            x -= &dx;
            derivative = dp;
            if dx.abs() < eps {
                let (_, dp) = legendre(n, &x, wp);
                derivative = dp;
                break;
            }
        }
        let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref());
        let weight = Float::with_val(wp, 2) / (one_minus * derivative.square());
        nodes.push((Float::with_val(prec, &x), Float::with_val(prec, &weight)));
    }
    if n % 2 == 1 {
        // The middle root of an odd-degree polynomial is exactly 0.
        nodes.last_mut().expect("n >= 1").0 = Float::new(prec);
    }
    let mut rule = Vec::with_capacity(n);
    for (x, w) in &nodes {
        if !x.is_zero() {
            rule.push((Float::with_val(prec, -x), w.clone()));
        }
    }
    rule.extend(nodes);
    let rule = Arc::new(rule);
    cache.lock().expect("rule cache poisoned").insert((n, prec), rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &Float, prec: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, x * &p1) * (2 * k - 1) as u32;
        let p2 = (a - Float::with_val(prec, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    let x2m1 = Float::with_val(prec, x.square_ref()) - 1u32;
    let dp = (Float::with_val(prec, x * &p1) - &p0) * n as u32 / x2m1;
    (p1, dp)
}

struct Integrand<'a> {
    kernel: &'a Kernel,
    s_minus_one: Float,
    prec: u32,
    evaluations: usize,
}

impl Integrand<'_> {
    fn eval(&mut self, t: &Float) -> Float {
        self.evaluations += 1;
        let k = self.kernel.eval(t, self.prec);
        let power = Float::with_val(self.prec, t).pow(&self.s_minus_one);
        k * power
    }

    fn panel(&mut self, rule: &[(Float, Float)], a: &Float, b: &Float) -> Float {
        let prec = self.prec;
        let mid = Float::with_val(prec, a + b) / 2u32;
        let half = Float::with_val(prec, b - a) / 2u32;
        let mut acc = Float::new(prec);
        for (x, w) in rule {
            let t = Float::with_val(prec, &half * x) + &mid;
            acc += self.eval(&t) * w;
        }
        acc * half
    }

    /// Bisects until `|left + right − whole| ≤ tol`; returns value and error.
    fn adaptive(&mut self, rule: &[(Float, Float)], a: &Float, b: &Float, whole: Float, tol: f64, depth: u32) -> Result<(Float, f64)> {
        let prec = self.prec;
        let mid = Float::with_val(prec, a + b) / 2u32;
        let left = self.panel(rule, a, &mid);
        let right = self.panel(rule, &mid, b);
        let refined = Float::with_val(prec, &left + &right);
        let err = Float::with_val(prec, &refined - &whole).abs().to_f64();
        if err <= tol {
            return Ok((refined, err));
        }
        if depth >= MAX_DEPTH {
            return Err(Error::QuadratureNonConvergence { estimate: err });
        }
        let (l, el) = self.adaptive(rule, a, &mid, left, tol / 2.0, depth + 1)?;
        let (r, er) = self.adaptive(rule, &mid, b, right, tol / 2.0, depth + 1)?;
        Ok((l + r, el + er))
    }
}

/// `∫₀^{t₀} k(t) t^{s−1} dt = Σ c_m t₀^{m+s}/(m+s)`.
fn small_t_part(kernel: &Kernel, s: &Float, tol: f64, prec: u32) -> Result<(Float, f64)> {
    let t0 = Float::with_val(prec, SPLIT);
    let mut power = Float::with_val(prec, (&t0).pow(s)); // t₀^{m+s}
    let mut sum = Float::new(prec);
    let mut batch = 64usize;
    let mut coeffs = kernel.taylor_coefficients(batch, prec);
    let mut small_run = 0usize;
    let mut m = 0usize;
    loop {
        if m == coeffs.len() {
            if batch >= MAX_TAYLOR_TERMS {
                let estimate = Float::with_val(prec, sum.abs_ref()).to_f64();
                return Err(Error::QuadratureNonConvergence { estimate });
            }
            batch *= 2;
            coeffs = kernel.taylor_coefficients(batch, prec);
        }
        let denom = Float::with_val(prec, s + m as u32);
        let term = Float::with_val(prec, &coeffs[m] * &power) / denom;
        let size = Float::with_val(64, term.abs_ref()).to_f64();
        sum += &term;
        let scale = Float::with_val(64, sum.abs_ref()).to_f64();
        if !sum.is_zero() && size <= tol * scale * 1e-3 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        m += 1;
        if m >= 8 && small_run >= 4 {
            // Terms shrink at least geometrically with ratio t₀/2π < 1/20,
            // so the remainder is below the last term.
            return Ok((sum, size));
        }
        power *= &t0;
    }
}

/// Bound on `∫_T^∞ A(t+1)t^{s−1}e^{−rt} dt`, valid when the log-derivative
/// of the integrand is at most `−r/2` on `[T, ∞)`; `None` otherwise.
fn tail_bound(amplitude: f64, rate: f64, s: f64, t: f64) -> Option<f64> {
    let slope = 1.0 / (t + 1.0) + (s - 1.0).max(0.0) / t;
    if slope > rate / 2.0 {
        return None;
    }
    let log_g = amplitude.ln() + (t + 1.0).ln() + (s - 1.0) * t.ln() - rate * t;
    Some(2.0 * log_g.exp() / rate)
}

/// `∫₀^∞ k(t) t^{s−1} dt` to relative tolerance `tol`.
pub fn mellin_integral(kernel: &Kernel, s: &Float, tol: f64, prec: u32) -> Result<QuadratureResult> {
    if !(s.is_finite() && *s > 0) {
        return Err(Error::Domain(format!("Mellin integral needs real s > 0, got {}", s.to_f64())));
    }
    let sf = s.to_f64();
    let n = ((-tol.log2()) / 8.0).ceil().max(16.0) as usize;
    let rule = gauss_legendre(n, prec);
    let (small, small_err) = small_t_part(kernel, s, tol, prec)?;

    let mut integrand = Integrand {
        kernel,
        s_minus_one: Float::with_val(prec, s - 1u32),
        prec,
        evaluations: 0,
    };
    let (amplitude, rate) = kernel.envelope();
    let min_cutoff = (50.0f64).max(10.0 * (sf + 1.0)) / rate.min(1.0);

    // Panels [1/4, 1/2], [1/2, 1], then unit width.
    let mut edges = vec![Float::with_val(prec, SPLIT), Float::with_val(prec, 0.5), Float::with_val(prec, 1)];
    let mut total = small.clone();
    let mut error = small_err;
    let mut k = 0usize;
    loop {
        if k + 1 == edges.len() {
            let t = edges[k].to_f64();
            let scale = Float::with_val(64, total.abs_ref()).to_f64();
            if t >= min_cutoff {
                if let Some(bound) = tail_bound(amplitude, rate, sf, t) {
                    if bound <= tol * scale / 4.0 {
                        error += bound;
                        let value = total;
                        return Ok(QuadratureResult { value, error_estimate: error, evaluations: integrand.evaluations, cutoff: t });
                    }
                }
            }
            if t >= MAX_CUTOFF {
                return Err(Error::QuadratureNonConvergence { estimate: error });
            }
            edges.push(Float::with_val(prec, &edges[k] + 1u32));
        }
        let (a, b) = (edges[k].clone(), edges[k + 1].clone());
        let whole = integrand.panel(&rule, &a, &b);
        let scale = Float::with_val(64, total.abs_ref()).to_f64().max(Float::with_val(64, whole.abs_ref()).to_f64());
        let panel_tol = tol * scale / 64.0;
        let (value, err) = integrand.adaptive(&rule, &a, &b, whole, panel_tol, 0)?;
        total += &value;
        error += err;
        k += 1;
    }
}

/// ζ(s) (Riemann), ζ(s, x) (Hurwitz) or ζ(s+1) (Hasse) for real `s > 0`.
pub fn zeta_by_quadrature(s: &Float, variant: &Variant, cfg: &EvalConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(s.is_finite() && *s > 0) {
        return Err(Error::Domain(format!("quadrature needs real s > 0, got {}", s.to_f64())));
    }
    let prec = cfg.quadrature_precision();
    let s = Float::with_val(prec, s);
    let kernel = match variant {
        Variant::Riemann => Kernel::Phi,
        Variant::Hurwitz(x) => Kernel::phi_x(x)?,
        Variant::Hasse => Kernel::Eta,
    };
    let factor = match variant {
        Variant::Riemann | Variant::Hurwitz(_) => {
            if s == 1 {
                return Err(Error::Pole("zeta has a pole at s = 1"));
            }
            Float::with_val(prec, &s - 1u32)
        }
        Variant::Hasse => s.clone(),
    };
    let tol = cfg.relative_tolerance.max(2f64.powi(-(prec as i32) + 16));
    let integral = mellin_integral(&kernel, &s, tol, prec)?;
    let denominator = gamma(&s, prec)? * factor;
    let scale = Float::with_val(64, denominator.abs_ref()).to_f64();
    Ok(QuadratureResult {
        value: integral.value / denominator,
        error_estimate: integral.error_estimate / scale,
        ..integral
    })
}

/// `(1/Γ(s)) ∫₀^∞ (1−e^{−t})^{n−1} e^{−t} t^{s−1} dt`, which equals `Sₙ(s)`.
pub fn partial_sum_integral_check(n: u32, s: &Float, cfg: &EvalConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidIndex { op: "partial_sum_integral_check", reason: "n must be at least 1".into() });
    }
    if !(s.is_finite() && *s > 0) {
        return Err(Error::Domain(format!("quadrature needs real s > 0, got {}", s.to_f64())));
    }
    let prec = cfg.quadrature_precision();
    let s = Float::with_val(prec, s);
    let tol = cfg.relative_tolerance.max(2f64.powi(-(prec as i32) + 16));
    let integral = mellin_integral(&Kernel::PartialSum(n), &s, tol, prec)?;
    let g = gamma(&s, prec)?;
    let scale = g.to_f64();
    Ok(QuadratureResult {
        value: integral.value / g,
        error_estimate: integral.error_estimate / scale,
        ..integral
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::new(128, 2000, 1e-30).unwrap()
    }

    fn f(v: f64) -> Float {
        Float::with_val(192, v)
    }

    fn pi2() -> Float {
        Float::with_val(192, Constant::Pi).square()
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(192, a - b).abs().to_f64() <= tol
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = gauss_legendre(10, 128);
        // ∫_{−1}^{1} x^18 dx = 2/19, exact for degree ≤ 19.
        let mut acc = Float::new(128);
        for (x, w) in rule.iter() {
            acc += Float::with_val(128, x.pow(18u32)) * w;
        }
        let expected = Float::with_val(128, 2) / 19u32;
        assert!(Float::with_val(128, &acc - &expected).abs() < 1e-35);
        let rule = gauss_legendre(11, 128);
        assert_eq!(rule.len(), 11);
    }

    #[test]
    fn riemann_values() {
        let two = zeta_by_quadrature(&f(2.0), &Variant::Riemann, &cfg()).unwrap();
        assert!(close(&two.value, &(pi2() / 6u32), 1e-28));
        assert!(two.error_estimate < 1e-25);
        let four = zeta_by_quadrature(&f(4.0), &Variant::Riemann, &cfg()).unwrap();
        assert!(close(&four.value, &(pi2().square() / 90u32), 1e-28));
        // ζ(1/2) = −1.4603545088095868128894991525...
        let half = zeta_by_quadrature(&f(0.5), &Variant::Riemann, &cfg()).unwrap();
        assert!((half.value.to_f64() + 1.460_354_508_809_586_8).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_and_hasse() {
        let x = ExactRational::new(1, 2).unwrap();
        let v = zeta_by_quadrature(&f(2.0), &Variant::Hurwitz(x), &cfg()).unwrap();
        assert!(close(&v.value, &(pi2() / 2u32), 1e-28));
        let one = zeta_by_quadrature(&f(3.0), &Variant::Hurwitz(ExactRational::one()), &cfg()).unwrap();
        let riemann = zeta_by_quadrature(&f(3.0), &Variant::Riemann, &cfg()).unwrap();
        assert!(close(&one.value, &riemann.value, 1e-28));
        let hasse = zeta_by_quadrature(&f(1.0), &Variant::Hasse, &cfg()).unwrap();
        assert!(close(&hasse.value, &(pi2() / 6u32), 1e-28));
    }

    #[test]
    fn errors() {
        assert!(matches!(zeta_by_quadrature(&f(1.0), &Variant::Riemann, &cfg()), Err(Error::Pole(_))));
        assert!(matches!(zeta_by_quadrature(&f(-1.0), &Variant::Riemann, &cfg()), Err(Error::Domain(_))));
        let bad = ExactRational::new(3, 2).unwrap();
        assert!(matches!(zeta_by_quadrature(&f(2.0), &Variant::Hurwitz(bad), &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn partial_sums() {
        let one = partial_sum_integral_check(1, &f(2.0), &cfg()).unwrap();
        assert!(close(&one.value, &f(1.0), 1e-28));
        let two = partial_sum_integral_check(2, &f(1.0), &cfg()).unwrap();
        assert!(close(&two.value, &f(0.5), 1e-28));
        let three = partial_sum_integral_check(3, &f(2.0), &cfg()).unwrap();
        let expected = Float::with_val(192, 1) - f(0.5) + Float::with_val(192, 1) / 9u32;
        assert!(close(&three.value, &expected, 1e-28));
        assert!(partial_sum_integral_check(0, &f(2.0), &cfg()).is_err());
    }
}
