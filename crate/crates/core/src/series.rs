//! Globally convergent series for the Riemann and Hurwitz zeta functions.
//!
//! Two independent representations are implemented:
//!
//! ```text
//! (s−1) ζ(s,x) = Σ_{n≥1} Sₙ(s,x) (1/(n+1) + (x−1)/n)
//! (s−1) ζ(s,x) = Σ_{n≥1} Sₙ(s−1,x) / n
//! Sₙ(s,x)      = Σ_{k=0}^{n−1} (−1)^k C(n−1,k) (k+x)^{−s}
//! ```
//!
//! The first reduces at `x = 1` to `Σ Sₙ(s)/(n+1)`; the second at `x = 1` is
//! `s ζ(s+1) = Σ_{n≥0} S_{n+1}(s)/(n+1)` after the shift `s → s−1`.
//!
//! Both converge for every `s ≠ 1`, but only like `N^{−x}` (up to powers of
//! `ln N`). The engines therefore sum `EvalConfig::direct_terms = M` leading
//! terms `(m+x)^{−s}` directly and run the series at `x + M`, where the
//! terms fall off like `n^{−(x+M+1)}`. `M = 0` gives the plain series.
//!
//! `Sₙ` is the first column of the forward-difference table of
//! `k ↦ (k+x)^{−s}`. It is built one anti-diagonal at a time, so each new
//! term costs `n` subtractions. Those subtractions cancel up to `n` bits,
//! which is what the linear guard policy pays for.

use rug::{Complete, Float, Integer};

use crate::complex::PrecisionComplex;
use crate::config::EvalConfig;
use crate::error::{Error, Result};

/// Bits kept in error estimates.
const ESTIMATE_PREC: u32 = 64;
/// Consecutive small terms required by the stopping rule.
const WINDOW: usize = 5;
/// Minimum number of series terms before the stopping rule may fire.
const MIN_TERMS: usize = 8;
/// Safety factor applied to the tail estimate.
const SAFETY: f64 = 5.0;

/// A converged (or budget-limited) series evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesResult {
    /// Rounded to the target precision.
    pub value: PrecisionComplex,
    /// Series terms summed, not counting the direct terms.
    pub terms_used: usize,
    /// Estimated absolute error: discarded tail plus working-precision
    /// rounding.
    pub truncation_estimate: Float,
    pub working_precision_bits: u32,
    /// `false` when the stopping rule was not met within `max_terms`.
    pub converged: bool,
}

/// Which of the two series to sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `(s−1)ζ(s,x) = Σ Sₙ(s,x)(1/(n+1) + (x−1)/n)`.
    Ser,
    /// `(s−1)ζ(s,x) = Σ Sₙ(s−1,x)/n`, Hasse's series at `x = 1`.
    Hasse,
}

fn binomial_float(n: u32, k: u32, prec: u32) -> Float {
    Float::with_val(prec, Integer::binomial_u(n, k).complete())
}

fn check_x(x: &Float) -> Result<()> {
    if !(x.is_finite() && *x > 0 && *x <= 1) {
        return Err(Error::Domain(format!("x = {} must satisfy 0 < x <= 1", x.to_f64())));
    }
    Ok(())
}

fn is_one(s: &PrecisionComplex) -> bool {
    s.im().is_zero() && *s.re() == 1
}

/// `Sₙ(s) = Σ_{k=0}^{n−1} (−1)^k C(n−1,k) (k+1)^{−s}`, with `S₁(s) = 1`.
pub fn series_term_riemann(n: usize, s: &PrecisionComplex, working_precision: u32) -> PrecisionComplex {
    assert!(n >= 1, "series terms are indexed from 1");
    if n == 1 {
        return PrecisionComplex::from_f64(1.0, 0.0, working_precision);
    }
    let one = Float::with_val(working_precision, 1);
    binomial_sum(n, s, &one, working_precision)
}

/// `Sₙ(s,x) = Σ_{k=0}^{n−1} (−1)^k C(n−1,k) (k+x)^{−s}`, with `S₁(s,x) = x^{−s}`.
pub fn series_term_hurwitz(
    n: usize,
    s: &PrecisionComplex,
    x: &Float,
    working_precision: u32,
) -> Result<PrecisionComplex> {
    assert!(n >= 1, "series terms are indexed from 1");
    check_x(x)?;
    Ok(binomial_sum(n, s, x, working_precision))
}

fn binomial_sum(n: usize, s: &PrecisionComplex, x: &Float, prec: u32) -> PrecisionComplex {
    let exponent = -s.with_prec(prec);
    let mut acc = PrecisionComplex::zero(prec);
    for k in 0..n {
        let base = Float::with_val(prec, x + k as u32);
        let power = PrecisionComplex::positive_base_pow(&base, &exponent, prec);
        let term = power.scale(&binomial_float(n as u32 - 1, k as u32, prec));
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// `ζ(s)` from `(s−1)ζ(s) = Σ_{n≥1} Sₙ(s)/(n+1)`.
pub fn riemann_zeta(s: &PrecisionComplex, cfg: &EvalConfig) -> Result<SeriesResult> {
    let one = Float::with_val(cfg.working_precision(), 1);
    zeta_by_series(s, &one, SeriesKind::Ser, cfg)
}

/// `ζ(s+1)` from Hasse's `s ζ(s+1) = Σ_{n≥0} S_{n+1}(s)/(n+1)`; the argument
/// is `s + 1`.
pub fn riemann_zeta_hasse(s_plus_one: &PrecisionComplex, cfg: &EvalConfig) -> Result<SeriesResult> {
    let one = Float::with_val(cfg.working_precision(), 1);
    zeta_by_series(s_plus_one, &one, SeriesKind::Hasse, cfg)
}

/// `ζ(s,x)` for `0 < x ≤ 1` from
/// `(s−1)ζ(s,x) = Σ_{n≥1} Sₙ(s,x)(1/(n+1) + (x−1)/n)`.
pub fn hurwitz_zeta(s: &PrecisionComplex, x: &Float, cfg: &EvalConfig) -> Result<SeriesResult> {
    check_x(x)?;
    zeta_by_series(s, x, SeriesKind::Ser, cfg)
}

/// `ζ(s,x)` for `0 < x ≤ 1` by either series.
pub fn zeta_by_series(s: &PrecisionComplex, x: &Float, kind: SeriesKind, cfg: &EvalConfig) -> Result<SeriesResult> {
    cfg.validate()?;
    check_x(x)?;
    if is_one(s) {
        return Err(Error::Pole("zeta"));
    }
    let raw = sum_series(s, x, kind, cfg);
    let factor_abs = raw.factor.abs();
    let value = raw.total.div(&raw.factor).with_prec(cfg.target_precision_bits);
    // Tail and working rounding, plus the final rounding to the target.
    let output_rounding = Float::with_val(ESTIMATE_PREC, value.abs()) >> cfg.target_precision_bits;
    let estimate = Float::with_val(ESTIMATE_PREC, &raw.total_error / &factor_abs) + &raw.direct_error + output_rounding;
    let result = SeriesResult {
        value,
        terms_used: raw.terms,
        truncation_estimate: estimate,
        working_precision_bits: cfg.working_precision(),
        converged: raw.converged,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::BudgetExhausted(Box::new(result)))
    }
}

struct RawSum {
    /// `(s−1) ζ(s,x)`.
    total: PrecisionComplex,
    factor: PrecisionComplex,
    /// Error bound on `total` from the tail and the series rounding.
    total_error: Float,
    /// Error bound on ζ from rounding in the direct terms.
    direct_error: Float,
    terms: usize,
    converged: bool,
}

fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().log2() + f64::from(exp)
}

fn pow2(log2: f64) -> Float {
    if log2 == f64::NEG_INFINITY {
        return Float::new(ESTIMATE_PREC);
    }
    Float::with_val(ESTIMATE_PREC, log2).exp2()
}

fn sum_series(s: &PrecisionComplex, x: &Float, kind: SeriesKind, cfg: &EvalConfig) -> RawSum {
    let wp = cfg.working_precision();
    let s = s.with_prec(wp);
    let one = PrecisionComplex::from_f64(1.0, 0.0, wp);
    let factor = &s - &one;
    let s_abs = s.abs().to_f64();
    let eps_log2 = -f64::from(wp);

    // Leading terms Σ_{m<M} (m+x)^{−s}.
    let neg_s = -s.clone();
    let mut direct = PrecisionComplex::zero(wp);
    let mut direct_abs = Float::new(ESTIMATE_PREC);
    for m in 0..cfg.direct_terms {
        let base = Float::with_val(wp, x + m);
        let term = PrecisionComplex::positive_base_pow(&base, &neg_s, wp);
        direct_abs += term.abs();
        direct = &direct + &term;
    }
    let direct_growth = 8.0 + 2.0 * s_abs * (x.to_f64() + f64::from(cfg.direct_terms)).ln().max(1.0);
    let direct_error = Float::with_val(ESTIMATE_PREC, &direct_abs * pow2(eps_log2 + direct_growth.log2()));

    let shift = Float::with_val(wp, x + cfg.direct_terms);
    let shift_f64 = shift.to_f64();
    let exponent = match kind {
        SeriesKind::Ser => neg_s,
        SeriesKind::Hasse => &one - &s,
    };
    let exponent_abs = exponent.abs().to_f64();
    let shift_minus_one = Float::with_val(wp, &shift - 1u32);

    let mut partial = &factor * &direct;
    let mut diagonal: Vec<PrecisionComplex> = Vec::new();
    let mut window: Vec<Float> = Vec::with_capacity(WINDOW);
    let mut small_run = 0usize;
    let mut max_f_log2 = f64::NEG_INFINITY;
    let mut max_noise_log2 = f64::NEG_INFINITY;
    let tol = Float::with_val(ESTIMATE_PREC, cfg.relative_tolerance);
    let mut terms = 0usize;
    let mut converged = false;

    for n in 1..=cfg.max_terms {
        let base = Float::with_val(wp, &shift + (n as u32 - 1));
        let value = PrecisionComplex::positive_base_pow(&base, &exponent, wp);
        max_f_log2 = max_f_log2.max(log2_abs(&value.abs()));

        let mut carry = value;
        for slot in diagonal.iter_mut() {
            let next = &*slot - &carry;
            *slot = std::mem::replace(&mut carry, next);
        }
        diagonal.push(carry.clone());
        let s_n = carry;

        let weight = match kind {
            SeriesKind::Ser => {
                Float::with_val(wp, 1) / (n as u32 + 1) + Float::with_val(wp, &shift_minus_one / n as u32)
            }
            SeriesKind::Hasse => Float::with_val(wp, 1) / n as u32,
        };
        let term = s_n.scale(&weight);
        partial = &partial + &term;
        terms = n;

        // Rounding noise in Sₙ: 2^{n−1} max|f| ulps, scaled by the error of
        // each power and the n subtractions along the diagonal.
        let growth = 8.0 + 2.0 * exponent_abs * (shift_f64 + n as f64).ln().max(1.0) + n as f64;
        let noise_log2 =
            (n as f64 - 1.0) + max_f_log2 + eps_log2 + growth.log2() + log2_abs(&Float::with_val(53, weight.abs_ref()));
        max_noise_log2 = max_noise_log2.max(noise_log2);

        let term_abs = Float::with_val(ESTIMATE_PREC, term.abs());
        let threshold = Float::with_val(ESTIMATE_PREC, &tol * &partial.abs());
        let at_noise_floor = log2_abs(&term_abs) <= noise_log2 + 2.0;
        if term_abs <= threshold || at_noise_floor {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if window.len() == WINDOW {
            window.remove(0);
        }
        window.push(term_abs);

        if n >= MIN_TERMS && small_run >= WINDOW {
            converged = true;
            break;
        }
    }

    // Tail: terms decay like n^{−(shift+1)}, so the remainder after N terms
    // is about N/shift times the last term.
    let largest = window.iter().fold(Float::new(ESTIMATE_PREC), |acc, t| acc.max(t));
    let tail_factor = SAFETY * (terms as f64 / shift_f64).max(1.0);
    let tail = Float::with_val(ESTIMATE_PREC, &largest * tail_factor);
    let rounding = pow2(max_noise_log2 + (terms as f64).log2());
    let total_error = tail + rounding;

    RawSum { total: partial, factor, total_error, direct_error, terms, converged }
}

/// `B_s = s ζ(1−s)`, with its evaluation metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBernoulli {
    pub value: PrecisionComplex,
    /// `true` at `s = 0`, where the value is the limit `−1`.
    pub limit_evaluation: bool,
    /// The zeta evaluation behind the value; `None` for the limit.
    pub series: Option<SeriesResult>,
}

impl ComplexBernoulli {
    /// Error estimate for `value`: `|s|` times the zeta estimate, plus the
    /// rounding of the product.
    pub fn truncation_estimate(&self, s: &PrecisionComplex) -> Float {
        match &self.series {
            Some(r) => {
                let rounding = Float::with_val(ESTIMATE_PREC, self.value.abs()) >> self.value.prec();
                Float::with_val(ESTIMATE_PREC, &r.truncation_estimate * &s.abs()) + rounding
            }
            None => Float::new(ESTIMATE_PREC),
        }
    }
}

/// Generalized Bernoulli number `B_s = s ζ(1−s)`.
///
/// At integers this is `(−1)^{k+1} Bₖ` for the classical `Bₖ` with
/// `B₁ = −1/2`: equal at odd `k`, opposite in sign at even `k`. At `s = 0`
/// the limit `−1` is returned and flagged.
pub fn bernoulli_complex(s: &PrecisionComplex, cfg: &EvalConfig) -> Result<ComplexBernoulli> {
    bernoulli_via(s, cfg, |arg| riemann_zeta(arg, cfg))
}

/// Generalized Bernoulli polynomial `B_s(1−x) = s ζ(1−s, x)` for `0 < x ≤ 1`.
///
/// At integers this is `(−1)^{k+1} Bₖ(1−x)`, the same sign relation as the
/// numbers.
pub fn bernoulli_poly_complex(s: &PrecisionComplex, x: &Float, cfg: &EvalConfig) -> Result<ComplexBernoulli> {
    check_x(x)?;
    bernoulli_via(s, cfg, |arg| hurwitz_zeta(arg, x, cfg))
}

fn bernoulli_via(
    s: &PrecisionComplex,
    cfg: &EvalConfig,
    zeta: impl Fn(&PrecisionComplex) -> Result<SeriesResult>,
) -> Result<ComplexBernoulli> {
    cfg.validate()?;
    if s.is_zero() {
        return Ok(ComplexBernoulli {
            value: PrecisionComplex::from_f64(-1.0, 0.0, cfg.target_precision_bits),
            limit_evaluation: true,
            series: None,
        });
    }
    let wp = cfg.working_precision();
    let arg = &PrecisionComplex::from_f64(1.0, 0.0, wp) - &s.with_prec(wp);
    let scale = |r: SeriesResult| {
        let value = (&s.with_prec(wp) * &r.value).with_prec(cfg.target_precision_bits);
        (value, r)
    };
    match zeta(&arg) {
        Ok(r) => {
            let (value, r) = scale(r);
            Ok(ComplexBernoulli { value, limit_evaluation: false, series: Some(r) })
        }
        Err(Error::BudgetExhausted(r)) => {
            let estimate = Float::with_val(ESTIMATE_PREC, &r.truncation_estimate * &s.abs());
            let (value, r) = scale(*r);
            Err(Error::BudgetExhausted(Box::new(SeriesResult { value, truncation_estimate: estimate, ..r })))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> PrecisionComplex {
        PrecisionComplex::from_f64(re, im, 256)
    }

    fn close(a: &PrecisionComplex, re: f64, im: f64, tol: f64) -> bool {
        let d = a - &PrecisionComplex::from_f64(re, im, a.prec());
        d.abs().to_f64() <= tol
    }

    // Distance to the rational p/q, computed at the value's precision.
    fn close_q(a: &PrecisionComplex, p: i64, q: i64, tol: f64) -> bool {
        let target = Float::with_val(a.prec(), p) / q;
        let d = a - &PrecisionComplex::real(&target, a.prec());
        d.abs().to_f64() <= tol
    }

    #[test]
    fn riemann_term_examples() {
        let wp = 256;
        for s in [c(0.0, 0.0), c(3.0, -1.0), c(-7.5, 2.0)] {
            assert_eq!(series_term_riemann(1, &s, wp).to_f64_pair(), (1.0, 0.0));
        }
        assert!(close(&series_term_riemann(2, &c(1.0, 0.0), wp), 0.5, 0.0, 1e-70));
        for n in 2..=10 {
            assert!(series_term_riemann(n, &c(0.0, 0.0), wp).is_zero(), "n={n}");
        }
        // S₃(2) = 1 − 2/4 + 1/9
        assert!(close(&series_term_riemann(3, &c(2.0, 0.0), wp), 1.0 - 0.5 + 1.0 / 9.0, 0.0, 1e-15));
    }

    #[test]
    fn hurwitz_term_examples() {
        let wp = 256;
        let one = Float::with_val(wp, 1);
        for s in [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 3.0)] {
            for n in 1..=10 {
                let a = series_term_hurwitz(n, &s, &one, wp).unwrap();
                let b = series_term_riemann(n, &s, wp);
                assert!((&a - &b).abs() < Float::with_val(wp, 1e-70), "n={n}");
            }
        }
        let half = Float::with_val(wp, 0.5);
        let v = series_term_hurwitz(2, &c(2.0, 0.0), &half, wp).unwrap();
        assert!(close_q(&v, 32, 9, 1e-70));
        let v = series_term_hurwitz(1, &c(2.0, 0.0), &half, wp).unwrap();
        assert_eq!(v.to_f64_pair(), (4.0, 0.0));
        assert!(series_term_hurwitz(1, &c(2.0, 0.0), &Float::with_val(wp, 0), wp).is_err());
        assert!(series_term_hurwitz(1, &c(2.0, 0.0), &Float::with_val(wp, 1.5), wp).is_err());
    }

    #[test]
    fn diagonal_matches_binomial_sum() {
        // The incremental difference column used by the engine against the
        // direct binomial definition.
        let cfg = EvalConfig::new(128, 30, 1e-30).unwrap().with_direct_terms(0);
        let wp = cfg.working_precision();
        let s = c(1.5, 2.5).with_prec(wp);
        let x = Float::with_val(wp, 0.75);
        let raw = sum_series(&s, &x, SeriesKind::Ser, &EvalConfig { max_terms: 12, ..cfg.clone() });
        let mut expected = PrecisionComplex::zero(wp);
        for n in 1..=12usize {
            let w = Float::with_val(wp, 1) / (n as u32 + 1) + Float::with_val(wp, &x - 1u32) / n as u32;
            expected = &expected + &series_term_hurwitz(n, &s, &x, wp).unwrap().scale(&w);
        }
        let partial = &raw.total;
        assert!((partial - &expected).abs() < Float::with_val(wp, 1e-55));
    }

    #[test]
    fn zeta_spot_values() {
        let cfg = EvalConfig::default();
        let z2 = riemann_zeta(&c(2.0, 0.0), &cfg).unwrap();
        assert!(close(&z2.value, std::f64::consts::PI.powi(2) / 6.0, 0.0, 1e-15));
        assert!(z2.converged && z2.terms_used <= cfg.max_terms);
        let z0 = riemann_zeta(&c(0.0, 0.0), &cfg).unwrap();
        assert!(close(&z0.value, -0.5, 0.0, 1e-70));
        let zm1 = riemann_zeta(&c(-1.0, 0.0), &cfg).unwrap();
        assert!(close_q(&zm1.value, -1, 12, 1e-70));
        let h = riemann_zeta_hasse(&c(4.0, 0.0), &cfg).unwrap();
        assert!(close(&h.value, std::f64::consts::PI.powi(4) / 90.0, 0.0, 1e-15));
    }

    #[test]
    fn poles_and_domains() {
        let cfg = EvalConfig::default();
        assert!(matches!(riemann_zeta(&c(1.0, 0.0), &cfg), Err(Error::Pole(_))));
        assert!(matches!(riemann_zeta_hasse(&c(1.0, 0.0), &cfg), Err(Error::Pole(_))));
        let half = Float::with_val(64, 0.5);
        assert!(matches!(hurwitz_zeta(&c(1.0, 0.0), &half, &cfg), Err(Error::Pole(_))));
        assert!(matches!(hurwitz_zeta(&c(2.0, 0.0), &Float::with_val(64, 1.25), &cfg), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(&c(2.0, 0.0), &Float::with_val(64, -0.5), &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn plain_series_exhausts_budget_at_s_two() {
        let cfg = EvalConfig::new(128, 200, 1e-30).unwrap().with_direct_terms(0);
        match riemann_zeta(&c(2.0, 0.0), &cfg) {
            Err(Error::BudgetExhausted(r)) => {
                assert!(!r.converged);
                assert_eq!(r.terms_used, 200);
                let err = (&r.value - &c(std::f64::consts::PI.powi(2) / 6.0, 0.0)).abs().to_f64();
                assert!(err > 1e-3, "plain series should still be far off: {err}");
                assert!(r.truncation_estimate.to_f64() >= err, "estimate {} < error {err}", r.truncation_estimate);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn plain_series_terminates_at_nonpositive_integers() {
        let cfg = EvalConfig::new(128, 50, 1e-30).unwrap().with_direct_terms(0);
        let r = riemann_zeta(&c(-3.0, 0.0), &cfg).unwrap();
        assert!(close_q(&r.value, 1, 120, 1e-35));
        assert!(r.terms_used < 20);
        let r = riemann_zeta_hasse(&c(-3.0, 0.0), &cfg).unwrap();
        assert!(close_q(&r.value, 1, 120, 1e-35));
    }

    #[test]
    fn complex_bernoulli_examples() {
        let cfg = EvalConfig::default();
        let b1 = bernoulli_complex(&c(1.0, 0.0), &cfg).unwrap();
        assert!(close(&b1.value, -0.5, 0.0, 1e-70));
        let b3 = bernoulli_complex(&c(3.0, 0.0), &cfg).unwrap();
        assert!(close(&b3.value, 0.0, 0.0, 1e-70));
        let b2 = bernoulli_complex(&c(2.0, 0.0), &cfg).unwrap();
        assert!(close_q(&b2.value, -1, 6, 1e-70));
        let b0 = bernoulli_complex(&c(0.0, 0.0), &cfg).unwrap();
        assert!(b0.limit_evaluation && b0.series.is_none());
        assert_eq!(b0.value.to_f64_pair(), (-1.0, 0.0));

        let half = Float::with_val(64, 0.5);
        let p2 = bernoulli_poly_complex(&c(2.0, 0.0), &half, &cfg).unwrap();
        assert!(close_q(&p2.value, 1, 12, 1e-70));
        let p1 = bernoulli_poly_complex(&c(1.0, 0.0), &half, &cfg).unwrap();
        assert!(close(&p1.value, 0.0, 0.0, 1e-70));
        let p0 = bernoulli_poly_complex(&c(0.0, 0.0), &half, &cfg).unwrap();
        assert!(p0.limit_evaluation);
        let one = Float::with_val(64, 1);
        for k in 1..=3 {
            let a = bernoulli_poly_complex(&c(k as f64, 0.0), &one, &cfg).unwrap();
            let b = bernoulli_complex(&c(k as f64, 0.0), &cfg).unwrap();
            assert!((&a.value - &b.value).abs() < Float::with_val(64, 1e-70));
        }
    }
}
