//! Cross-engine verification suites.
//!
//! | # | suite                                                    |
//! |---|----------------------------------------------------------|
//! | 1 | B₀…B₈ value table from every exact formula                |
//! | 2 | Worpitzky, formula a, formula b and the recurrence agree  |
//! | 3 | Δₙ(k) = (−1)ⁿ n! S(k,n)                                   |
//! | 4 | explicit polynomial formula and symmetry                  |
//! | 5 | the two zeta series agree on a complex grid               |
//! | 6 | classical zeta values                                     |
//! | 7 | complex-order Bernoulli numbers at integers               |
//! | 8 | quadrature against the series                             |
//! | 9 | partial-sum integrals against `Sₙ(s)`                     |

use std::time::Instant;

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::complex::PrecisionComplex;
use crate::config::EvalConfig;
use crate::error::{Error, Result};
use crate::exact::{
    bernoulli_formula_a, bernoulli_formula_b, bernoulli_poly, bernoulli_poly_at, bernoulli_poly_oracle,
    bernoulli_recurrence_oracle, bernoulli_worpitzky, bernoulli_zero, forward_difference, stirling2,
};
use crate::quadrature::{partial_sum_integral_check, zeta_by_quadrature, Variant};
use crate::rational::ExactRational;
use crate::series::{bernoulli_complex, hurwitz_zeta, riemann_zeta, riemann_zeta_hasse, series_term_riemann, SeriesResult};

pub const SUITE_COUNT: u8 = 9;

pub const VALUE_TABLE: [(u32, i64, i64); 9] =
    [(0, 1, 1), (1, -1, 2), (2, 1, 6), (3, 0, 1), (4, -1, 30), (5, 0, 1), (6, 1, 42), (7, 0, 1), (8, -1, 30)];

pub const POLY_GRID: [&str; 8] = ["0", "1/4", "1/3", "1/2", "2/3", "1", "3/2", "-1"];

pub const QUADRATURE_RIEMANN: [f64; 5] = [0.5, 1.5, 2.0, 3.0, 6.0];

pub const QUADRATURE_HURWITZ: [&str; 3] = ["1/2", "1/3", "1"];

pub const PARTIAL_SUM_N: [u32; 5] = [1, 2, 3, 5, 10];

pub const PARTIAL_SUM_S: [f64; 3] = [1.0, 2.0, 3.5];

/// The first failing comparison of a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: u8,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    /// Largest deviation over the inexact comparisons, if any.
    pub max_deviation: Option<f64>,
    pub counterexample: Option<Counterexample>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub max_k: u32,
    /// Points per axis of the square grid for suite 5.
    pub grid_points: usize,
    /// Half-width of the grid.
    pub grid_radius: f64,
    pub cfg: EvalConfig,
    /// Corrupts one value of the given suite so that it must fail.
    pub fault: Option<u8>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_k: 50, grid_points: 21, grid_radius: 5.0, cfg: EvalConfig::default(), fault: None }
    }
}

impl VerifyOptions {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.grid_points == 0 {
            return Err(Error::Config("grid needs at least one point per axis".into()));
        }
        if !(self.grid_radius.is_finite() && self.grid_radius >= 0.0) {
            return Err(Error::Config(format!("grid radius {} must be finite and non-negative", self.grid_radius)));
        }
        if let Some(f) = self.fault {
            if !(1..=SUITE_COUNT).contains(&f) {
                return Err(Error::Config(format!("fault target {f} is not a suite number")));
            }
        }
        Ok(())
    }

    fn faulty(&self, suite: u8) -> bool {
        self.fault == Some(suite)
    }

    /// Grid coordinates `−r, …, r`.
    pub fn grid_axis(&self) -> Vec<f64> {
        let n = self.grid_points;
        if n == 1 {
            return vec![0.0];
        }
        let r = self.grid_radius;
        (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).collect()
    }
}

/// Accumulates checks and keeps the first failure.
struct Tally {
    checks: usize,
    max_deviation: Option<f64>,
    counterexample: Option<Counterexample>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, max_deviation: None, counterexample: None }
    }

    fn check(&mut self, ok: bool, inputs: impl FnOnce() -> String, expected: impl FnOnce() -> String, actual: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(Counterexample { inputs: inputs(), expected: expected(), actual: actual() });
        }
    }

    fn deviation(&mut self, d: f64) {
        self.max_deviation = Some(self.max_deviation.map_or(d, |m| m.max(d)));
    }

    fn error(&mut self, inputs: String, err: &Error) {
        self.check(false, || inputs, || "a value".into(), || format!("error: {err}"));
    }

    fn finish(self, suite: u8, name: &str, start: Instant) -> SuiteReport {
        SuiteReport {
            suite,
            name: name.into(),
            passed: self.counterexample.is_none(),
            checks: self.checks,
            max_deviation: self.max_deviation,
            counterexample: self.counterexample,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }
}

fn corrupt(q: ExactRational) -> ExactRational {
    &q + &ExactRational::new(1, 1000).expect("nonzero denominator")
}

fn corrupt_float(x: Float) -> Float {
    let prec = x.prec();
    x * Float::with_val(prec, 1.001) + 1e-3f64
}

fn sci(x: &Float) -> String {
    x.to_string_radix(10, Some(30))
}

fn sci_c(x: &PrecisionComplex) -> String {
    format!("{}{}{}i", sci(x.re()), if x.im().is_sign_negative() { "" } else { "+" }, sci(x.im()))
}

/// Runs the selected suites (all when `only` is empty) in order.
pub fn run(opts: &VerifyOptions, only: &[u8]) -> Result<Vec<SuiteReport>> {
    opts.validate()?;
    let mut reports = Vec::new();
    for suite in 1..=SUITE_COUNT {
        if only.is_empty() || only.contains(&suite) {
            reports.push(run_suite(suite, opts));
        }
    }
    Ok(reports)
}

pub fn run_suite(suite: u8, opts: &VerifyOptions) -> SuiteReport {
    match suite {
        1 => value_table(opts),
        2 => formula_agreement(opts),
        3 => stirling_identity(opts),
        4 => polynomial_formula(opts),
        5 => two_series(opts),
        6 => classical_values(opts),
        7 => complex_reconciliation(opts),
        8 => quadrature_cross_check(opts),
        9 => partial_sum_integrals(opts),
        _ => panic!("no suite {suite}"),
    }
}

type Formula = (&'static str, fn(u32) -> Result<ExactRational>);

fn formulas() -> [Formula; 4] {
    [
        ("worpitzky", bernoulli_worpitzky),
        ("a", bernoulli_formula_a),
        ("b", bernoulli_formula_b),
        ("oracle", |k| Ok(bernoulli_recurrence_oracle(k))),
    ]
}

pub fn value_table(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    for (k, p, q) in VALUE_TABLE.into_iter().filter(|(k, _, _)| *k <= opts.max_k.max(1)) {
        let expected = ExactRational::new(p, q).expect("table denominators are nonzero");
        for (name, f) in formulas() {
            let value = if k == 0 {
                // The difference formulas start at k = 1; B₀ is a constant.
                match name {
                    "b" => bernoulli_formula_b(0),
                    _ => Ok(bernoulli_zero()),
                }
            } else {
                f(k)
            };
            match value {
                Ok(mut v) => {
                    if opts.faulty(1) && k == 2 && name == "worpitzky" {
                        v = corrupt(v);
                    }
                    tally.check(v == expected, || format!("k={k} formula={name}"), || expected.to_string(), || v.to_string());
                }
                Err(e) => tally.error(format!("k={k} formula={name}"), &e),
            }
        }
    }
    tally.finish(1, "value table", start)
}

pub fn formula_agreement(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    for k in 1..=opts.max_k {
        let oracle = bernoulli_recurrence_oracle(k);
        for (name, f) in &formulas()[..3] {
            match f(k) {
                Ok(mut v) => {
                    if opts.faulty(2) && k == opts.max_k && *name == "a" {
                        v = corrupt(v);
                    }
                    tally.check(v == oracle, || format!("k={k} formula={name}"), || format!("{oracle} (oracle)"), || v.to_string());
                }
                Err(e) => tally.error(format!("k={k} formula={name}"), &e),
            }
        }
    }
    tally.finish(2, "formula agreement", start)
}

pub fn stirling_identity(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let top = opts.max_k.min(50);
    for k in 1..=top {
        let mut factorial = Integer::from(1);
        for n in 1..=k {
            factorial *= n;
            let (delta, s) = match (forward_difference(n, k), stirling2(k, n)) {
                (Ok(d), Ok(s)) => (d, s),
                (Err(e), _) | (_, Err(e)) => {
                    tally.error(format!("n={n} k={k}"), &e);
                    continue;
                }
            };
            let mut rhs = Integer::from(&factorial * &s);
            if n % 2 == 1 {
                rhs = -rhs;
            }
            let mut delta = delta;
            if opts.faulty(3) && n == 1 && k == top {
                delta += 1;
            }
            tally.check(delta == rhs, || format!("n={n} k={k}"), || format!("(-1)^n n! S(k,n) = {rhs}"), || format!("Delta = {delta}"));
        }
    }
    tally.finish(3, "stirling identity", start)
}

pub fn polynomial_formula(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let top = opts.max_k.min(30);
    let one = ExactRational::one();
    for text in POLY_GRID {
        let x: ExactRational = text.parse().expect("grid points parse");
        let y = &one - &x;
        for k in 1..=top {
            let oracle = bernoulli_poly_oracle(k, &y);
            let explicit = match bernoulli_poly_at(k, &x) {
                Ok(v) if opts.faulty(4) && k == top && text == "1/3" => corrupt(v),
                Ok(v) => v,
                Err(e) => {
                    tally.error(format!("k={k} x={x}"), &e);
                    continue;
                }
            };
            tally.check(explicit == oracle, || format!("B_k(1-x), k={k} x={x}"), || format!("{oracle} (oracle)"), || explicit.to_string());
            // B_k(1−x) = (−1)^k B_k(x), with B_k(x) also from the explicit formula.
            match bernoulli_poly(k, &x) {
                Ok(at_x) => {
                    let mirrored = if k % 2 == 0 { at_x } else { -at_x };
                    tally.check(
                        mirrored == explicit,
                        || format!("symmetry, k={k} x={x}"),
                        || format!("B_k(1-x) = {explicit}"),
                        || format!("(-1)^k B_k(x) = {mirrored}"),
                    );
                }
                Err(e) => tally.error(format!("symmetry, k={k} x={x}"), &e),
            }
        }
    }
    tally.finish(4, "polynomial formula", start)
}

/// Evaluates `f` over `items` on all cores, returning results in input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Grid points of suite 5, excluding the pole.
pub fn two_series_grid(opts: &VerifyOptions) -> Vec<(f64, f64)> {
    let axis = opts.grid_axis();
    let mut points = Vec::new();
    for &im in &axis {
        for &re in &axis {
            if !(re == 1.0 && im == 0.0) {
                points.push((re, im));
            }
        }
    }
    points
}

/// `|a − b|` against `10 · (est_a + est_b)`.
pub fn two_series_point(re: f64, im: f64, cfg: &EvalConfig) -> Result<(SeriesResult, SeriesResult, f64, f64)> {
    let s = PrecisionComplex::from_f64(re, im, cfg.working_precision());
    let ser = riemann_zeta(&s, cfg)?;
    let hasse = riemann_zeta_hasse(&s, cfg)?;
    let diff = (&ser.value - &hasse.value).abs().to_f64();
    let bound = 10.0 * (ser.truncation_estimate.to_f64() + hasse.truncation_estimate.to_f64());
    Ok((ser, hasse, diff, bound))
}

pub fn two_series(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let points = two_series_grid(opts);
    let results = parallel_map(&points, |&(re, im)| two_series_point(re, im, &opts.cfg));
    for (index, ((re, im), result)) in points.iter().zip(results).enumerate() {
        match result {
            Ok((ser, hasse, mut diff, bound)) => {
                if opts.faulty(5) && index == 0 {
                    diff = bound * 2.0 + 1e-3;
                }
                tally.deviation(diff);
                tally.check(
                    diff <= bound,
                    || format!("s={re}{im:+}i, |diff|={diff:e} > 10*(sum of estimates)={bound:e}"),
                    || format!("{} (ser)", sci_c(&ser.value)),
                    || format!("{} (hasse)", sci_c(&hasse.value)),
                );
            }
            Err(e) => tally.error(format!("s={re}{im:+}i"), &e),
        }
    }
    tally.finish(5, "two-series agreement", start)
}

/// Tolerance for the classical values: `1e-20`, relaxed for targets
/// below 80 bits.
fn classical_tolerance(cfg: &EvalConfig) -> f64 {
    1e-20f64.max(2f64.powi(-(cfg.target_precision_bits as i32) + 12))
}

/// `(label, computed, expected)` for the classical spot values.
pub fn classical_points(cfg: &EvalConfig) -> Vec<(String, Result<SeriesResult>, Float)> {
    let wp = cfg.working_precision();
    let p = cfg.target_precision_bits + 32;
    let pi2 = PrecisionComplex::pi(p).square();
    let real = |v: f64| PrecisionComplex::from_f64(v, 0.0, wp);
    let half = Float::with_val(wp, 0.5);
    vec![
        ("zeta(2) = pi^2/6".into(), riemann_zeta(&real(2.0), cfg), Float::with_val(p, &pi2 / 6u32)),
        ("zeta(4) = pi^4/90".into(), riemann_zeta(&real(4.0), cfg), Float::with_val(p, pi2.square_ref()) / 90u32),
        ("zeta(0) = -1/2".into(), riemann_zeta(&real(0.0), cfg), Float::with_val(p, -0.5)),
        ("zeta(-1) = -1/12".into(), riemann_zeta(&real(-1.0), cfg), Float::with_val(p, -1) / 12u32),
        ("zeta(2,1/2) = 3 zeta(2)".into(), hurwitz_zeta(&real(2.0), &half, cfg), Float::with_val(p, &pi2 / 2u32)),
    ]
}

pub fn classical_values(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let tol = classical_tolerance(&opts.cfg);
    for (index, (label, result, expected)) in classical_points(&opts.cfg).into_iter().enumerate() {
        match result {
            Ok(r) => {
                let mut value = r.value.re().clone();
                if opts.faulty(6) && index == 0 {
                    value = corrupt_float(value);
                }
                let err = Float::with_val(expected.prec(), &value - &expected).abs().to_f64()
                    + r.value.im().to_f64().abs();
                tally.deviation(err);
                tally.check(err <= tol, || format!("{label}, tolerance {tol:e}"), || sci(&expected), || sci(&value));
            }
            Err(e) => tally.error(label, &e),
        }
    }
    tally.finish(6, "classical values", start)
}

/// Bound `2^{−(target−16)} · max(1, |Bₖ|)`, i.e. `2^{−240}` at 256 bits.
pub fn reconciliation_bound(cfg: &EvalConfig, exact: &ExactRational) -> f64 {
    let scale = exact.to_f64().abs().max(1.0);
    2f64.powi(-(cfg.target_precision_bits as i32 - 16)) * scale
}

pub fn complex_reconciliation(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let top = opts.max_k.min(20);
    let p = opts.cfg.target_precision_bits + 32;
    for k in 1..=top {
        let s = PrecisionComplex::from_f64(f64::from(k), 0.0, opts.cfg.working_precision());
        let exact = bernoulli_recurrence_oracle(k);
        // B_s = s ζ(1−s) carries the factor (−1)^{k+1} relative to Bₖ.
        let signed = if k % 2 == 0 { -exact.clone() } else { exact.clone() };
        let target = signed.to_float(p);
        match bernoulli_complex(&s, &opts.cfg) {
            Ok(b) => {
                let mut value = b.value.re().clone();
                if opts.faulty(7) && k == 2 {
                    value = -value;
                }
                let err = Float::with_val(p, &value - &target).abs().to_f64() + b.value.im().to_f64().abs();
                let bound = reconciliation_bound(&opts.cfg, &exact);
                tally.deviation(err);
                tally.check(
                    err <= bound,
                    || format!("k={k}, bound {bound:e}"),
                    || format!("(-1)^(k+1) B_k = {signed}"),
                    || sci(&value),
                );
            }
            Err(e) => tally.error(format!("k={k}"), &e),
        }
    }
    tally.finish(7, "complex-order reconciliation", start)
}

/// `(label, quadrature, series)` pairs of suite 8.
pub fn quadrature_points(cfg: &EvalConfig) -> Vec<(String, Result<Float>, Result<Float>)> {
    let wp = cfg.working_precision();
    let real = |v: f64| PrecisionComplex::from_f64(v, 0.0, wp);
    let quad = |s: f64, v: Variant| zeta_by_quadrature(&Float::with_val(64, s), &v, cfg).map(|r| r.value);
    let series_re = |r: Result<SeriesResult>| r.map(|r| r.value.re().clone());
    let mut cases: Vec<(String, f64, Variant)> = QUADRATURE_RIEMANN.iter().map(|&s| (format!("riemann s={s}"), s, Variant::Riemann)).collect();
    for x in QUADRATURE_HURWITZ {
        let xq: ExactRational = x.parse().expect("grid points parse");
        cases.push((format!("hurwitz s=2 x={x}"), 2.0, Variant::Hurwitz(xq)));
    }
    cases.push(("hasse s=1 (zeta(2))".into(), 1.0, Variant::Hasse));
    parallel_map(&cases, |(label, s, variant)| {
        let series = match variant {
            Variant::Riemann => series_re(riemann_zeta(&real(*s), cfg)),
            Variant::Hurwitz(x) => series_re(hurwitz_zeta(&real(*s), &x.to_float(wp), cfg)),
            Variant::Hasse => series_re(riemann_zeta(&real(s + 1.0), cfg)),
        };
        (label.clone(), quad(*s, variant.clone()), series)
    })
}

pub fn quadrature_cross_check(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    for (index, (label, quad, series)) in quadrature_points(&opts.cfg).into_iter().enumerate() {
        match (quad, series) {
            (Ok(mut q), Ok(s)) => {
                if opts.faulty(8) && index == 0 {
                    q = corrupt_float(q);
                }
                let err = Float::with_val(q.prec(), &q - &s).abs().to_f64();
                tally.deviation(err);
                tally.check(err <= 1e-6, || format!("{label}, tolerance 1e-6"), || format!("{} (series)", sci(&s)), || format!("{} (quadrature)", sci(&q)));
            }
            (Err(e), _) | (_, Err(e)) => tally.error(label, &e),
        }
    }
    tally.finish(8, "quadrature cross-check", start)
}

pub fn partial_sum_integrals(opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new();
    let cases: Vec<(u32, f64)> = PARTIAL_SUM_N.iter().flat_map(|&n| PARTIAL_SUM_S.iter().map(move |&s| (n, s))).collect();
    let prec = opts.cfg.target_precision_bits + 64;
    let results = parallel_map(&cases, |&(n, s)| {
        let quad = partial_sum_integral_check(n, &Float::with_val(64, s), &opts.cfg).map(|r| r.value);
        let term = series_term_riemann(n as usize, &PrecisionComplex::from_f64(s, 0.0, prec), prec);
        (quad, term.re().clone())
    });
    for (index, ((n, s), (quad, term))) in cases.iter().zip(results).enumerate() {
        match quad {
            Ok(mut q) => {
                if opts.faulty(9) && index == 0 {
                    q = corrupt_float(q);
                }
                let err = Float::with_val(prec, &q - &term).abs().to_f64();
                tally.deviation(err);
                tally.check(err <= 1e-8, || format!("n={n} s={s}, tolerance 1e-8"), || format!("{} (S_n(s))", sci(&term)), || format!("{} (quadrature)", sci(&q)));
            }
            Err(e) => tally.error(format!("n={n} s={s}"), &e),
        }
    }
    tally.finish(9, "partial-sum integrals", start)
}
