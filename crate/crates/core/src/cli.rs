//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;

use crate::complex::PrecisionComplex;
use crate::config::EvalConfig;
use crate::error::Error;
use crate::exact::{
    bernoulli_formula_a, bernoulli_formula_b, bernoulli_poly, bernoulli_poly_oracle, bernoulli_recurrence_oracle,
    bernoulli_worpitzky,
};
use crate::output::{format_complex, format_estimate, format_f64, format_real, render, Format, OutputRecord, Quantity};
use crate::quadrature::{zeta_by_quadrature, Variant};
use crate::rational::ExactRational;
use crate::series::{
    bernoulli_complex, bernoulli_poly_complex, riemann_zeta, riemann_zeta_hasse, zeta_by_series, SeriesKind, SeriesResult,
};
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_POLE: i32 = 4;
pub const EXIT_NONCONVERGENCE: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

const EXIT_TABLE: &str = "\
Exit codes:
  0  success
  2  usage error, malformed number or invalid configuration
  3  domain error, invalid index or k above the safety cap
  4  pole (zeta at s = 1)
  5  series budget exhausted or quadrature did not converge
  6  verification failure or formulas/engines disagree";

#[derive(Debug, Parser)]
#[command(name = "bernzeta", version, about = "Exact Bernoulli numbers and globally convergent zeta series", after_help = EXIT_TABLE)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Target precision in bits.
    #[arg(long, global = true, default_value_t = EvalConfig::DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    /// Series term budget.
    #[arg(long, global = true, default_value_t = EvalConfig::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Relative tolerance of the stopping rules [default: 2^-160].
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Dirichlet terms summed directly before the series takes over.
    #[arg(long, global = true, default_value_t = EvalConfig::DEFAULT_DIRECT_TERMS)]
    pub direct_terms: u32,
    /// Largest k accepted by the exact commands.
    #[arg(long, global = true, default_value_t = 5000)]
    pub cap: u32,
    /// Zeta engine for `zeta` and `hurwitz`.
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Bernoulli number B_k.
    Bern {
        k: u32,
        #[arg(long, value_enum, default_value_t = Formula::All)]
        formula: Formula,
    },
    /// Exact Bernoulli polynomial B_k(x) at a rational x ("p/q").
    Poly {
        k: u32,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Complex-order Bernoulli number B_s = s zeta(1-s), or with --x the
    /// polynomial B_s(1-x) = s zeta(1-s, x).
    Bcomplex {
        #[arg(allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Riemann zeta at a complex s ("a+bi").
    Zeta {
        #[arg(allow_hyphen_values = true)]
        s: String,
    },
    /// Hurwitz zeta at complex s and rational 0 < x <= 1.
    Hurwitz {
        #[arg(allow_hyphen_values = true)]
        s: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Run the cross-engine verification suites 1-9.
    Verify {
        #[arg(long, default_value_t = 50)]
        max_k: u32,
        /// Points per axis of the two-series grid.
        #[arg(long, default_value_t = 21)]
        grid_points: usize,
        /// Half-width of the square two-series grid around 0.
        #[arg(long, default_value_t = 5.0)]
        grid_radius: f64,
        /// Run only these suites.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<u8>,
        #[arg(long, hide = true)]
        inject_fault: Option<u8>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Worpitzky,
    A,
    B,
    Oracle,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Series,
    Hasse,
    Quadrature,
    All,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Series => "series",
            Engine::Hasse => "hasse",
            Engine::Quadrature => "quadrature",
            Engine::All => "all",
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Config(_) => EXIT_USAGE,
        Error::Domain(_) | Error::InvalidIndex { .. } | Error::CapExceeded { .. } => EXIT_DOMAIN,
        Error::Pole(_) => EXIT_POLE,
        Error::BudgetExhausted(_) | Error::QuadratureNonConvergence { .. } => EXIT_NONCONVERGENCE,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stderr: text, code, ..Outcome::default() }
            } else {
                Outcome { stdout: text, code, ..Outcome::default() }
            };
        }
    };
    match execute(&cli) {
        Ok((records, as_array, code)) => {
            let mut outcome = Outcome { stdout: render(&records, cli.global.format, as_array), code, ..Outcome::default() };
            if code == EXIT_VERIFY {
                outcome.stderr = "verification failed\n".into();
            }
            outcome
        }
        Err(e) => Outcome { stderr: format!("error: {e}\n"), code: exit_code(&e), ..Outcome::default() },
    }
}

fn config(g: &GlobalArgs) -> Result<EvalConfig, Error> {
    let tolerance = g.tolerance.unwrap_or_else(EvalConfig::default_tolerance);
    Ok(EvalConfig::new(g.precision_bits, g.max_terms, tolerance)?.with_direct_terms(g.direct_terms))
}

fn check_cap(k: u32, cap: u32) -> Result<(), Error> {
    if k > cap {
        return Err(Error::CapExceeded { k: u64::from(k), cap: u64::from(cap) });
    }
    Ok(())
}

type Execution = (Vec<OutputRecord>, bool, i32);

fn execute(cli: &Cli) -> Result<Execution, Error> {
    let g = &cli.global;
    let cfg = config(g)?;
    match &cli.command {
        Command::Bern { k, formula } => {
            check_cap(*k, g.cap)?;
            cmd_bern_exact(*k, *formula).map(single)
        }
        Command::Poly { k, x } => {
            check_cap(*k, g.cap)?;
            let x: ExactRational = x.parse()?;
            cmd_bern_poly(*k, &x).map(single)
        }
        Command::Bcomplex { s, x } => cmd_bcomplex(s, x.as_deref(), &cfg).map(single),
        Command::Zeta { s } => cmd_zeta(s, None, g.engine.unwrap_or(Engine::Series), &cfg).map(single),
        Command::Hurwitz { s, x } => {
            let x: ExactRational = x.parse()?;
            cmd_zeta(s, Some(&x), g.engine.unwrap_or(Engine::Series), &cfg).map(single)
        }
        Command::Verify { max_k, grid_points, grid_radius, suite, inject_fault } => {
            check_cap(*max_k, g.cap)?;
            let opts = VerifyOptions {
                max_k: *max_k,
                grid_points: *grid_points,
                grid_radius: *grid_radius,
                cfg,
                fault: *inject_fault,
            };
            let (records, code) = cmd_verify(&opts, suite)?;
            Ok((records, true, code))
        }
    }
}

fn single((record, code): (OutputRecord, i32)) -> Execution {
    (vec![record], false, code)
}

fn verdict(values: &[String]) -> (&'static str, i32) {
    if values.windows(2).all(|w| w[0] == w[1]) {
        ("agree", EXIT_OK)
    } else {
        ("disagree", EXIT_VERIFY)
    }
}

/// One record per suite; exit code 0 iff every suite passes.
pub fn cmd_verify(opts: &VerifyOptions, suites: &[u8]) -> Result<(Vec<OutputRecord>, i32), Error> {
    if let Some(bad) = suites.iter().find(|s| !(1..=verify::SUITE_COUNT).contains(*s)) {
        return Err(Error::Config(format!("no suite {bad}")));
    }
    let reports = verify::run(opts, suites)?;
    let passed = reports.iter().all(|r| r.passed);
    let records = reports.iter().map(OutputRecord::from_suite).collect();
    Ok((records, if passed { EXIT_OK } else { EXIT_VERIFY }))
}

pub fn cmd_bern_exact(k: u32, formula: Formula) -> Result<(OutputRecord, i32), Error> {
    let eval = |f: Formula| -> Result<ExactRational, Error> {
        match f {
            Formula::Worpitzky => bernoulli_worpitzky(k),
            Formula::A => bernoulli_formula_a(k),
            Formula::B => bernoulli_formula_b(k),
            Formula::Oracle | Formula::All => Ok(bernoulli_recurrence_oracle(k)),
        }
    };
    let name = |f: Formula| f.to_possible_value().expect("no skipped variants").get_name().to_string();
    if formula != Formula::All {
        let value = eval(formula)?;
        let mut record = OutputRecord::new(Quantity::BernoulliExact, value.to_string()).input("k", k).input("formula", name(formula));
        record.metadata.engine = Some(name(formula));
        return Ok((record, EXIT_OK));
    }
    // The difference formulas a and Worpitzky start at k = 1.
    let mut chosen = vec![Formula::B, Formula::Oracle];
    if k >= 1 {
        chosen.splice(0..0, [Formula::Worpitzky, Formula::A]);
    }
    let mut alternatives = BTreeMap::new();
    let mut values = Vec::new();
    for f in chosen {
        let v = eval(f)?.to_string();
        alternatives.insert(name(f), v.clone());
        values.push(v);
    }
    let (verdict, code) = verdict(&values);
    let mut record = OutputRecord::new(Quantity::BernoulliExact, bernoulli_recurrence_oracle(k).to_string())
        .input("k", k)
        .input("formula", "all");
    record.metadata.alternatives = Some(alternatives);
    record.metadata.verdict = Some(verdict.into());
    Ok((record, code))
}

pub fn cmd_bern_poly(k: u32, x: &ExactRational) -> Result<(OutputRecord, i32), Error> {
    let explicit = bernoulli_poly(k, x)?.to_string();
    let oracle = bernoulli_poly_oracle(k, x).to_string();
    let (verdict, code) = verdict(&[explicit.clone(), oracle.clone()]);
    let mut record = OutputRecord::new(Quantity::BernoulliPolyExact, explicit.clone()).input("k", k).input("x", x);
    record.metadata.alternatives = Some(BTreeMap::from([("explicit".to_string(), explicit), ("oracle".to_string(), oracle)]));
    record.metadata.verdict = Some(verdict.into());
    Ok((record, code))
}

fn series_metadata(record: &mut OutputRecord, r: &SeriesResult, engine: &str) {
    record.metadata.engine = Some(engine.into());
    record.metadata.terms_used = Some(r.terms_used);
    record.metadata.truncation_estimate = Some(format_estimate(&r.truncation_estimate));
    record.metadata.working_precision_bits = Some(r.working_precision_bits);
}

pub fn cmd_bcomplex(s_text: &str, x_text: Option<&str>, cfg: &EvalConfig) -> Result<(OutputRecord, i32), Error> {
    let wp = cfg.working_precision();
    let s = PrecisionComplex::parse(s_text, wp)?;
    let bits = cfg.target_precision_bits;
    let (result, mut record) = match x_text {
        None => (bernoulli_complex(&s, cfg)?, OutputRecord::new(Quantity::BernoulliComplex, String::new()).input("s", s_text)),
        Some(text) => {
            let x: ExactRational = text.parse()?;
            let result = bernoulli_poly_complex(&s, &x.to_float(wp), cfg)?;
            (result, OutputRecord::new(Quantity::BernoulliComplex, String::new()).input("s", s_text).input("x", &x))
        }
    };
    record.value = format_complex(&result.value, bits, s.is_real());
    if let Some(series) = &result.series {
        series_metadata(&mut record, series, "series");
        record.metadata.truncation_estimate = Some(format_estimate(&result.truncation_estimate(&s)));
    }
    record.metadata.limit_evaluation = Some(result.limit_evaluation);
    Ok((record, EXIT_OK))
}

/// ζ(s) when `x` is `None`, else ζ(s, x).
pub fn cmd_zeta(s_text: &str, x: Option<&ExactRational>, engine: Engine, cfg: &EvalConfig) -> Result<(OutputRecord, i32), Error> {
    let wp = cfg.working_precision();
    let bits = cfg.target_precision_bits;
    let s = PrecisionComplex::parse(s_text, wp)?;
    let real_input = s.is_real();
    let x_float = x.map(|x| x.to_float(wp));
    let quantity = if x.is_some() { Quantity::HurwitzZeta } else { Quantity::Zeta };
    let mut record = OutputRecord::new(quantity, String::new()).input("s", s_text).input("engine", engine.name());
    if let Some(x) = x {
        record = record.input("x", x);
    }

    let series = |kind: SeriesKind| -> Result<SeriesResult, Error> {
        match (&x_float, kind) {
            (None, SeriesKind::Ser) => riemann_zeta(&s, cfg),
            (None, SeriesKind::Hasse) => riemann_zeta_hasse(&s, cfg),
            (Some(xf), kind) => zeta_by_series(&s, xf, kind, cfg),
        }
    };
    let quadrature = || -> Result<Float, Error> {
        if !real_input || *s.re() <= 0 {
            return Err(Error::Domain("the quadrature engine needs real s > 0".into()));
        }
        let variant = match x {
            Some(x) => Variant::Hurwitz(x.clone()),
            None => Variant::Riemann,
        };
        zeta_by_quadrature(s.re(), &variant, cfg).map(|r| r.value)
    };

    match engine {
        Engine::Series | Engine::Hasse => {
            let kind = if engine == Engine::Series { SeriesKind::Ser } else { SeriesKind::Hasse };
            let r = series(kind)?;
            record.value = format_complex(&r.value, bits, real_input);
            series_metadata(&mut record, &r, engine.name());
            Ok((record, EXIT_OK))
        }
        Engine::Quadrature => {
            let v = quadrature()?;
            record.value = format_real(&v, bits);
            record.metadata.engine = Some("quadrature".into());
            record.metadata.working_precision_bits = Some(cfg.quadrature_precision());
            Ok((record, EXIT_OK))
        }
        Engine::All => {
            if s.as_integer() == Some(1) {
                return Err(Error::Pole("zeta"));
            }
            let ser = series(SeriesKind::Ser)?;
            let hasse = series(SeriesKind::Hasse)?;
            let mut values: Vec<(&str, PrecisionComplex)> = vec![("series", ser.value.clone()), ("hasse", hasse.value.clone())];
            if real_input && *s.re() > 0 {
                let q = quadrature()?;
                values.push(("quadrature", PrecisionComplex::real(&q, bits)));
            }
            let mut deviation = 0f64;
            for (i, a) in values.iter().enumerate() {
                for b in &values[i + 1..] {
                    deviation = deviation.max((&a.1 - &b.1).abs().to_f64());
                }
            }
            record.value = format_complex(&ser.value, bits, real_input);
            series_metadata(&mut record, &ser, "series");
            record.metadata.alternatives =
                Some(values.iter().map(|(name, v)| (name.to_string(), format_complex(v, bits, real_input))).collect());
            record.metadata.max_deviation = Some(format_f64(deviation));
            Ok((record, EXIT_OK))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("bernzeta").chain(args.iter().copied()))
    }

    #[test]
    fn bern_all_agrees() {
        let out = run_args(&["bern", "6"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.starts_with("1/42\n"));
        assert!(out.stdout.contains("verdict=agree"));
    }

    #[test]
    fn bern_zero_and_one() {
        assert_eq!(run_args(&["bern", "0", "--formula", "b"]).stdout, "1\n  engine=b\n");
        assert_eq!(run_args(&["bern", "1", "--formula", "worpitzky"]).stdout.lines().next(), Some("-1/2"));
        assert_eq!(run_args(&["bern", "0", "--formula", "a"]).code, EXIT_DOMAIN);
        assert_eq!(run_args(&["bern", "6000"]).code, EXIT_DOMAIN);
        assert_eq!(run_args(&["bern", "x"]).code, EXIT_USAGE);
    }

    #[test]
    fn poly_examples() {
        for (k, x, v) in [("2", "1/2", "-1/12"), ("1", "1/2", "0"), ("3", "0", "0"), ("2", "-1/3", "11/18")] {
            let out = run_args(&["poly", k, x]);
            assert_eq!(out.code, 0);
            assert_eq!(out.stdout.lines().next(), Some(v));
            assert!(out.stdout.contains("verdict=agree"));
        }
        assert_eq!(run_args(&["poly", "2", "1/0"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["poly", "2", "0.5"]).code, EXIT_USAGE);
    }

    #[test]
    fn zeta_errors() {
        let fast = ["--precision-bits", "64", "--max-terms", "300"];
        let with = |rest: &[&str]| -> Vec<String> { fast.iter().chain(rest).map(|s| s.to_string()).collect() };
        let args = with(&["zeta", "1"]);
        assert_eq!(run_args(&args.iter().map(String::as_str).collect::<Vec<_>>()).code, EXIT_POLE);
        let args = with(&["--engine", "quadrature", "zeta", "-1"]);
        assert_eq!(run_args(&args.iter().map(String::as_str).collect::<Vec<_>>()).code, EXIT_DOMAIN);
        let args = with(&["zeta", "1+"]);
        assert_eq!(run_args(&args.iter().map(String::as_str).collect::<Vec<_>>()).code, EXIT_USAGE);
        let out = run_args(&["--max-terms", "3", "--direct-terms", "0", "zeta", "2"]);
        assert_eq!(out.code, EXIT_NONCONVERGENCE);
    }

    #[test]
    fn zeta_minus_one() {
        let out = run_args(&["--precision-bits", "64", "zeta", "-1"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.starts_with("-8.3333333333333333e-2\n"), "{}", out.stdout);
    }

    #[test]
    fn help_lists_exit_codes() {
        let out = run_args(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("Exit codes:"));
    }
}
