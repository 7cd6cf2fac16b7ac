//! Output records and their json / plain / csv renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::complex::PrecisionComplex;
use crate::verify::{Counterexample, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    BernoulliExact,
    BernoulliPolyExact,
    BernoulliComplex,
    Zeta,
    HurwitzZeta,
    VerifyReport,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::BernoulliExact => "bernoulli_exact",
            Quantity::BernoulliPolyExact => "bernoulli_poly_exact",
            Quantity::BernoulliComplex => "bernoulli_complex",
            Quantity::Zeta => "zeta",
            Quantity::HurwitzZeta => "hurwitz_zeta",
            Quantity::VerifyReport => "verify_report",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_estimate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub working_precision_bits: Option<u32>,
    /// Values from the other formulas or engines, keyed by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternatives: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_evaluation: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub quantity: Quantity,
    pub inputs: BTreeMap<String, String>,
    pub value: String,
    pub metadata: Metadata,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Plain,
    Csv,
}

/// Digits justified by `bits` of target precision: `⌊bits·log₁₀2⌋ − 2`.
pub fn decimal_digits(bits: u32) -> usize {
    let digits = (f64::from(bits) * std::f64::consts::LOG10_2).floor() as usize;
    digits.saturating_sub(2).max(1)
}

pub fn format_real(x: &Float, bits: u32) -> String {
    x.to_string_radix(10, Some(decimal_digits(bits)))
}

/// `a+bi` / `a-bi`, or just `a` when `real_only`.
pub fn format_complex(z: &PrecisionComplex, bits: u32, real_only: bool) -> String {
    let re = format_real(z.re(), bits);
    if real_only {
        return re;
    }
    let im = Float::with_val(z.prec(), z.im().abs_ref());
    let sign = if z.im().is_sign_negative() { '-' } else { '+' };
    format!("{re}{sign}{}i", format_real(&im, bits))
}

/// Short scientific rendering of an error estimate.
pub fn format_estimate(x: &Float) -> String {
    x.to_string_radix(10, Some(6))
}

pub fn format_f64(x: f64) -> String {
    format!("{x:e}")
}

impl OutputRecord {
    pub fn new(quantity: Quantity, value: String) -> Self {
        OutputRecord { quantity, inputs: BTreeMap::new(), value, metadata: Metadata::default() }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.into(), value.to_string());
        self
    }

    pub fn from_suite(report: &SuiteReport) -> Self {
        let mut record = OutputRecord::new(Quantity::VerifyReport, if report.passed { "pass" } else { "fail" }.into())
            .input("suite", report.suite)
            .input("name", &report.name);
        record.metadata.checks = Some(report.checks);
        record.metadata.max_deviation = report.max_deviation.map(format_f64);
        record.metadata.counterexample = report.counterexample.clone();
        record.metadata.elapsed_ms = Some(report.elapsed_ms);
        record
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    fn inputs_inline(&self) -> String {
        self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }

    fn plain(&self, out: &mut String) {
        match self.quantity {
            Quantity::VerifyReport => {
                let name = self.inputs.get("name").map_or("", String::as_str);
                let suite = self.inputs.get("suite").map_or("", String::as_str);
                let checks = self.metadata.checks.unwrap_or(0);
                let _ = write!(out, "suite {suite} {name}: {} ({checks} checks", self.value.to_uppercase());
                if let Some(d) = &self.metadata.max_deviation {
                    let _ = write!(out, ", max deviation {d}");
                }
                let _ = writeln!(out, ")");
                if let Some(c) = &self.metadata.counterexample {
                    let _ = writeln!(out, "  counterexample: {}", c.inputs);
                    let _ = writeln!(out, "    expected: {}", c.expected);
                    let _ = writeln!(out, "    actual:   {}", c.actual);
                }
            }
            _ => {
                let _ = writeln!(out, "{}", self.value);
                let m = &self.metadata;
                if let Some(alts) = &m.alternatives {
                    for (name, value) in alts {
                        let _ = writeln!(out, "  {name}: {value}");
                    }
                }
                let mut fields = Vec::new();
                if let Some(v) = &m.engine {
                    fields.push(format!("engine={v}"));
                }
                if let Some(v) = m.terms_used {
                    fields.push(format!("terms={v}"));
                }
                if let Some(v) = &m.truncation_estimate {
                    fields.push(format!("estimate={v}"));
                }
                if let Some(v) = m.working_precision_bits {
                    fields.push(format!("wp={v}"));
                }
                if let Some(v) = &m.max_deviation {
                    fields.push(format!("max_deviation={v}"));
                }
                if m.limit_evaluation == Some(true) {
                    fields.push("limit".into());
                }
                if let Some(v) = &m.verdict {
                    fields.push(format!("verdict={v}"));
                }
                if !fields.is_empty() {
                    let _ = writeln!(out, "  {}", fields.join(" "));
                }
            }
        }
    }

    fn csv_row(&self) -> Vec<String> {
        let m = &self.metadata;
        let opt = |v: Option<String>| v.unwrap_or_default();
        let alts = m.alternatives.as_ref().map(|a| a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"));
        let counterexample = m.counterexample.as_ref().map(|c| format!("{} | expected {} | actual {}", c.inputs, c.expected, c.actual));
        vec![
            self.quantity.as_str().into(),
            self.inputs_inline(),
            self.value.clone(),
            opt(m.engine.clone()),
            opt(m.terms_used.map(|v| v.to_string())),
            opt(m.truncation_estimate.clone()),
            opt(m.working_precision_bits.map(|v| v.to_string())),
            opt(m.verdict.clone()),
            opt(m.max_deviation.clone()),
            opt(alts),
            opt(m.checks.map(|v| v.to_string())),
            opt(counterexample),
        ]
    }
}

const CSV_HEADER: [&str; 12] = [
    "quantity",
    "inputs",
    "value",
    "engine",
    "terms_used",
    "truncation_estimate",
    "working_precision_bits",
    "verdict",
    "max_deviation",
    "alternatives",
    "checks",
    "counterexample",
];

/// Renders one record, or an array of records when `as_array`.
pub fn render(records: &[OutputRecord], format: Format, as_array: bool) -> String {
    match format {
        Format::Json => {
            let mut text = if as_array {
                serde_json::to_string_pretty(records).expect("records always serialize")
            } else {
                records.iter().map(OutputRecord::to_json).collect::<Vec<_>>().join("\n")
            };
            text.push('\n');
            text
        }
        Format::Plain => {
            let mut out = String::new();
            for r in records {
                r.plain(&mut out);
            }
            out
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(CSV_HEADER).expect("in-memory write");
            for r in records {
                writer.write_record(r.csv_row()).expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new(Quantity::Zeta, "1.6449".into()).input("s", "2").input("engine", "all");
        r.metadata.terms_used = Some(42);
        r.metadata.alternatives = Some(BTreeMap::from([("hasse".to_string(), "1.6449".to_string())]));
        r
    }

    #[test]
    fn digits_rule() {
        assert_eq!(decimal_digits(256), 75);
        assert_eq!(decimal_digits(53), 13);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let text = sample().to_json();
        let back: OutputRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let many = render(&[sample(), sample()], Format::Json, true);
        let back: Vec<OutputRecord> = serde_json::from_str(&many).unwrap();
        assert_eq!(render(&back, Format::Json, true), many);
    }

    #[test]
    fn csv_has_header_and_row() {
        let text = render(&[sample()], Format::Csv, false);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<_> = reader.records().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(&rows[0][0], "zeta");
        assert_eq!(&rows[0][1], "engine=all;s=2");
    }

    #[test]
    fn complex_formatting() {
        let z = PrecisionComplex::from_f64(0.5, -2.0, 64);
        assert_eq!(format_complex(&z, 64, false), "5.0000000000000000e-1-2.0000000000000000i");
        assert_eq!(format_complex(&z, 64, true), "5.0000000000000000e-1");
    }
}
