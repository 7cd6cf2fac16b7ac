use thiserror::Error;

use crate::series::SeriesResult;

/// Errors raised by the exact engine, the series engines and the quadrature oracle.
#[derive(Debug, Error)]
pub enum Error {
    /// An integer index outside the range an explicit formula is stated for.
    #[error("invalid index for {op}: {reason}")]
    InvalidIndex { op: &'static str, reason: String },

    /// An argument outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at the pole of zeta.
    #[error("pole: {0} has a pole at this argument")]
    Pole(&'static str),

    /// The stopping rule was not met within the term budget. The partial
    /// result is attached with `converged == false`.
    #[error("term budget exhausted after {} terms (estimate {})", .0.terms_used, .0.truncation_estimate.to_f64())]
    BudgetExhausted(Box<SeriesResult>),

    /// Adaptive quadrature failed to reach the tolerance.
    #[error("quadrature did not converge (last error estimate {estimate:e})")]
    QuadratureNonConvergence { estimate: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// The requested index exceeds the configured safety cap.
    #[error("k = {k} exceeds the safety cap {cap} (raise it with --cap)")]
    CapExceeded { k: u64, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
