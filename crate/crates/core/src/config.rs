use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the working precision is derived from the target and the term budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuardPolicy {
    /// `target + max_terms + extra` bits. An alternating binomial sum of `n`
    /// terms can cancel up to `n` bits, so the guard grows with the budget.
    Linear { extra: u32 },
    /// `target + extra` bits regardless of the budget.
    Fixed { extra: u32 },
}

impl Default for GuardPolicy {
    fn default() -> Self {
        GuardPolicy::Linear { extra: 64 }
    }
}

/// Precision, budget and tolerance for every inexact evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub target_precision_bits: u32,
    pub max_terms: usize,
    pub relative_tolerance: f64,
    pub guard_policy: GuardPolicy,
    /// Leading Dirichlet terms `(m+x)^{-s}`, `m < direct_terms`, summed
    /// directly before the globally convergent series takes over at
    /// `x + direct_terms`. With `0` the engines sum the series at `x` itself,
    /// which converges only like `1/N` away from non-positive integers.
    pub direct_terms: u32,
}

impl EvalConfig {
    pub const DEFAULT_PRECISION_BITS: u32 = 256;
    pub const DEFAULT_MAX_TERMS: usize = 2000;
    pub const DEFAULT_DIRECT_TERMS: u32 = 64;

    /// `2^-160`.
    pub fn default_tolerance() -> f64 {
        2f64.powi(-160)
    }

    pub fn new(target_precision_bits: u32, max_terms: usize, relative_tolerance: f64) -> Result<Self> {
        let cfg = EvalConfig {
            target_precision_bits,
            max_terms,
            relative_tolerance,
            ..EvalConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_direct_terms(mut self, direct_terms: u32) -> Self {
        self.direct_terms = direct_terms;
        self
    }

    pub fn with_guard_policy(mut self, policy: GuardPolicy) -> Self {
        self.guard_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_precision_bits < 53 {
            return Err(Error::Config(format!(
                "target precision {} bits is below the 53-bit minimum",
                self.target_precision_bits
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance < 1.0) {
            return Err(Error::Config(format!(
                "relative tolerance {} must lie in (0, 1)",
                self.relative_tolerance
            )));
        }
        Ok(())
    }

    /// Bits used for the series summation.
    pub fn working_precision(&self) -> u32 {
        match self.guard_policy {
            GuardPolicy::Linear { extra } => {
                let budget = u32::try_from(self.max_terms).unwrap_or(u32::MAX);
                self.target_precision_bits.saturating_add(budget).saturating_add(extra)
            }
            GuardPolicy::Fixed { extra } => self.target_precision_bits.saturating_add(extra),
        }
    }

    /// Bits used by the quadrature oracle, which has no alternating sums.
    pub fn quadrature_precision(&self) -> u32 {
        self.target_precision_bits + 64
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            target_precision_bits: Self::DEFAULT_PRECISION_BITS,
            max_terms: Self::DEFAULT_MAX_TERMS,
            relative_tolerance: Self::default_tolerance(),
            guard_policy: GuardPolicy::default(),
            direct_terms: Self::DEFAULT_DIRECT_TERMS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = EvalConfig::default();
        assert_eq!(cfg.target_precision_bits, 256);
        assert_eq!(cfg.max_terms, 2000);
        assert_eq!(cfg.relative_tolerance, 2f64.powi(-160));
        assert_eq!(cfg.working_precision(), 256 + 2000 + 64);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(EvalConfig::new(52, 10, 1e-10).is_err());
        assert!(EvalConfig::new(64, 0, 1e-10).is_err());
        assert!(EvalConfig::new(64, 10, 0.0).is_err());
        assert!(EvalConfig::new(64, 10, 1.0).is_err());
        assert!(EvalConfig::new(64, 10, f64::NAN).is_err());
        assert!(EvalConfig::new(53, 1, 0.5).is_ok());
    }

    #[test]
    fn fixed_guard() {
        let cfg = EvalConfig::default().with_guard_policy(GuardPolicy::Fixed { extra: 32 });
        assert_eq!(cfg.working_precision(), 288);
    }
}
