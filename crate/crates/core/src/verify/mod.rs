//! Runnable validation suite.
//!
//! Each check pins its tolerances in code, runs a deterministic seeded
//! computation and reports pass/fail plus the measured statistics. The
//! acceptance tests execute these checks at full budget; the CLI exposes
//! them behind `verify --suite ... --budget ...`.

mod averaging_checks;
mod fgn_checks;
mod integral_checks;
mod theorem_checks;

pub use averaging_checks::{averaged_coefficients, condition_decay, idempotence};
pub use fgn_checks::{
    covariance_law, generator_equivalence, hurst_recovery, increment_moments,
    long_range_dependence, self_similarity,
};
pub use integral_checks::{integral_coincidence, isometry_lemma, ou_oracle_refinement};
pub use theorem_checks::{null_coupling, theorem_mse_trend, theorem_prob_trend};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::integrator::IntegralKind;

/// Sample sizes for the statistical checks.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Ensemble size for path-law checks.
    pub ensemble_paths: usize,
    /// Replicates per epsilon in paired experiments.
    pub replicates: usize,
    /// Independent seeds for estimator-recovery checks.
    pub estimator_seeds: usize,
    /// Paths per refinement level in coincidence checks.
    pub coincidence_paths: usize,
}

impl Budget {
    /// The acceptance-grade budget.
    pub fn full() -> Self {
        Self {
            ensemble_paths: 5000,
            replicates: 2000,
            estimator_seeds: 100,
            coincidence_paths: 200,
        }
    }

    /// A fast smoke-test budget with looser statistical power.
    pub fn quick() -> Self {
        Self {
            ensemble_paths: 1000,
            replicates: 200,
            estimator_seeds: 25,
            coincidence_paths: 50,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: String,
    pub pass: bool,
    pub details: String,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckResult {
    pub(crate) fn new(suite: &str, name: &str) -> Self {
        Self {
            name: name.to_string(),
            suite: suite.to_string(),
            pass: true,
            details: String::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub(crate) fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub(crate) fn require(&mut self, condition: bool, description: &str) {
        if !condition {
            self.pass = false;
            if !self.details.is_empty() {
                self.details.push_str("; ");
            }
            self.details.push_str("FAILED: ");
            self.details.push_str(description);
        }
    }

    pub(crate) fn note(&mut self, text: &str) {
        if !self.details.is_empty() {
            self.details.push_str("; ");
        }
        self.details.push_str(text);
    }

    /// One-line `PASS`/`FAIL` summary for console output.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} :: {}{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            if self.details.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.details)
            }
        )
    }
}

/// Path-law checks.
pub fn fgn_suite(budget: &Budget, full: bool) -> Result<Vec<CheckResult>> {
    let mut out = vec![
        covariance_law(budget)?,
        increment_moments(budget)?,
        long_range_dependence()?,
        hurst_recovery(budget)?,
    ];
    if full {
        out.push(generator_equivalence(budget)?);
        out.push(self_similarity(budget)?);
    }
    Ok(out)
}

/// Pathwise-integration checks.
pub fn integrals_suite(budget: &Budget) -> Result<Vec<CheckResult>> {
    Ok(vec![
        isometry_lemma(budget)?,
        integral_coincidence(budget)?,
        ou_oracle_refinement(budget)?,
    ])
}

/// Averaged-coefficient checks.
pub fn averaging_suite() -> Result<Vec<CheckResult>> {
    Ok(vec![
        averaged_coefficients()?,
        idempotence()?,
        condition_decay()?,
    ])
}

/// Convergence-trend checks for the paired experiments. At full scope the
/// trend checks run under all three integral kinds; otherwise symmetric only.
pub fn theorems_suite(budget: &Budget, full: bool) -> Result<Vec<CheckResult>> {
    let kinds: &[IntegralKind] = if full {
        &IntegralKind::ALL
    } else {
        &[IntegralKind::Symmetric]
    };
    let mut out = Vec::new();
    for &kind in kinds {
        out.push(theorem_mse_trend(budget, kind)?);
        out.push(theorem_prob_trend(budget, kind)?);
    }
    out.push(null_coupling()?);
    Ok(out)
}

/// Every suite back to back.
pub fn all_suites(budget: &Budget, full: bool) -> Result<Vec<CheckResult>> {
    let mut out = fgn_suite(budget, full)?;
    out.extend(integrals_suite(budget)?);
    out.extend(averaging_suite()?);
    out.extend(theorems_suite(budget, full)?);
    Ok(out)
}
