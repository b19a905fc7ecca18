//! Named pass/fail diagnostics shared by the certificate, linear-algebra and
//! trajectory checks.

use serde::Serialize;

/// Outcome of a single named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The hypothesis of the checked statement does not hold, so nothing was asserted.
    PremiseNotMet,
    NotApplicable,
}

/// A measured quantity compared against a bound.
///
/// `margin` is oriented so that a nonnegative value means the bound holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, status: CheckStatus) -> Self {
        Self {
            name: name.into(),
            status,
            measured: None,
            bound: None,
            margin: None,
            detail: String::new(),
        }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, CheckStatus::Pass)
    }

    pub fn fail(name: impl Into<String>) -> Self {
        Self::new(name, CheckStatus::Fail)
    }

    /// Upper-bound comparison `measured <= bound + tol`.
    pub fn upper(name: impl Into<String>, measured: f64, bound: f64, tol: f64) -> Self {
        let margin = bound - measured;
        let status = if margin >= -tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name: name.into(),
            status,
            measured: Some(measured),
            bound: Some(bound),
            margin: Some(margin),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_measured(mut self, measured: f64) -> Self {
        self.measured = Some(measured);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// The first failing check in a list, if any.
pub fn first_failure(checks: &[CheckResult]) -> Option<&CheckResult> {
    checks.iter().find(|c| c.failed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_orientation() {
        let ok = CheckResult::upper("x", 1.0, 2.0, 0.0);
        assert!(ok.passed());
        assert_eq!(ok.margin, Some(1.0));
        let bad = CheckResult::upper("x", 2.0, 1.0, 0.5);
        assert!(bad.failed());
        let within_tol = CheckResult::upper("x", 1.0 + 1e-12, 1.0, 1e-10);
        assert!(within_tol.passed());
    }

    #[test]
    fn first_failure_skips_premise_checks() {
        let checks = vec![
            CheckResult::new("a", CheckStatus::PremiseNotMet),
            CheckResult::pass("b"),
            CheckResult::fail("c"),
        ];
        assert_eq!(first_failure(&checks).unwrap().name, "c");
    }
}
