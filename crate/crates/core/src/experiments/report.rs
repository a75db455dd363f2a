// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "grwm.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// `|measured − target| ≤ tolerance`
    AbsEq,
    /// `|measured − target| ≤ tolerance · |target|`
    RelEq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    fn symbol(self) -> &'static str {
        match self {
            Comparator::AbsEq => "≈",
            Comparator::RelEq => "≈rel",
            Comparator::Lt => "<",
            Comparator::Le => "≤",
            Comparator::Gt => ">",
            Comparator::Ge => "≥",
        }
    }

    pub fn holds(self, measured: f64, target: f64, tolerance: f64) -> bool {
        match self {
            Comparator::AbsEq => (measured - target).abs() <= tolerance,
            Comparator::RelEq => (measured - target).abs() <= tolerance * target.abs(),
            Comparator::Lt => measured < target,
            Comparator::Le => measured <= target + tolerance,
            Comparator::Gt => measured > target,
            Comparator::Ge => measured >= target - tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    pub comparator: Comparator,
    pub target: f64,
    #[serde(default)]
    pub tolerance: f64,
}

impl Check {
    pub fn new(quantity: &str, comparator: Comparator, target: f64, tolerance: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            comparator,
            target,
            tolerance,
        }
    }

    pub fn evaluate(&self, measured: &BTreeMap<String, f64>) -> CheckOutcome {
        let value = measured.get(&self.quantity).copied();
        CheckOutcome {
            check: self.clone(),
            measured: value,
            passed: value.is_some_and(|v| self.comparator.holds(v, self.target, self.tolerance)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    #[serde(flatten)]
    pub check: Check,
    /// `None` when the quantity was not measured (the check fails).
    pub measured: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Line,
    Bar,
    Histogram,
}

/// Named numeric series for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub kind: SeriesKind,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub parameter_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub name: String,
    /// Effective specification, defaults filled in.
    pub spec: serde_json::Value,
    pub threshold: f64,
    pub lambda_amplification: f64,
    pub measured: BTreeMap<String, f64>,
    #[serde(default)]
    pub details: serde_json::Value,
    #[serde(default)]
    pub series: Vec<Series>,
    pub checks: Vec<CheckOutcome>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub passed: bool,
    pub provenance: Provenance,
    /// Wall-clock stamp set by the command-line tool; not part of the
    /// reproducible content.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn measured(&self, key: &str) -> Result<f64> {
        self.measured
            .get(key)
            .copied()
            .ok_or_else(|| Error::Parameter(format!("report {} has no quantity {key}", self.name)))
    }

    /// Evaluates further checks against the measured quantities.
    pub fn apply_checks(&mut self, checks: &[Check]) {
        for c in checks {
            let outcome = c.evaluate(&self.measured);
            self.passed &= outcome.passed;
            self.checks.push(outcome);
        }
    }

    /// The report with the wall-clock stamp removed.
    pub fn without_timestamp(&self) -> Self {
        Self {
            timestamp: None,
            ..self.clone()
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Human-readable summary.
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.name);
        let _ = writeln!(s, "threshold (eta): {}", self.threshold);
        let _ = writeln!(s, "lambda amplification: {}", self.lambda_amplification);
        let _ = writeln!(
            s,
            "code version: {}  parameter hash: {}",
            self.provenance.code_version, self.provenance.parameter_hash
        );
        let _ = writeln!(s, "\nmeasured:");
        for (k, v) in &self.measured {
            let _ = writeln!(s, "  {k:<40} {v:.12e}");
        }
        let _ = writeln!(s, "\nchecks:");
        for c in &self.checks {
            let measured = c
                .measured
                .map(|v| format!("{v:.6e}"))
                .unwrap_or_else(|| "missing".into());
            let _ = writeln!(
                s,
                "  [{}] {} {} {} (tol {:e}) measured {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.check.quantity,
                c.check.comparator.symbol(),
                c.check.target,
                c.check.tolerance,
                measured
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        let _ = writeln!(s, "\nresult: {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

/// Accumulates measurements and checks for one experiment run.
#[derive(Debug, Default)]
pub(crate) struct ReportBuilder {
    measured: BTreeMap<String, f64>,
    checks: Vec<Check>,
    series: Vec<Series>,
    warnings: Vec<String>,
    details: serde_json::Map<String, serde_json::Value>,
}

impl ReportBuilder {
    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.measure(key, if value { 1.0 } else { 0.0 })
    }

    pub fn check(&mut self, quantity: &str, comparator: Comparator, target: f64, tolerance: f64) -> &mut Self {
        self.checks.push(Check::new(quantity, comparator, target, tolerance));
        self
    }

    /// Measures `key` and checks it equals `target` within `tolerance`.
    pub fn expect(&mut self, key: &str, value: f64, comparator: Comparator, target: f64, tolerance: f64) -> &mut Self {
        self.measure(key, value);
        self.check(key, comparator, target, tolerance)
    }

    pub fn expect_flag(&mut self, key: &str, value: bool, expected: bool) -> &mut Self {
        self.flag(key, value);
        self.check(key, Comparator::AbsEq, if expected { 1.0 } else { 0.0 }, 0.0)
    }

    pub fn series(&mut self, series: Series) -> &mut Self {
        self.series.push(series);
        self
    }

    pub fn warn(&mut self, warning: impl Into<String>) -> &mut Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn detail<T: Serialize>(&mut self, key: &str, value: &T) -> Result<&mut Self> {
        self.details.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(self)
    }

    pub fn finish<S: Serialize>(
        self,
        name: &str,
        spec: &S,
        threshold: f64,
        lambda_amplification: f64,
    ) -> Result<ExperimentReport> {
        let spec = serde_json::to_value(spec)?;
        let checks: Vec<CheckOutcome> = self
            .checks
            .iter()
            .map(|c| c.evaluate(&self.measured))
            .collect();
        let passed = checks.iter().all(|c| c.passed);
        Ok(ExperimentReport {
            schema_version: REPORT_SCHEMA.to_string(),
            name: name.to_string(),
            provenance: Provenance {
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                parameter_hash: crate::ensemble::content_hash(&spec),
            },
            spec,
            threshold,
            lambda_amplification,
            measured: self.measured,
            details: serde_json::Value::Object(self.details),
            series: self.series,
            checks,
            warnings: self.warnings,
            passed,
            timestamp: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparators() {
        assert!(Comparator::AbsEq.holds(1.0 + 1e-10, 1.0, 1e-9));
        assert!(!Comparator::AbsEq.holds(1.0 + 1e-8, 1.0, 1e-9));
        assert!(Comparator::RelEq.holds(500.0 + 1e-7, 500.0, 1e-9));
        assert!(Comparator::Lt.holds(0.5, 1.0, 0.0));
        assert!(!Comparator::Gt.holds(0.0, 0.0, 0.0));
    }

    #[test]
    fn missing_quantity_fails() {
        let c = Check::new("nope", Comparator::Gt, 0.0, 0.0);
        let o = c.evaluate(&BTreeMap::new());
        assert!(!o.passed);
        assert_eq!(o.measured, None);
    }
}
