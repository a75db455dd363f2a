// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Named scenarios with built-in pass/fail checks.
//!
//! Each scenario has a typed parameter struct with defaults, a runner
//! taking that struct and a [`RunContext`], and produces an
//! [`ExperimentReport`]. [`run`] dispatches an [`ExperimentSpec`], the
//! JSON form used by the command-line tool.

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::massdensity::DEFAULT_THRESHOLD;

mod born;
mod counting;
mod csl_collapse;
mod deflection;
mod rates;
mod report;
mod superposition;
mod sweep;
mod tails;

pub use born::{born_ensemble, run_born_statistics, BornParams};
pub use counting::{counting_profiles, run_counting_anomaly, CountingParams};
pub use csl_collapse::{run_csl_collapse, CslParams};
pub use deflection::{deflection_angle, run_deflection, DeflectionParams, PointSource};
pub use rates::{first_jump_ensemble, run_collapse_rate_scaling, RateScalingParams};
pub use report::{
    Check, CheckOutcome, Comparator, ExperimentReport, Provenance, Series, SeriesKind, REPORT_SCHEMA,
};
pub use superposition::{
    compare_superposition_product, cross_tier_deviation, run_superposition_vs_product, superposition_states,
    SuperpositionComparison, SuperpositionParams,
};
pub use sweep::{run_threshold_sweep, sweep_masks, SweepParams, SweepTable};
pub use tails::{run_tails_demo, tails_field, TailsOutcome, TailsParams};

pub(crate) use report::ReportBuilder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    SuperpositionVsProduct,
    TailsDemo,
    CountingAnomaly,
    ThresholdSweep,
    Deflection,
    CollapseRateScaling,
    BornStatistics,
    CslCollapse,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 8] = [
        ExperimentName::SuperpositionVsProduct,
        ExperimentName::TailsDemo,
        ExperimentName::CountingAnomaly,
        ExperimentName::ThresholdSweep,
        ExperimentName::Deflection,
        ExperimentName::CollapseRateScaling,
        ExperimentName::BornStatistics,
        ExperimentName::CslCollapse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::SuperpositionVsProduct => "superposition-vs-product",
            ExperimentName::TailsDemo => "tails-demo",
            ExperimentName::CountingAnomaly => "counting-anomaly",
            ExperimentName::ThresholdSweep => "threshold-sweep",
            ExperimentName::Deflection => "deflection",
            ExperimentName::CollapseRateScaling => "collapse-rate-scaling",
            ExperimentName::BornStatistics => "born-statistics",
            ExperimentName::CslCollapse => "csl-collapse",
        }
    }

    /// η used when none is given. The counting scenario sits above the
    /// marble ratio `√((1−w)/w) ≈ 0.1005` of its default `w = 0.99`.
    pub fn default_threshold(self) -> f64 {
        match self {
            ExperimentName::CountingAnomaly => counting::DEFAULT_COUNTING_THRESHOLD,
            _ => DEFAULT_THRESHOLD,
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Seed, threshold and thread count shared by all runners.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunContext {
    pub seed: u64,
    /// `None` selects the scenario's default.
    pub threshold: Option<f64>,
    /// Worker threads for ensembles; 0 = one per core. Never affects results.
    pub parallelism: usize,
}

impl RunContext {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }

    pub fn with_parallelism(mut self, threads: usize) -> Self {
        self.parallelism = threads;
        self
    }

    pub(crate) fn threshold_for(&self, name: ExperimentName) -> Result<f64> {
        let eta = self.threshold.unwrap_or_else(|| name.default_threshold());
        crate::massdensity::check_threshold(eta)?;
        Ok(eta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    /// Scenario parameters; omitted fields take their defaults.
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub parallelism: usize,
    /// Extra checks evaluated against the report's measured quantities.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected_checks: Vec<Check>,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName) -> Self {
        Self {
            name,
            params: serde_json::Value::Null,
            seed: 0,
            threshold: None,
            parallelism: 0,
            expected_checks: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn context(&self) -> RunContext {
        RunContext {
            seed: self.seed,
            threshold: self.threshold,
            parallelism: self.parallelism,
        }
    }

    fn params<P: DeserializeOwned + Default>(&self) -> Result<P> {
        match &self.params {
            serde_json::Value::Null => Ok(P::default()),
            v => serde_json::from_value(v.clone())
                .map_err(|e| Error::Parameter(format!("{} parameters: {e}", self.name))),
        }
    }
}

/// Runs a spec and evaluates its extra checks.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let ctx = spec.context();
    let mut report = match spec.name {
        ExperimentName::SuperpositionVsProduct => run_superposition_vs_product(&spec.params()?, &ctx),
        ExperimentName::TailsDemo => run_tails_demo(&spec.params()?, &ctx),
        ExperimentName::CountingAnomaly => run_counting_anomaly(&spec.params()?, &ctx),
        ExperimentName::ThresholdSweep => run_threshold_sweep(&spec.params()?, &ctx),
        ExperimentName::Deflection => run_deflection(&spec.params()?, &ctx),
        ExperimentName::CollapseRateScaling => run_collapse_rate_scaling(&spec.params()?, &ctx),
        ExperimentName::BornStatistics => run_born_statistics(&spec.params()?, &ctx),
        ExperimentName::CslCollapse => run_csl_collapse(&spec.params()?, &ctx),
    }?;
    report.apply_checks(&spec.expected_checks);
    Ok(report)
}

/// Finishes a report, echoing the effective spec (parameters with
/// defaults filled in, seed and threshold) for hashing.
pub(crate) fn finish<P: Serialize>(
    builder: ReportBuilder,
    name: ExperimentName,
    params: &P,
    ctx: &RunContext,
    threshold: f64,
    lambda_amplification: f64,
) -> Result<ExperimentReport> {
    #[derive(Serialize)]
    struct Echo<'a, P> {
        name: ExperimentName,
        params: &'a P,
        seed: u64,
        threshold: f64,
    }
    let echo = Echo {
        name,
        params,
        seed: ctx.seed,
        threshold,
    };
    builder.finish(name.as_str(), &echo, threshold, lambda_amplification)
}

/// Three-sigma half width of a binomial frequency around `p`.
pub(crate) fn binomial_tolerance(p: f64, n: u64) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}
