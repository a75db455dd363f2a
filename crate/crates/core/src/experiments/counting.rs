// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! The counting anomaly: n marbles, each individually "in the box" with
//! weight w close to 1. Every marble is accessible in the box, yet the
//! degree of "all n in the box" is wⁿ, which falls without bound.

use serde::{Deserialize, Serialize};

use super::{finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext, Series, SeriesKind};
use crate::error::Result;
use crate::massdensity::{
    analyze, degree_of, degree_threshold_for, indeterminacy_report, DegreeProfile, Determinacy,
};
use crate::state::{BranchState, Determinate, MassObservablePartition, Region, State};

/// Default η of this scenario. A marble with in-box weight 0.99 has
/// ratio `√(0.01/0.99) ≈ 0.1005`, just above the generic 0.1.
pub(crate) const DEFAULT_COUNTING_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountingParams {
    pub marbles: u64,
    /// Weight of each marble's in-box branch.
    pub in_weight: f64,
    pub marble_mass: f64,
    /// Distance between the box and the out-of-box region.
    pub separation: f64,
}

impl Default for CountingParams {
    fn default() -> Self {
        Self {
            marbles: 100,
            in_weight: 0.99,
            marble_mass: 1.0,
            separation: 10.0,
        }
    }
}

impl CountingParams {
    fn validate(&self) -> Result<()> {
        require(self.marbles >= 1, || "need at least one marble".into())?;
        require(self.in_weight > 0.0 && self.in_weight <= 1.0, || {
            format!("in-box weight must lie in (0, 1], got {}", self.in_weight)
        })?;
        require(self.marble_mass > 0.0, || format!("marble mass must be positive, got {}", self.marble_mass))?;
        require(self.separation >= 1.0, || "separation must be at least one region width".into())
    }

    fn marble(&self) -> Result<BranchState> {
        BranchState::two_outcome(
            Region::new("in", 0.0, 1.0)?,
            Region::new("out", self.separation, 1.0)?,
            1,
            self.marble_mass,
            self.in_weight,
        )
    }
}

/// Degree profile of each marble over `{in, out}`.
pub fn counting_profiles(p: &CountingParams) -> Result<Vec<DegreeProfile>> {
    p.validate()?;
    let marble = State::Branch(p.marble()?);
    let partition = MassObservablePartition {
        name: "box".into(),
        determinates: vec![
            Determinate {
                label: "in".into(),
                cells: vec![0],
            },
            Determinate {
                label: "out".into(),
                cells: vec![1],
            },
        ],
    };
    let profile = degree_of(&marble, &partition)?;
    Ok(vec![profile; p.marbles as usize])
}

pub fn run_counting_anomaly(p: &CountingParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::CountingAnomaly;
    let eta = ctx.threshold_for(name)?;
    let profiles = counting_profiles(p)?;
    let n = p.marbles;
    let field = analyze(&State::Branch(p.marble()?), eta)?;
    let in_idx = field.index_of("in").expect("marble has an in region");

    // Joint degree of "first k marbles in the box", k = 1..n.
    let mut joint = Vec::with_capacity(n as usize);
    let mut acc = 1.0;
    let mut accessible = 0u64;
    let mut effectively_determinate = 0u64;
    let eta_d = degree_threshold_for(eta);
    for profile in &profiles {
        acc *= profile.degree("in").unwrap_or(0.0);
        joint.push(acc);
        if field.accessible[in_idx] {
            accessible += 1;
        }
        let verdict = indeterminacy_report(profile, eta_d).classification;
        if matches!(verdict, Determinacy::EffectivelyDeterminate | Determinacy::Determinate) {
            effectively_determinate += 1;
        }
    }
    let all_in = *joint.last().expect("at least one marble");
    let expected = p.in_weight.powi(n as i32);
    let decreasing = joint.windows(2).all(|w| w[1] < w[0]);

    let mut r = ReportBuilder::default();
    r.measure("joint_all_in", all_in);
    r.measure("joint_expected", expected);
    r.expect("joint_error", (all_in - expected).abs(), Comparator::Le, 1e-12, 0.0);
    r.expect("accessible_count", accessible as f64, Comparator::AbsEq, n as f64, 0.0);
    r.measure("effectively_determinate_count", effectively_determinate as f64);
    if let Some(ratio) = field.ratio[in_idx] {
        r.measure("marble_ratio", ratio);
    }
    let critical = ((1.0 - p.in_weight) / p.in_weight).sqrt();
    r.measure("critical_threshold", critical);
    if p.in_weight < 1.0 && n > 1 {
        r.expect_flag("joint_strictly_decreasing", decreasing, true);
    }
    if eta <= critical {
        r.warn(format!(
            "threshold {eta} does not exceed the marble ratio {critical:.6}; no marble is accessible"
        ));
    }
    let conservation = (field.integrated_mass() - p.marble_mass).abs() / p.marble_mass;
    r.expect("mass_conservation_error", conservation, Comparator::Le, 1e-9, 0.0);

    r.series(Series {
        name: "joint_degree".into(),
        kind: SeriesKind::Line,
        x_label: "marbles".into(),
        y_label: "degree all in".into(),
        x: (1..=n).map(|k| k as f64).collect(),
        y: joint,
    });
    r.detail("marble_profile", &profiles[0])?;
    r.detail("marble_field", &field)?;
    finish(r, name, p, ctx, eta, 1.0)
}
