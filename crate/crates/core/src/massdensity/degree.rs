// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Degree-valued property ascription.
//!
//! A state has the determinate `v` of a determinable to the degree given
//! by the squared norm of its projection onto the eigenspace "all of the
//! system's mass lies in `v`'s cells". For multi-particle states some
//! configurations straddle several determinates; their weight is reported
//! under the extra label [`SPLIT_LABEL`] so that degrees still sum to one.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::{BranchState, MassObservablePartition, State, WaveFunction};

pub const SPLIT_LABEL: &str = "split";

const DETERMINATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub label: String,
    pub degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub determinable: String,
    pub entries: Vec<DegreeEntry>,
}

impl DegreeProfile {
    pub fn new(determinable: impl Into<String>, entries: Vec<(String, f64)>) -> Self {
        Self {
            determinable: determinable.into(),
            entries: entries
                .into_iter()
                .map(|(label, degree)| DegreeEntry { label, degree })
                .collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.degree).sum()
    }

    pub fn degree(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.degree)
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.degree).collect()
    }
}

pub fn degree_of(state: &State, partition: &MassObservablePartition) -> Result<DegreeProfile> {
    match state {
        State::WaveFunction(wf) => wave_degrees(wf, partition),
        State::Branch(bs) => branch_degrees(bs, partition),
    }
}

fn finish(partition: &MassObservablePartition, mut acc: Vec<f64>, split: Option<f64>) -> DegreeProfile {
    if let Some(s) = split {
        acc.push(s);
    }
    let total: f64 = acc.iter().sum();
    let mut labels: Vec<String> = partition
        .determinates
        .iter()
        .map(|d| d.label.clone())
        .collect();
    if split.is_some() {
        labels.push(SPLIT_LABEL.to_string());
    }
    DegreeProfile::new(
        partition.name.clone(),
        labels.into_iter().zip(acc.into_iter().map(|d| d / total)).collect(),
    )
}

fn wave_degrees(wf: &WaveFunction, partition: &MassObservablePartition) -> Result<DegreeProfile> {
    let cells = wf.grid().cell_count();
    partition.validate(cells)?;
    let owner = partition.owners(cells);
    let n = wf.particle_count();
    let mut acc = vec![0.0; partition.determinates.len()];
    let mut split = 0.0;
    for (idx, p) in wf.probabilities().into_iter().enumerate() {
        let first = owner[wf.cell_of_particle(idx, 0)];
        if (1..n).all(|k| owner[wf.cell_of_particle(idx, k)] == first) {
            acc[first] += p;
        } else {
            split += p;
        }
    }
    Ok(finish(partition, acc, (n > 1).then_some(split)))
}

fn branch_degrees(bs: &BranchState, partition: &MassObservablePartition) -> Result<DegreeProfile> {
    let regions = bs.regions().len();
    partition.validate(regions)?;
    let owner = partition.owners(regions);
    let mut acc = vec![0.0; partition.determinates.len()];
    let mut split = 0.0;
    for b in bs.branches() {
        let mut holders = b
            .occupancy
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(r, _)| owner[r]);
        let first = holders.next().expect("branch holds at least one particle");
        if holders.all(|d| d == first) {
            acc[first] += b.weight();
        } else {
            split += b.weight();
        }
    }
    Ok(finish(
        partition,
        acc,
        (bs.particle_count() > 1).then_some(split),
    ))
}

/// Kinds of determination. Only the first three are reachable through
/// degree ascription; the remaining two are labels for completeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Determinacy {
    Determinate,
    EffectivelyDeterminate,
    IndeterminateGluttyDegree,
    IndeterminateGappy,
    IndeterminateGluttyRelativized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub label: String,
    pub degree: f64,
    /// Nonzero degree: the component is part of what there is.
    pub present: bool,
    /// Degree above `1 − degree_threshold`.
    pub accessible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndeterminacyReport {
    pub determinable: String,
    pub classification: Determinacy,
    pub degree_threshold: f64,
    pub components: Vec<ComponentVerdict>,
}

/// Degree threshold equivalent to CAM threshold `eta` on two-outcome
/// states: a component of degree `d` has ratio `√((1−d)/d)`, which is
/// below `eta` iff `d > 1 − eta²/(1+eta²)`.
pub fn degree_threshold_for(eta: f64) -> f64 {
    let e2 = eta * eta;
    e2 / (1.0 + e2)
}

pub fn indeterminacy_report(profile: &DegreeProfile, degree_threshold: f64) -> IndeterminacyReport {
    let components: Vec<ComponentVerdict> = profile
        .entries
        .iter()
        .map(|e| ComponentVerdict {
            label: e.label.clone(),
            degree: e.degree,
            present: e.degree > 0.0,
            accessible: e.degree > 1.0 - degree_threshold,
        })
        .collect();
    let max = profile
        .entries
        .iter()
        .map(|e| e.degree)
        .fold(f64::NEG_INFINITY, f64::max);
    let at_one = profile
        .entries
        .iter()
        .filter(|e| (e.degree - 1.0).abs() <= DETERMINATE_TOLERANCE)
        .count();
    let classification = if at_one == 1 {
        Determinacy::Determinate
    } else if max > 1.0 - degree_threshold {
        Determinacy::EffectivelyDeterminate
    } else {
        Determinacy::IndeterminateGluttyDegree
    };
    IndeterminacyReport {
        determinable: profile.determinable.clone(),
        classification,
        degree_threshold,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ParticleSpec, Region, SpatialGrid};
    use approx::assert_abs_diff_eq;

    fn marble(p: f64) -> BranchState {
        BranchState::two_outcome(
            Region::new("in", 0.0, 1.0).unwrap(),
            Region::new("out", 10.0, 1.0).unwrap(),
            1,
            1.0,
            p,
        )
        .unwrap()
    }

    fn in_out() -> MassObservablePartition {
        MassObservablePartition::new(
            "location",
            vec![("in".into(), vec![0]), ("out".into(), vec![1])],
        )
    }

    #[test]
    fn marble_degrees() {
        let prof = degree_of(&marble(0.99).into(), &in_out()).unwrap();
        assert_abs_diff_eq!(prof.degree("in").unwrap(), 0.99, epsilon = 1e-12);
        assert_abs_diff_eq!(prof.degree("out").unwrap(), 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(prof.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn classification_taxonomy() {
        let det = DegreeProfile::new("x", vec![("a".into(), 1.0), ("b".into(), 0.0)]);
        assert_eq!(indeterminacy_report(&det, 0.05).classification, Determinacy::Determinate);

        let eff = DegreeProfile::new("x", vec![("a".into(), 0.99), ("b".into(), 0.01)]);
        let r = indeterminacy_report(&eff, 0.05);
        assert_eq!(r.classification, Determinacy::EffectivelyDeterminate);
        assert!(r.components[1].present && !r.components[1].accessible);
        assert!(r.components[0].accessible);

        let glut = DegreeProfile::new("x", vec![("a".into(), 0.5), ("b".into(), 0.5)]);
        assert_eq!(
            indeterminacy_report(&glut, 0.05).classification,
            Determinacy::IndeterminateGluttyDegree
        );
    }

    #[test]
    fn degree_threshold_agrees_with_cam_on_two_outcomes() {
        for &eta in &[0.05, 0.1, 0.3, 0.5] {
            let dt = degree_threshold_for(eta);
            let p = 1.0 - dt;
            let ratio = ((1.0 - p) / p).sqrt();
            assert_abs_diff_eq!(ratio, eta, epsilon = 1e-12);
        }
    }

    #[test]
    fn split_configurations_are_reported() {
        let a = Region::new("A", -5.0, 1.0).unwrap();
        let b = Region::new("B", 5.0, 1.0).unwrap();
        let times = BranchState::split_product(a, b, 10, 1.0).unwrap();
        let part = MassObservablePartition::new("where", vec![("A".into(), vec![0]), ("B".into(), vec![1])]);
        let prof = degree_of(&times.into(), &part).unwrap();
        assert_eq!(prof.degree(SPLIT_LABEL), Some(1.0));
        assert_eq!(prof.degree("A"), Some(0.0));
    }

    #[test]
    fn eigenstate_has_degree_one() {
        let g = SpatialGrid::new(6, 1.0, 0.0).unwrap();
        let wf = WaveFunction::cell_eigenstate(g, ParticleSpec::nucleon("p"), 4).unwrap();
        let prof = degree_of(&wf.into(), &MassObservablePartition::per_cell("x", 6)).unwrap();
        assert_eq!(prof.degrees(), vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn non_exhaustive_partition_errors() {
        let part = MassObservablePartition::new("location", vec![("in".into(), vec![0])]);
        assert!(matches!(
            degree_of(&marble(0.5).into(), &part),
            Err(crate::error::Error::Partition(_))
        ));
    }
}
