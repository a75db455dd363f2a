// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Macroscopic branch states: a weighted list of macroscopically distinct
//! occupancy configurations over a handful of named regions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named interval `[center - width/2, center + width/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub center: f64,
    pub width: f64,
}

impl Region {
    pub fn new(name: impl Into<String>, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() || !center.is_finite() {
            return Err(Error::Parameter(format!(
                "region needs finite center and positive width, got center {center}, width {width}"
            )));
        }
        Ok(Self {
            name: name.into(),
            center,
            width,
        })
    }

    pub fn lo(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    pub fn hi(&self) -> f64 {
        self.center + 0.5 * self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub amplitude: Complex64,
    /// Particle count per region, indexed like [`BranchState::regions`].
    pub occupancy: Vec<u64>,
}

impl Branch {
    pub fn weight(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// `N` identical-mass particles distributed over disjoint regions, in a
/// superposition of occupancy configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BranchStateDoc", into = "BranchStateDoc")]
pub struct BranchState {
    regions: Vec<Region>,
    particle_count: u64,
    particle_mass: f64,
    branches: Vec<Branch>,
}

#[derive(Serialize, Deserialize)]
struct BranchDoc {
    amplitude: (f64, f64),
    occupancy: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct BranchStateDoc {
    regions: Vec<Region>,
    particle_count: u64,
    particle_mass: f64,
    branches: Vec<BranchDoc>,
}

impl TryFrom<BranchStateDoc> for BranchState {
    type Error = Error;

    fn try_from(doc: BranchStateDoc) -> Result<Self> {
        let index: BTreeMap<&str, usize> = doc
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.as_str(), i))
            .collect();
        let mut branches = Vec::with_capacity(doc.branches.len());
        for b in &doc.branches {
            let mut occupancy = vec![0; doc.regions.len()];
            for (name, &count) in &b.occupancy {
                let i = index.get(name.as_str()).ok_or_else(|| {
                    Error::InvalidState(format!("branch refers to unknown region {name:?}"))
                })?;
                occupancy[*i] = count;
            }
            branches.push((Complex64::new(b.amplitude.0, b.amplitude.1), occupancy));
        }
        BranchState::new(doc.regions, doc.particle_count, doc.particle_mass, branches)
    }
}

impl From<BranchState> for BranchStateDoc {
    fn from(state: BranchState) -> Self {
        let branches = state
            .branches
            .iter()
            .map(|b| BranchDoc {
                amplitude: (b.amplitude.re, b.amplitude.im),
                occupancy: state
                    .regions
                    .iter()
                    .zip(&b.occupancy)
                    .map(|(r, &n)| (r.name.clone(), n))
                    .collect(),
            })
            .collect();
        BranchStateDoc {
            regions: state.regions,
            particle_count: state.particle_count,
            particle_mass: state.particle_mass,
            branches,
        }
    }
}

impl BranchState {
    /// Validates the region layout and occupancies and renormalizes the
    /// branch amplitudes so that the weights sum to one.
    pub fn new(
        regions: Vec<Region>,
        particle_count: u64,
        particle_mass: f64,
        branches: Vec<(Complex64, Vec<u64>)>,
    ) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidState("branch state needs at least one region".into()));
        }
        if particle_count == 0 {
            return Err(Error::InvalidState("branch state needs at least one particle".into()));
        }
        if !(particle_mass > 0.0) || !particle_mass.is_finite() {
            return Err(Error::Parameter(format!(
                "particle mass must be positive, got {particle_mass}"
            )));
        }
        let mut sorted: Vec<&Region> = regions.iter().collect();
        sorted.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        for pair in sorted.windows(2) {
            if pair[1].lo() < pair[0].hi() {
                return Err(Error::InvalidState(format!(
                    "regions {} and {} overlap",
                    pair[0].name, pair[1].name
                )));
            }
        }
        for (i, r) in regions.iter().enumerate() {
            if regions[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidState(format!("duplicate region name {}", r.name)));
            }
        }
        if branches.is_empty() {
            return Err(Error::InvalidState("branch state needs at least one branch".into()));
        }
        for (i, (amp, occ)) in branches.iter().enumerate() {
            if occ.len() != regions.len() {
                return Err(Error::InvalidState(format!(
                    "branch {i} has {} occupancies for {} regions",
                    occ.len(),
                    regions.len()
                )));
            }
            let total: u64 = occ.iter().sum();
            if total != particle_count {
                return Err(Error::InvalidState(format!(
                    "branch {i} places {total} particles, expected {particle_count}"
                )));
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::InvalidState(format!("branch {i} has non-finite amplitude")));
            }
            if branches[..i].iter().any(|(_, o)| o == occ) {
                return Err(Error::InvalidState(format!(
                    "branch {i} repeats an earlier occupancy; merge the amplitudes instead"
                )));
            }
        }
        let norm_sq: f64 = branches.iter().map(|(a, _)| a.norm_sqr()).sum();
        if !(norm_sq > 0.0) {
            return Err(Error::ZeroState("all branch amplitudes vanish".into()));
        }
        let scale = norm_sq.sqrt().recip();
        let branches = branches
            .into_iter()
            .map(|(amplitude, occupancy)| Branch {
                amplitude: amplitude * scale,
                occupancy,
            })
            .collect();
        Ok(Self {
            regions,
            particle_count,
            particle_mass,
            branches,
        })
    }

    /// `(|N in A⟩ + |N in B⟩)/√2`: all particles in one region or the other.
    pub fn equal_superposition(a: Region, b: Region, n: u64, mass: f64) -> Result<Self> {
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        Self::new(vec![a, b], n, mass, vec![(s, vec![n, 0]), (s, vec![0, n])])
    }

    /// `|N/2 in A⟩ ⊗ |N/2 in B⟩`.
    pub fn split_product(a: Region, b: Region, n: u64, mass: f64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::Parameter(format!("split product needs even N, got {n}")));
        }
        Self::new(
            vec![a, b],
            n,
            mass,
            vec![(Complex64::new(1.0, 0.0), vec![n / 2, n / 2])],
        )
    }

    /// Two branches: all `n` particles in `a` with weight `p`, otherwise in `b`.
    pub fn two_outcome(a: Region, b: Region, n: u64, mass: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!("branch weight must lie in [0, 1], got {p}")));
        }
        let mut branches = Vec::new();
        if p > 0.0 {
            branches.push((Complex64::new(p.sqrt(), 0.0), vec![n, 0]));
        }
        if p < 1.0 {
            branches.push((Complex64::new((1.0 - p).sqrt(), 0.0), vec![0, n]));
        }
        Self::new(vec![a, b], n, mass, branches)
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn particle_count(&self) -> u64 {
        self.particle_count
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.particle_count as f64 * self.particle_mass
    }

    pub fn weights(&self) -> Vec<f64> {
        self.branches.iter().map(Branch::weight).collect()
    }

    pub fn region_index(&self, name: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.name == name)
    }

    /// Same regions and occupancies with new (unnormalized) weights.
    pub(crate) fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .zip(weights)
            .map(|(b, &w)| {
                let phase = if b.amplitude.norm_sqr() > 0.0 {
                    b.amplitude / b.amplitude.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                (phase * w.max(0.0).sqrt(), b.occupancy.clone())
            })
            .collect();
        Self::new(
            self.regions.clone(),
            self.particle_count,
            self.particle_mass,
            branches,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ab() -> (Region, Region) {
        (
            Region::new("A", -5.0, 1.0).unwrap(),
            Region::new("B", 5.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn weights_are_normalized() {
        let (a, b) = ab();
        let s = BranchState::new(
            vec![a, b],
            4,
            1.0,
            vec![
                (Complex64::new(3.0, 0.0), vec![4, 0]),
                (Complex64::new(0.0, 4.0), vec![1, 3]),
            ],
        )
        .unwrap();
        let w = s.weights();
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[0], 9.0 / 25.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_occupancies() {
        let (a, b) = ab();
        let one = Complex64::new(1.0, 0.0);
        assert!(BranchState::new(vec![a.clone(), b.clone()], 4, 1.0, vec![(one, vec![3, 0])]).is_err());
        assert!(BranchState::new(
            vec![a.clone(), b.clone()],
            4,
            1.0,
            vec![(one, vec![2, 2]), (one, vec![2, 2])]
        )
        .is_err());
        let overlapping = Region::new("C", -4.8, 1.0).unwrap();
        assert!(BranchState::new(vec![a, overlapping], 1, 1.0, vec![(one, vec![1, 0])]).is_err());
        assert!(BranchState::split_product(ab().0, ab().1, 3, 1.0).is_err());
    }

    #[test]
    fn json_uses_named_occupancies() {
        let (a, b) = ab();
        let s = BranchState::equal_superposition(a, b, 10, 1.0).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["branches"][0]["occupancy"]["A"], 10);
        assert_eq!(v["branches"][1]["occupancy"]["B"], 10);
        let back: BranchState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
