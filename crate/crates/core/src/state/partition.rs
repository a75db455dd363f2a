// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A determinable observable given as a partition of grid cells (for
/// wavefunctions) or regions (for branch states) into determinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassObservablePartition {
    pub name: String,
    pub determinates: Vec<Determinate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Determinate {
    pub label: String,
    pub cells: Vec<usize>,
}

impl MassObservablePartition {
    pub fn new(name: impl Into<String>, determinates: Vec<(String, Vec<usize>)>) -> Self {
        Self {
            name: name.into(),
            determinates: determinates
                .into_iter()
                .map(|(label, cells)| Determinate { label, cells })
                .collect(),
        }
    }

    /// One determinate per cell (or region), labelled by its index.
    pub fn per_cell(name: impl Into<String>, len: usize) -> Self {
        Self::new(name, (0..len).map(|i| (i.to_string(), vec![i])).collect())
    }

    /// Checks that the determinates are disjoint and cover `0..len`.
    pub fn validate(&self, len: usize) -> Result<()> {
        if self.determinates.is_empty() {
            return Err(Error::Partition(format!("{} has no determinates", self.name)));
        }
        let mut owner: Vec<Option<usize>> = vec![None; len];
        for (d, det) in self.determinates.iter().enumerate() {
            for &c in &det.cells {
                let slot = owner.get_mut(c).ok_or_else(|| {
                    Error::Partition(format!("{}: index {c} outside 0..{len}", det.label))
                })?;
                if let Some(prev) = slot.replace(d) {
                    return Err(Error::Partition(format!(
                        "index {c} belongs to both {} and {}",
                        self.determinates[prev].label, det.label
                    )));
                }
            }
        }
        if let Some(missing) = owner.iter().position(Option::is_none) {
            return Err(Error::Partition(format!(
                "{} does not cover index {missing}",
                self.name
            )));
        }
        Ok(())
    }

    /// Determinate index owning each cell; assumes a validated partition.
    pub(crate) fn owners(&self, len: usize) -> Vec<usize> {
        let mut owner = vec![0; len];
        for (d, det) in self.determinates.iter().enumerate() {
            for &c in &det.cells {
                owner[c] = d;
            }
        }
        owner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_overlap_and_gaps() {
        let ok = MassObservablePartition::new(
            "location",
            vec![("in".into(), vec![0, 1]), ("out".into(), vec![2])],
        );
        assert!(ok.validate(3).is_ok());
        assert!(ok.validate(4).is_err());
        let overlap = MassObservablePartition::new(
            "location",
            vec![("in".into(), vec![0, 1]), ("out".into(), vec![1, 2])],
        );
        assert!(matches!(overlap.validate(3), Err(Error::Partition(_))));
        assert!(MassObservablePartition::per_cell("x", 5).validate(5).is_ok());
    }
}
