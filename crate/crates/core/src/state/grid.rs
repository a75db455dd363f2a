// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1D grid of cells. Cell `i` is sampled at its center
/// `origin + (i + 0.5) * cell_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct SpatialGrid {
    cell_count: usize,
    cell_width: f64,
    origin: f64,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    cell_count: usize,
    cell_width: f64,
    #[serde(default)]
    origin: f64,
}

impl TryFrom<GridDoc> for SpatialGrid {
    type Error = Error;

    fn try_from(doc: GridDoc) -> Result<Self> {
        SpatialGrid::new(doc.cell_count, doc.cell_width, doc.origin)
    }
}

impl From<SpatialGrid> for GridDoc {
    fn from(grid: SpatialGrid) -> Self {
        GridDoc {
            cell_count: grid.cell_count,
            cell_width: grid.cell_width,
            origin: grid.origin,
        }
    }
}

impl SpatialGrid {
    pub fn new(cell_count: usize, cell_width: f64, origin: f64) -> Result<Self> {
        if cell_count < 2 {
            return Err(Error::Parameter(format!(
                "grid needs at least 2 cells, got {cell_count}"
            )));
        }
        if !(cell_width > 0.0) || !cell_width.is_finite() {
            return Err(Error::Parameter(format!(
                "cell width must be positive and finite, got {cell_width}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::Parameter("grid origin must be finite".into()));
        }
        Ok(Self {
            cell_count,
            cell_width,
            origin,
        })
    }

    /// Grid of `cell_count` cells spanning `[lo, hi)`.
    pub fn spanning(lo: f64, hi: f64, cell_count: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Parameter(format!("empty interval [{lo}, {hi})")));
        }
        Self::new(cell_count, (hi - lo) / cell_count as f64, lo)
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn center(&self, i: usize) -> f64 {
        self.origin + (i as f64 + 0.5) * self.cell_width
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cell_count).map(|i| self.center(i)).collect()
    }

    pub fn length(&self) -> f64 {
        self.cell_count as f64 * self.cell_width
    }

    /// Closed extent `[origin, origin + length]`.
    pub fn extent(&self) -> (f64, f64) {
        (self.origin, self.origin + self.length())
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.extent();
        x >= lo && x <= hi
    }

    /// Index of the cell containing `x`, if any.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let i = ((x - self.origin) / self.cell_width).floor() as usize;
        Some(i.min(self.cell_count - 1))
    }

    /// Indices of all cells whose centers lie in `[lo, hi)`.
    pub fn cells_between(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.cell_count)
            .filter(|&i| {
                let c = self.center(i);
                c >= lo && c < hi
            })
            .collect()
    }
}

/// One distinguishable particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    pub label: String,
    /// Mass in units of the reference (nucleon) mass.
    pub mass: f64,
    /// Collapse rate assigned from the mass law; informational, the
    /// dynamics recompute it from [`crate::dynamics::CollapseParameters`].
    #[serde(default)]
    pub collapse_rate: f64,
}

impl ParticleSpec {
    pub fn new(label: impl Into<String>, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Parameter(format!("particle mass must be positive, got {mass}")));
        }
        Ok(Self {
            label: label.into(),
            mass,
            collapse_rate: 0.0,
        })
    }

    pub fn nucleon(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            mass: 1.0,
            collapse_rate: 0.0,
        }
    }

    pub fn with_collapse_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::Parameter(format!("collapse rate must be >= 0, got {rate}")));
        }
        self.collapse_rate = rate;
        Ok(self)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Parameter(format!(
                "particle {} has non-positive mass {}",
                self.label, self.mass
            )));
        }
        if !(self.collapse_rate >= 0.0) {
            return Err(Error::Parameter(format!(
                "particle {} has negative collapse rate",
                self.label
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_follow_cell_sampling() {
        let g = SpatialGrid::new(4, 0.5, -1.0).unwrap();
        assert_eq!(g.centers(), vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(g.extent(), (-1.0, 1.0));
        assert_eq!(g.cell_of(0.1), Some(2));
        assert_eq!(g.cell_of(1.0), Some(3));
        assert_eq!(g.cell_of(1.01), None);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SpatialGrid::new(1, 1.0, 0.0).is_err());
        assert!(SpatialGrid::new(4, 0.0, 0.0).is_err());
        assert!(SpatialGrid::new(4, -1.0, 0.0).is_err());
        assert!(serde_json::from_str::<SpatialGrid>(r#"{"cell_count":1,"cell_width":1.0}"#).is_err());
    }

    #[test]
    fn particle_mass_must_be_positive() {
        assert!(ParticleSpec::new("e", 0.0).is_err());
        assert!(ParticleSpec::new("e", 1.0 / 1836.0).is_ok());
        assert!(ParticleSpec::nucleon("p").with_collapse_rate(-1.0).is_err());
    }
}
