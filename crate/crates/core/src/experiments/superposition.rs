// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! ψ⊕ (all N particles in A or all in B) against ψ⊗ (N/2 in each): same
//! mass density, opposite accessibility.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext, Series, SeriesKind};
use crate::error::Result;
use crate::massdensity::{branch_moments, wave_region_moments, MassDensityField, MassMoments};
use crate::state::{product_state, superpose, BranchState, ParticleSpec, Region, SpatialGrid, WaveFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuperpositionParams {
    pub particles: u64,
    pub particle_mass: f64,
    /// Distance between the region centers.
    pub separation: f64,
    pub region_width: f64,
    /// Grid resolution of the two-particle wavefunction cross-check.
    pub cells_per_region: usize,
}

impl Default for SuperpositionParams {
    fn default() -> Self {
        Self {
            particles: 1000,
            particle_mass: 1.0,
            separation: 10.0,
            region_width: 1.0,
            cells_per_region: 4,
        }
    }
}

impl SuperpositionParams {
    fn validate(&self) -> Result<()> {
        require(self.particles >= 2 && self.particles % 2 == 0, || {
            format!("particle count must be even and at least 2, got {}", self.particles)
        })?;
        require(self.particle_mass > 0.0 && self.particle_mass.is_finite(), || {
            format!("particle mass must be positive, got {}", self.particle_mass)
        })?;
        require(self.region_width > 0.0 && self.separation >= self.region_width, || {
            format!(
                "regions of width {} must not overlap at separation {}",
                self.region_width, self.separation
            )
        })?;
        require(self.cells_per_region >= 1, || "cells_per_region must be at least 1".into())
    }

    fn regions(&self) -> Result<(Region, Region)> {
        Ok((
            Region::new("A", -0.5 * self.separation, self.region_width)?,
            Region::new("B", 0.5 * self.separation, self.region_width)?,
        ))
    }
}

/// `(ψ⊕, ψ⊗)` as branch states.
pub fn superposition_states(p: &SuperpositionParams) -> Result<(BranchState, BranchState)> {
    p.validate()?;
    let (a, b) = p.regions()?;
    Ok((
        BranchState::equal_superposition(a.clone(), b.clone(), p.particles, p.particle_mass)?,
        BranchState::split_product(a, b, p.particles, p.particle_mass)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionComparison {
    pub plus: MassDensityField,
    pub times: MassDensityField,
}

pub fn compare_superposition_product(p: &SuperpositionParams, threshold: f64) -> Result<SuperpositionComparison> {
    let (plus, times) = superposition_states(p)?;
    Ok(SuperpositionComparison {
        plus: MassDensityField::from_moments(branch_moments(&plus), threshold)?,
        times: MassDensityField::from_moments(branch_moments(&times), threshold)?,
    })
}

/// Builds ψ⊕ and ψ⊗ for two particles as grid wavefunctions and returns
/// the largest deviation of their region masses and variances from the
/// branch-state values, relative to `max(1, |value|)`.
pub fn cross_tier_deviation(p: &SuperpositionParams) -> Result<f64> {
    require(p.particles == 2, || {
        format!("the wavefunction cross-check needs 2 particles, got {}", p.particles)
    })?;
    let (plus_b, times_b) = superposition_states(p)?;
    let (a, b) = p.regions()?;
    let dx = p.region_width / p.cells_per_region as f64;
    let lo = a.lo() - p.region_width;
    let hi = b.hi() + p.region_width;
    let cells = ((hi - lo) / dx).round() as usize;
    let grid = SpatialGrid::new(cells, dx, lo)?;
    let cells_a = grid.cells_between(a.lo(), a.hi());
    let cells_b = grid.cells_between(b.lo(), b.hi());
    let particle = ParticleSpec::new("p", p.particle_mass)?;
    let in_a = WaveFunction::uniform_over(grid.clone(), particle.clone(), &cells_a)?;
    let in_b = WaveFunction::uniform_over(grid, particle, &cells_b)?;
    let aa = product_state(&[in_a.clone(), in_a.clone()])?;
    let bb = product_state(&[in_b.clone(), in_b.clone()])?;
    let one = Complex64::new(1.0, 0.0);
    let plus_w = superpose(&[(one, &aa), (one, &bb)])?;
    let times_w = product_state(&[in_a, in_b])?;
    let regions = vec![("A".to_string(), cells_a), ("B".to_string(), cells_b)];

    let deviation = |w: &MassMoments, b: &MassMoments| {
        w.mass
            .iter()
            .zip(&b.mass)
            .chain(w.variance.iter().zip(&b.variance))
            .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
            .fold(0.0, f64::max)
    };
    let d_plus = deviation(&wave_region_moments(&plus_w, &regions)?, &branch_moments(&plus_b));
    let d_times = deviation(&wave_region_moments(&times_w, &regions)?, &branch_moments(&times_b));
    Ok(d_plus.max(d_times))
}

pub fn run_superposition_vs_product(p: &SuperpositionParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::SuperpositionVsProduct;
    let eta = ctx.threshold_for(name)?;
    let cmp = compare_superposition_product(p, eta)?;
    let total = p.particles as f64 * p.particle_mass;
    let half = 0.5 * total;

    let mut r = ReportBuilder::default();
    let mut conservation: f64 = 0.0;
    for (tag, field) in [("plus", &cmp.plus), ("times", &cmp.times)] {
        conservation = conservation.max((field.integrated_mass() - total).abs() / total);
        for (i, label) in field.layout.labels.iter().enumerate() {
            let region = label.to_lowercase();
            r.expect(&format!("{tag}_mass_{region}"), field.mass[i], Comparator::RelEq, half, 1e-9);
            r.measure(&format!("{tag}_density_{region}"), field.density[i]);
            r.measure(&format!("{tag}_variance_{region}"), field.variance[i]);
            let key = format!("{tag}_ratio_{region}");
            if let Some(ratio) = field.ratio[i] {
                r.measure(&key, ratio);
            }
            r.check(&key, Comparator::AbsEq, if tag == "plus" { 1.0 } else { 0.0 }, 1e-9);
            let key = format!("{tag}_accessible_{region}");
            if eta < 1.0 {
                r.expect_flag(&key, field.accessible[i], tag == "times");
            } else {
                r.flag(&key, field.accessible[i]);
            }
        }
    }
    r.expect("mass_conservation_error", conservation, Comparator::Le, 1e-9, 0.0);
    let density_gap = cmp
        .plus
        .density
        .iter()
        .zip(&cmp.times.density)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max);
    r.expect("density_difference", density_gap, Comparator::Le, 1e-9, 0.0);
    r.flag("threshold_outside_regime", eta >= 1.0);
    if eta >= 1.0 {
        r.warn(format!(
            "threshold {eta} >= 1 lies outside the small-ratio regime; the comparison no longer separates the states"
        ));
    }
    if p.particles == 2 {
        r.expect("cross_tier_deviation", cross_tier_deviation(p)?, Comparator::Le, 1e-9, 0.0);
    }

    let x: Vec<f64> = cmp.plus.layout.centers.clone();
    for (tag, field) in [("plus", &cmp.plus), ("times", &cmp.times)] {
        r.series(Series {
            name: format!("{tag}_mass"),
            kind: SeriesKind::Bar,
            x_label: "region center".into(),
            y_label: "integrated mass".into(),
            x: x.clone(),
            y: field.mass.clone(),
        });
        r.series(Series {
            name: format!("{tag}_ratio"),
            kind: SeriesKind::Bar,
            x_label: "region center".into(),
            y_label: "ratio".into(),
            x: x.clone(),
            y: field.ratio.iter().map(|v| v.unwrap_or(0.0)).collect(),
        });
    }
    r.detail("plus", &cmp.plus)?;
    r.detail("times", &cmp.times)?;
    finish(r, name, p, ctx, eta, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn odd_particle_count_is_rejected() {
        let p = SuperpositionParams {
            particles: 999,
            ..Default::default()
        };
        assert!(matches!(
            run_superposition_vs_product(&p, &RunContext::default()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn large_threshold_is_flagged() {
        let ctx = RunContext::default().with_threshold(1.5);
        let r = run_superposition_vs_product(&SuperpositionParams::default(), &ctx).unwrap();
        assert_eq!(r.measured["threshold_outside_regime"], 1.0);
        assert_eq!(r.measured["plus_accessible_a"], 1.0);
        assert_eq!(r.measured["times_accessible_a"], 1.0);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn two_particle_tiers_agree() {
        let p = SuperpositionParams {
            particles: 2,
            ..Default::default()
        };
        let r = run_superposition_vs_product(&p, &RunContext::default()).unwrap();
        assert!(r.passed, "{}", r.summary_text());
        assert!(r.measured["cross_tier_deviation"] <= 1e-9);
    }
}
