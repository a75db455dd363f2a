// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! A GRW hit on one bump of a two-bump superposition leaves a small but
//! nonzero tail on the other side. The tail's ratio is `√((1−p)/p)` for
//! tail weight `p`, so it is never accessible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext, Series, SeriesKind};
use crate::dynamics::{apply_localization, CollapseParameters};
use crate::error::Result;
use crate::massdensity::{
    degree_of, degree_threshold_for, indeterminacy_report, wave_moments, wave_region_moments, DegreeProfile,
    IndeterminacyReport, MassDensityField,
};
use crate::state::{MassObservablePartition, ParticleSpec, SpatialGrid, State, WaveFunction};

/// Thresholds at which the tail is reported as well as at the run's own.
const ETA_GRID: [f64; 4] = [0.05, 0.1, 0.3, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailsParams {
    /// Distance between the bump centers.
    pub separation: f64,
    /// Localization accuracy α of the hit.
    pub alpha: f64,
    /// Position standard deviation of each bump; defaults to α.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump_width: Option<f64>,
    pub cells_per_alpha: usize,
    /// Grid margin beyond each bump, in units of α.
    pub margin: f64,
}

impl Default for TailsParams {
    fn default() -> Self {
        Self {
            separation: 10.0,
            alpha: 1.0,
            bump_width: None,
            cells_per_alpha: 16,
            margin: 8.0,
        }
    }
}

impl TailsParams {
    fn validate(&self) -> Result<()> {
        require(self.alpha > 0.0 && self.alpha.is_finite(), || {
            format!("alpha must be positive, got {}", self.alpha)
        })?;
        require(self.separation >= 0.0 && self.separation.is_finite(), || {
            format!("separation must be non-negative, got {}", self.separation)
        })?;
        require(self.bump_width.is_none_or(|s| s > 0.0), || "bump width must be positive".into())?;
        require(self.cells_per_alpha >= 2, || "cells_per_alpha must be at least 2".into())?;
        require(self.margin > 0.0, || "margin must be positive".into())
    }

    pub fn width(&self) -> f64 {
        self.bump_width.unwrap_or(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailsOutcome {
    /// Weight left on the far side of the midpoint after the hit.
    pub tail_weight: f64,
    /// Region field: `main` (hit side) and, unless degenerate, `tail`.
    pub field: MassDensityField,
    /// Per-cell field of the collapsed state.
    pub cell_field: MassDensityField,
    pub profile: DegreeProfile,
    pub indeterminacy: IndeterminacyReport,
    pub degenerate: bool,
    pub state: WaveFunction,
}

/// Hits the left bump of an equal two-bump superposition at its center
/// and analyzes the result under threshold `eta`.
pub fn tails_field(p: &TailsParams, eta: f64) -> Result<TailsOutcome> {
    p.validate()?;
    let s = p.width();
    let x_left = -0.5 * p.separation;
    let x_right = 0.5 * p.separation;
    let lo = x_left - p.margin * p.alpha.max(s);
    let hi = x_right + p.margin * p.alpha.max(s);
    let dx = p.alpha / p.cells_per_alpha as f64;
    let cells = ((hi - lo) / dx).ceil() as usize;
    let grid = SpatialGrid::new(cells, dx, lo)?;
    let bump = |x: f64, c: f64| (-(x - c) * (x - c) / (4.0 * s * s)).exp();
    let initial = WaveFunction::from_fn(grid.clone(), ParticleSpec::nucleon("bump"), |x| {
        Complex64::new(bump(x, x_left) + bump(x, x_right), 0.0)
    })?;
    let params = CollapseParameters::default().with_alpha(p.alpha);
    let state = apply_localization(&initial, 0, x_left, &params)?;

    let degenerate = p.separation == 0.0;
    let regions = if degenerate {
        vec![("main".to_string(), (0..cells).collect())]
    } else {
        vec![
            ("main".to_string(), grid.cells_between(lo, 0.0)),
            ("tail".to_string(), grid.cells_between(0.0, f64::INFINITY)),
        ]
    };
    let field = MassDensityField::from_moments(wave_region_moments(&state, &regions)?, eta)?;
    let cell_field = MassDensityField::from_moments(wave_moments(&state), eta)?;
    let tail_weight = if degenerate { 0.0 } else { field.mass[1] / field.total_mass };
    let partition = MassObservablePartition::new("side", regions);
    let profile = degree_of(&State::WaveFunction(state.clone()), &partition)?;
    let indeterminacy = indeterminacy_report(&profile, degree_threshold_for(eta));
    Ok(TailsOutcome {
        tail_weight,
        field,
        cell_field,
        profile,
        indeterminacy,
        degenerate,
        state,
    })
}

pub fn run_tails_demo(p: &TailsParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::TailsDemo;
    let eta = ctx.threshold_for(name)?;
    let out = tails_field(p, eta)?;
    let mut r = ReportBuilder::default();

    r.expect("norm_deviation", (out.state.norm_squared() - 1.0).abs(), Comparator::Le, 1e-12, 0.0);
    let conservation = (out.field.integrated_mass() - out.field.total_mass).abs() / out.field.total_mass;
    r.expect("mass_conservation_error", conservation, Comparator::Le, 1e-9, 0.0);
    if let Some(main) = out.field.ratio[0] {
        r.measure("main_ratio", main);
    }
    r.flag("degenerate", out.degenerate);
    r.measure("main_degree", out.profile.entries[0].degree);

    if out.degenerate {
        r.expect_flag("main_accessible", out.field.accessible[0], true);
        r.expect("tail_weight", 0.0, Comparator::AbsEq, 0.0, 0.0);
        r.warn("zero separation: a single bump has no tail");
    } else {
        let pt = out.tail_weight;
        r.expect("tail_weight", pt, Comparator::Gt, 0.0, 0.0);
        r.flag("main_accessible", out.field.accessible[0]);
        r.measure("tail_degree", out.profile.entries[1].degree);
        match out.field.ratio[1] {
            Some(ratio) => {
                r.measure("tail_ratio", ratio);
                let law = ((1.0 - pt) / pt).sqrt();
                r.expect("tail_ratio_law_deviation", (ratio / law - 1.0).abs(), Comparator::Le, 1e-9, 0.0);
            }
            None => {
                r.warn("tail mass is below the mass floor; its ratio is undefined");
            }
        }
        r.expect_flag("tail_accessible", out.field.accessible[1], false);
        let mut never = true;
        for e in ETA_GRID {
            let accessible = out.field.reclassified(e)?.accessible[1];
            never &= !accessible;
            r.flag(&format!("tail_accessible_eta_{e}"), accessible);
        }
        r.expect_flag("tail_never_accessible", never, true);
    }

    r.series(Series {
        name: "density".into(),
        kind: SeriesKind::Line,
        x_label: "x".into(),
        y_label: "mass density".into(),
        x: out.cell_field.layout.centers.clone(),
        y: out.cell_field.density.clone(),
    });
    r.series(Series {
        name: "log10_density".into(),
        kind: SeriesKind::Line,
        x_label: "x".into(),
        y_label: "log10 mass density".into(),
        x: out.cell_field.layout.centers.clone(),
        y: out.cell_field.density.iter().map(|d| d.max(1e-300).log10()).collect(),
    });
    r.detail("field", &out.field)?;
    r.detail("degree_profile", &out.profile)?;
    r.detail("indeterminacy", &out.indeterminacy)?;
    finish(r, name, p, ctx, eta, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tail_is_tiny_and_inaccessible() {
        let r = run_tails_demo(&TailsParams::default(), &RunContext::default()).unwrap();
        assert!(r.passed, "{}", r.summary_text());
        let pt = r.measured["tail_weight"];
        assert!(pt > 1e-12 && pt < 1e-9, "tail weight {pt}");
    }

    #[test]
    fn close_bumps_leave_a_large_tail() {
        let p = TailsParams {
            separation: 1.0,
            ..Default::default()
        };
        let out = tails_field(&p, 0.1).unwrap();
        assert!(out.tail_weight > 0.1);
        assert!(!out.field.accessible[0] && !out.field.accessible[1]);
    }

    #[test]
    fn zero_separation_is_a_single_determinate_bump() {
        let p = TailsParams {
            separation: 0.0,
            ..Default::default()
        };
        let r = run_tails_demo(&p, &RunContext::default()).unwrap();
        assert!(r.passed, "{}", r.summary_text());
        assert!((r.measured["main_degree"] - 1.0).abs() < 1e-12);
    }
}
