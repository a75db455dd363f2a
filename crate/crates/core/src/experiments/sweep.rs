// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Robustness of the accessibility verdicts to the choice of η.

use serde::{Deserialize, Serialize};

use super::superposition::{compare_superposition_product, SuperpositionParams};
use super::tails::{tails_field, TailsParams};
use super::{finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext};
use crate::error::Result;
use crate::massdensity::MassDensityField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    /// Thresholds expected to agree; each in (0, 1].
    pub etas: Vec<f64>,
    /// Pair straddling ψ⊕'s ratio of exactly 1.
    pub boundary: [f64; 2],
    pub superposition: SuperpositionParams,
    pub tails: TailsParams,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            etas: vec![0.05, 0.1, 0.3, 0.5],
            boundary: [0.9999, 1.0001],
            superposition: SuperpositionParams::default(),
            tails: TailsParams::default(),
        }
    }
}

/// Accessibility masks of each suite state at each threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub states: Vec<String>,
    pub etas: Vec<f64>,
    /// `masks[s][e]`: mask of state `s` at `etas[e]`.
    pub masks: Vec<Vec<Vec<bool>>>,
}

impl SweepTable {
    /// Whether every state's mask is the same at all thresholds.
    pub fn identical(&self) -> bool {
        self.masks.iter().all(|per_eta| per_eta.windows(2).all(|w| w[0] == w[1]))
    }

    /// States whose mask differs between the first and last threshold.
    pub fn changed(&self) -> Vec<&str> {
        self.states
            .iter()
            .zip(&self.masks)
            .filter(|(_, m)| m.first() != m.last())
            .map(|(s, _)| s.as_str())
            .collect()
    }
}

fn suite(p: &SweepParams) -> Result<Vec<(String, MassDensityField)>> {
    let cmp = compare_superposition_product(&p.superposition, 0.5)?;
    let tails = tails_field(&p.tails, 0.5)?;
    Ok(vec![
        ("psi_plus".into(), cmp.plus),
        ("psi_times".into(), cmp.times),
        ("tails".into(), tails.field),
    ])
}

/// Masks over the suite {ψ⊕, ψ⊗, tails} at each η. Thresholds only need
/// to be positive here; the (0, 1] restriction is the sweep's own.
pub fn sweep_masks(p: &SweepParams, etas: &[f64]) -> Result<SweepTable> {
    require(!etas.is_empty(), || "threshold grid is empty".into())?;
    let fields = suite(p)?;
    let mut masks = Vec::with_capacity(fields.len());
    for (_, f) in &fields {
        masks.push(
            etas.iter()
                .map(|&e| f.reclassified(e).map(|g| g.accessible))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(SweepTable {
        states: fields.into_iter().map(|(s, _)| s).collect(),
        etas: etas.to_vec(),
        masks,
    })
}

pub fn run_threshold_sweep(p: &SweepParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::ThresholdSweep;
    require(!p.etas.is_empty(), || "threshold grid is empty".into())?;
    for &e in &p.etas {
        require(e > 0.0 && e <= 1.0, || format!("grid threshold {e} lies outside (0, 1]"))?;
    }
    let eta = ctx.threshold_for(name)?;
    let grid = sweep_masks(p, &p.etas)?;
    let boundary = sweep_masks(p, &p.boundary)?;
    let flipped = boundary.changed();
    let conservation = suite(p)?
        .iter()
        .map(|(_, f)| (f.integrated_mass() - f.total_mass).abs() / f.total_mass)
        .fold(0.0, f64::max);

    let mut r = ReportBuilder::default();
    r.expect("mass_conservation_error", conservation, Comparator::Le, 1e-9, 0.0);
    r.expect_flag("masks_identical", grid.identical(), true);
    r.expect("boundary_flip_count", flipped.len() as f64, Comparator::AbsEq, 1.0, 0.0);
    r.expect_flag("boundary_flips_psi_plus", flipped.contains(&"psi_plus"), true);
    for (s, per_eta) in grid.states.iter().zip(&grid.masks) {
        let count = per_eta[0].iter().filter(|&&a| a).count();
        r.measure(&format!("{s}_accessible_count"), count as f64);
    }
    r.detail("grid", &grid)?;
    r.detail("boundary", &boundary)?;
    finish(r, name, p, ctx, eta, 1.0)
}
