// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Outcome frequencies of jump collapse follow the initial branch weights.

use serde::{Deserialize, Serialize};

use super::{
    binomial_tolerance, finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext,
};
use crate::dynamics::{draw_center, evolve_trajectory, seed_rng, CollapseParameters, DynamicsMode, TrajectoryConfig};
use crate::ensemble::{run_ensemble, wilson, EnsembleManifest, Outcome};
use crate::error::Result;
use crate::massdensity::branch_moments;
use crate::state::{BranchState, ParticleSpec, Region, SpatialGrid, State, WaveFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BornParams {
    /// Initial weights of the "all in A" branch.
    pub weights: Vec<f64>,
    pub particles: u64,
    pub ensemble: u64,
    pub rate: f64,
    pub alpha: f64,
    pub separation: f64,
    /// Center draws for the single-particle two-bump wavefunction.
    pub center_draws: u64,
}

impl Default for BornParams {
    fn default() -> Self {
        Self {
            weights: vec![0.5, 0.9],
            particles: 100,
            ensemble: 10_000,
            rate: 1.0,
            alpha: 1.0,
            separation: 10.0,
            center_draws: 10_000,
        }
    }
}

impl BornParams {
    fn validate(&self) -> Result<()> {
        require(!self.weights.is_empty(), || "no branch weights given".into())?;
        require(self.weights.iter().all(|w| (0.0..=1.0).contains(w)), || {
            "branch weights must lie in [0, 1]".into()
        })?;
        require(self.particles >= 1 && self.ensemble >= 1 && self.center_draws >= 1, || {
            "particles, ensemble and center_draws must be positive".into()
        })?;
        require(self.rate > 0.0, || format!("rate must be positive, got {}", self.rate))?;
        require(self.alpha > 0.0 && self.separation >= 1.0, || {
            "alpha must be positive and separation at least the region width".into()
        })
    }
}

fn key(w: f64) -> String {
    format!("p{w}")
}

/// Jump ensemble from the two-outcome state with weight `w` on "all in
/// A", each trajectory stopped at its first jump. Digests carry
/// `final_weight_a`, `collapsed` and `outcome_a`.
pub fn born_ensemble(p: &BornParams, w: f64, seed: u64, parallelism: usize) -> Result<EnsembleManifest> {
    p.validate()?;
    require((0.0..=1.0).contains(&w), || format!("branch weight must lie in [0, 1], got {w}"))?;
    let params = collapse(p)?;
    let horizon = 100.0 / (p.rate * p.particles as f64);
    let state = State::Branch(BranchState::two_outcome(
        Region::new("A", -0.5 * p.separation, 1.0)?,
        Region::new("B", 0.5 * p.separation, 1.0)?,
        p.particles,
        1.0,
        w,
    )?);
    #[derive(Serialize)]
    struct Echo<'a> {
        scenario: &'a BornParams,
        weight: f64,
    }
    let label = format!("born-{}", key(w));
    run_ensemble(&label, &Echo { scenario: p, weight: w }, p.ensemble, seed, parallelism, |_, seed, stream| {
        let config = TrajectoryConfig::new(horizon, horizon, DynamicsMode::Jumps, seed)
            .with_stream(stream)
            .stopping_at_first_jump();
        let rec = evolve_trajectory(&state, &params, &config)?;
        let State::Branch(after) = &rec.final_state else {
            unreachable!("branch dynamics returns a branch state")
        };
        let weight_a: f64 = after
            .branches()
            .iter()
            .filter(|b| b.occupancy[0] == after.particle_count())
            .map(|b| b.weight())
            .sum();
        let total = after.total_mass();
        let mass: f64 = branch_moments(after).mass.iter().sum();
        Ok(Outcome::new()
            .value("mass_conservation_error", (mass - total).abs() / total)
            .value("norm_deviation", (after.weights().iter().sum::<f64>() - 1.0).abs())
            .value("final_weight_a", weight_a)
            .flag("collapsed", rec.first_jump_time.is_some())
            .flag("outcome_a", weight_a > 0.5))
    })
}

fn collapse(p: &BornParams) -> Result<CollapseParameters> {
    CollapseParameters::default()
        .with_alpha(p.alpha)
        .with_simulation_rate(p.rate)
}

pub fn run_born_statistics(p: &BornParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::BornStatistics;
    p.validate()?;
    let eta = ctx.threshold_for(name)?;
    let params = collapse(p)?;
    let mut r = ReportBuilder::default();

    for (i, &w) in p.weights.iter().enumerate() {
        let manifest = born_ensemble(p, w, ctx.seed.wrapping_add(i as u64), ctx.parallelism)?;
        let k = key(w);
        let worst = |key: &str| manifest.digests.iter().map(|d| d.values[key]).fold(0.0, f64::max);
        r.expect(&format!("mass_conservation_error_{k}"), worst("mass_conservation_error"), Comparator::Le, 1e-9, 0.0);
        r.expect(&format!("norm_deviation_{k}"), worst("norm_deviation"), Comparator::Le, 1e-12, 0.0);
        let collapsed: Vec<_> = manifest.digests.iter().filter(|d| d.flags["collapsed"]).collect();
        let n = collapsed.len() as u64;
        r.measure(&format!("collapsed_{k}"), n as f64);
        if n == 0 {
            r.check(&format!("frequency_{k}"), Comparator::AbsEq, w, 0.0);
            continue;
        }
        let hits = collapsed.iter().filter(|d| d.flags["outcome_a"]).count() as u64;
        let f = wilson("outcome_a", n, hits);
        r.expect(&format!("frequency_{k}"), f.frequency, Comparator::AbsEq, w, binomial_tolerance(w, n));
        r.measure(&format!("ci_low_{k}"), f.ci_low);
        r.measure(&format!("ci_high_{k}"), f.ci_high);
    }

    // Center draws for one particle in two equal bumps.
    let half = 0.5 * p.separation;
    let grid = SpatialGrid::spanning(-half - 4.0 * p.alpha, half + 4.0 * p.alpha, 256)?;
    let left = grid.cells_between(-half - 0.5, -half + 0.5);
    let right = grid.cells_between(half - 0.5, half + 0.5);
    let cells: Vec<usize> = left.iter().chain(&right).copied().collect();
    let wf = WaveFunction::uniform_over(grid, ParticleSpec::nucleon("p"), &cells)?;
    let mut rng = seed_rng(ctx.seed, u64::MAX);
    let mut lefts = 0;
    for _ in 0..p.center_draws {
        if draw_center(&wf, 0, p.alpha, &mut rng)? < 0.0 {
            lefts += 1;
        }
    }
    let f = lefts as f64 / p.center_draws as f64;
    r.expect(
        "center_left_frequency",
        f,
        Comparator::AbsEq,
        0.5,
        binomial_tolerance(0.5, p.center_draws),
    );
    finish(r, name, p, ctx, eta, params.lambda_amplification())
}
