// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Amplification: the first jump of an N-particle superposition arrives
//! at rate Nλ.

use serde::{Deserialize, Serialize};

use super::{finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext, Series, SeriesKind};
use crate::dynamics::{evolve_trajectory, simulation_rate, CollapseParameters, DynamicsMode, TrajectoryConfig};
use crate::ensemble::{run_ensemble, EnsembleManifest, Outcome};
use crate::error::Result;
use crate::massdensity::branch_moments;
use crate::state::{BranchState, ParticleSpec, Region, State};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateScalingParams {
    pub particle_counts: Vec<u64>,
    /// Simulation-time collapse rate per particle of mass `particle_mass`.
    pub rate: f64,
    pub particle_mass: f64,
    pub ensemble: u64,
    pub alpha: f64,
    pub separation: f64,
    /// Trajectories are censored after `horizon / (N λ)`.
    pub horizon: f64,
    /// Allowed relative deviation of the mean first-jump time.
    pub tolerance: f64,
}

impl Default for RateScalingParams {
    fn default() -> Self {
        Self {
            particle_counts: vec![1, 10, 100],
            rate: 1.0,
            particle_mass: 1.0,
            ensemble: 10_000,
            alpha: 1.0,
            separation: 10.0,
            horizon: 50.0,
            tolerance: 0.05,
        }
    }
}

impl RateScalingParams {
    fn validate(&self) -> Result<()> {
        require(!self.particle_counts.is_empty(), || "no particle counts given".into())?;
        require(self.particle_counts.iter().all(|&n| n >= 1), || "particle counts must be positive".into())?;
        require(self.ensemble >= 1, || "ensemble must have at least one trajectory".into())?;
        require(self.horizon > 0.0 && self.tolerance > 0.0, || "horizon and tolerance must be positive".into())?;
        require(self.separation >= 1.0, || "separation must be at least the region width".into())
    }

    fn collapse(&self) -> Result<CollapseParameters> {
        CollapseParameters::default()
            .with_alpha(self.alpha)
            .with_simulation_rate(self.rate)
    }
}

/// First-jump times of an ensemble started from the N-particle ψ⊕.
/// Digests carry `first_jump_time` (uncensored only) and `censored`.
pub fn first_jump_ensemble(
    p: &RateScalingParams,
    n: u64,
    seed: u64,
    parallelism: usize,
) -> Result<EnsembleManifest> {
    p.validate()?;
    let params = p.collapse()?;
    let state = State::Branch(BranchState::equal_superposition(
        Region::new("A", -0.5 * p.separation, 1.0)?,
        Region::new("B", 0.5 * p.separation, 1.0)?,
        n,
        p.particle_mass,
    )?);
    let per_particle = simulation_rate(&ParticleSpec::new("p", p.particle_mass)?, &params);
    let total = per_particle * n as f64;
    let t_final = if total > 0.0 { p.horizon / total } else { p.horizon };
    let label = format!("first-jump-n{n}");
    #[derive(Serialize)]
    struct Echo<'a> {
        scenario: &'a RateScalingParams,
        particles: u64,
    }
    run_ensemble(&label, &Echo { scenario: p, particles: n }, p.ensemble, seed, parallelism, |_, seed, stream| {
        let mut config = TrajectoryConfig::new(t_final, t_final, DynamicsMode::Jumps, seed)
            .with_stream(stream)
            .stopping_at_first_jump();
        config.snapshot_every = 0;
        let rec = evolve_trajectory(&state, &params, &config)?;
        let State::Branch(after) = &rec.final_state else {
            unreachable!("branch dynamics returns a branch state")
        };
        let total = after.total_mass();
        let mass: f64 = branch_moments(after).mass.iter().sum();
        let mut out = Outcome::new()
            .value("mass_conservation_error", (mass - total).abs() / total)
            .value("norm_deviation", (after.weights().iter().sum::<f64>() - 1.0).abs())
            .flag("censored", rec.first_jump_time.is_none());
        if let Some(t) = rec.first_jump_time {
            out = out.value("first_jump_time", t);
        }
        Ok(out)
    })
}

pub fn run_collapse_rate_scaling(p: &RateScalingParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::CollapseRateScaling;
    p.validate()?;
    let eta = ctx.threshold_for(name)?;
    let params = p.collapse()?;
    let per_particle = simulation_rate(&ParticleSpec::new("p", p.particle_mass)?, &params);

    let mut r = ReportBuilder::default();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, &n) in p.particle_counts.iter().enumerate() {
        // Independent seed per particle count.
        let manifest = first_jump_ensemble(p, n, ctx.seed.wrapping_add(i as u64), ctx.parallelism)?;
        let censored = manifest.aggregate.frequency("censored").map_or(0, |f| f.successes);
        r.measure(&format!("censored_n{n}"), censored as f64);
        r.measure(&format!("failed_n{n}"), manifest.failures.len() as f64);
        let worst = |key: &str| manifest.digests.iter().map(|d| d.values[key]).fold(0.0, f64::max);
        r.expect(&format!("mass_conservation_error_n{n}"), worst("mass_conservation_error"), Comparator::Le, 1e-9, 0.0);
        r.expect(&format!("norm_deviation_n{n}"), worst("norm_deviation"), Comparator::Le, 1e-12, 0.0);
        if per_particle == 0.0 {
            r.expect(
                &format!("censored_fraction_n{n}"),
                censored as f64 / p.ensemble as f64,
                Comparator::AbsEq,
                1.0,
                0.0,
            );
            continue;
        }
        let expected = 1.0 / (n as f64 * per_particle);
        r.measure(&format!("expected_first_jump_n{n}"), expected);
        match manifest.aggregate.mean("first_jump_time") {
            Some(m) => {
                r.measure(&format!("mean_first_jump_n{n}"), m.mean);
                if let Some(se) = m.std_error {
                    r.measure(&format!("std_error_n{n}"), se);
                }
                r.expect(
                    &format!("relative_deviation_n{n}"),
                    (m.mean / expected - 1.0).abs(),
                    Comparator::Le,
                    p.tolerance,
                    0.0,
                );
                xs.push(n as f64);
                ys.push(m.mean);
            }
            None => {
                r.check(&format!("relative_deviation_n{n}"), Comparator::Le, p.tolerance, 0.0);
            }
        }
    }
    if per_particle == 0.0 {
        r.warn("collapse rate is zero: every trajectory is censored and no mean is defined");
    }
    r.series(Series {
        name: "mean_first_jump".into(),
        kind: SeriesKind::Line,
        x_label: "particles".into(),
        y_label: "mean first-jump time".into(),
        x: xs,
        y: ys,
    });
    finish(r, name, p, ctx, eta, params.lambda_amplification())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_censors_everything() {
        let p = RateScalingParams {
            rate: 0.0,
            ensemble: 50,
            ..Default::default()
        };
        let r = run_collapse_rate_scaling(&p, &RunContext::default()).unwrap();
        assert!(r.passed, "{}", r.summary_text());
        assert_eq!(r.measured["censored_n100"], 50.0);
    }

    #[test]
    fn mean_scales_inversely() {
        let p = RateScalingParams {
            particle_counts: vec![4],
            ensemble: 4000,
            tolerance: 0.1,
            ..Default::default()
        };
        let r = run_collapse_rate_scaling(&p, &RunContext::new(9)).unwrap();
        assert!(r.passed, "{}", r.summary_text());
    }
}
