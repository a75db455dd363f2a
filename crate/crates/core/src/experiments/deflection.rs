// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! A Newtonian test particle flies between the two regions of ψ⊕ or ψ⊗.
//! Sourced by the mean mass density it feels equal pulls and goes
//! straight; sourced by the post-collapse density it swings toward the
//! region that received the mass, each side about half the time.

use serde::{Deserialize, Serialize};

use super::{
    binomial_tolerance, finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext,
    Series, SeriesKind,
};
use crate::dynamics::{evolve_trajectory, CollapseParameters, DynamicsMode, TrajectoryConfig};
use crate::ensemble::{run_ensemble, Outcome};
use crate::error::Result;
use crate::massdensity::branch_moments;
use crate::state::{BranchState, Region, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeflectionParams {
    pub particles: u64,
    pub particle_mass: f64,
    /// Transverse positions of regions A and B; A is the +y side.
    pub region_a_y: f64,
    pub region_b_y: f64,
    pub region_width: f64,
    /// Transverse offset of the test particle's straight-line path.
    pub impact_y: f64,
    pub start_x: f64,
    pub end_x: f64,
    pub speed: f64,
    /// Gravitational coupling G.
    pub coupling: f64,
    pub steps: usize,
    /// Post-collapse trajectories.
    pub ensemble: u64,
    /// Simulation-time collapse rate per particle.
    pub rate: f64,
    pub alpha: f64,
}

impl Default for DeflectionParams {
    fn default() -> Self {
        Self {
            particles: 1000,
            particle_mass: 1.0,
            region_a_y: 5.0,
            region_b_y: -5.0,
            region_width: 1.0,
            impact_y: 0.0,
            start_x: -100.0,
            end_x: 100.0,
            speed: 1.0,
            coupling: 1e-3,
            steps: 2000,
            ensemble: 10_000,
            rate: 1.0,
            alpha: 1.0,
        }
    }
}

impl DeflectionParams {
    fn validate(&self) -> Result<()> {
        require(self.particles >= 2 && self.particles % 2 == 0, || {
            format!("particle count must be even and at least 2, got {}", self.particles)
        })?;
        require(self.speed > 0.0 && self.end_x > self.start_x, || {
            "the test particle must move forward".into()
        })?;
        require(self.steps >= 1 && self.ensemble >= 1, || "need at least one step and one trajectory".into())?;
        require(self.coupling >= 0.0 && self.alpha > 0.0 && self.rate >= 0.0, || {
            "coupling, alpha and rate must be non-negative (alpha positive)".into()
        })?;
        let da = self.region_a_y - self.impact_y;
        let db = self.region_b_y - self.impact_y;
        require((da + db).abs() <= 1e-12 * da.abs().max(db.abs()), || {
            format!(
                "regions at y = {} and {} are not symmetric about the path y = {}",
                self.region_a_y, self.region_b_y, self.impact_y
            )
        })?;
        require(da > 0.0, || "region A must lie on the +y side of the path".into())
    }

    fn states(&self) -> Result<(BranchState, BranchState)> {
        let a = Region::new("A", self.region_a_y, self.region_width)?;
        let b = Region::new("B", self.region_b_y, self.region_width)?;
        Ok((
            BranchState::equal_superposition(a.clone(), b.clone(), self.particles, self.particle_mass)?,
            BranchState::split_product(a, b, self.particles, self.particle_mass)?,
        ))
    }

    fn sources(&self, masses: &[f64]) -> Vec<PointSource> {
        vec![
            PointSource {
                x: 0.0,
                y: self.region_a_y,
                mass: masses[0],
            },
            PointSource {
                x: 0.0,
                y: self.region_b_y,
                mass: masses[1],
            },
        ]
    }

    fn angle(&self, masses: &[f64]) -> f64 {
        deflection_angle(&self.sources(masses), self)
    }
}

/// Deflection angle (radians, positive toward +y) of a test particle
/// launched along +x, integrated with velocity Verlet.
pub fn deflection_angle(sources: &[PointSource], p: &DeflectionParams) -> f64 {
    let dt = (p.end_x - p.start_x) / (p.speed * p.steps as f64);
    let accel = |x: f64, y: f64| {
        let (mut ax, mut ay) = (0.0, 0.0);
        for s in sources {
            let (dx, dy) = (s.x - x, s.y - y);
            let r2 = dx * dx + dy * dy;
            let k = p.coupling * s.mass / (r2 * r2.sqrt());
            ax += k * dx;
            ay += k * dy;
        }
        (ax, ay)
    };
    let (mut x, mut y) = (p.start_x, p.impact_y);
    let (mut vx, mut vy) = (p.speed, 0.0);
    let (mut ax, mut ay) = accel(x, y);
    for _ in 0..p.steps {
        vx += 0.5 * dt * ax;
        vy += 0.5 * dt * ay;
        x += dt * vx;
        y += dt * vy;
        (ax, ay) = accel(x, y);
        vx += 0.5 * dt * ax;
        vy += 0.5 * dt * ay;
    }
    vy.atan2(vx)
}

pub fn run_deflection(p: &DeflectionParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::Deflection;
    p.validate()?;
    let eta = ctx.threshold_for(name)?;
    let (plus, times) = p.states()?;
    let cparams = CollapseParameters::default()
        .with_alpha(p.alpha)
        .with_simulation_rate(p.rate)?;
    let total = p.particles as f64 * p.particle_mass;

    let mut r = ReportBuilder::default();
    let mf_plus = p.angle(&branch_moments(&plus).mass);
    let mf_times = p.angle(&branch_moments(&times).mass);
    r.expect("mean_field_plus_deflection", mf_plus, Comparator::AbsEq, 0.0, 1e-12);
    r.expect("mean_field_times_deflection", mf_times, Comparator::AbsEq, 0.0, 1e-12);
    r.measure("collapsed_deflection", p.angle(&[total, 0.0]));

    // ψ⊗ has a single branch: a jump cannot move its mass.
    let total_rate = p.rate * p.particles as f64;
    let horizon = if total_rate > 0.0 { 100.0 / total_rate } else { 1.0 };
    let config = TrajectoryConfig::new(horizon, horizon, DynamicsMode::Jumps, ctx.seed).stopping_at_first_jump();
    let rec = evolve_trajectory(&State::Branch(times.clone()), &cparams, &config)?;
    let State::Branch(after) = &rec.final_state else {
        unreachable!("branch dynamics returns a branch state")
    };
    r.expect(
        "post_collapse_times_deflection",
        p.angle(&branch_moments(after).mass),
        Comparator::AbsEq,
        0.0,
        1e-12,
    );

    let manifest = run_ensemble(name.as_str(), p, p.ensemble, ctx.seed, ctx.parallelism, |_, seed, stream| {
        let mut config = config.clone().with_stream(stream);
        config.seed = seed;
        let rec = evolve_trajectory(&State::Branch(plus.clone()), &cparams, &config)?;
        let State::Branch(after) = &rec.final_state else {
            unreachable!("branch dynamics returns a branch state")
        };
        let m = branch_moments(after);
        let angle = p.angle(&m.mass);
        let conservation = (m.mass.iter().sum::<f64>() - total).abs() / total;
        Ok(Outcome::new()
            .value("deflection", angle)
            .value("mass_conservation_error", conservation)
            .flag("collapsed", rec.first_jump_time.is_some())
            .flag("toward_a", rec.first_jump_time.is_some() && angle > 0.0))
    })?;

    let collapsed: Vec<_> = manifest.digests.iter().filter(|d| d.flags["collapsed"]).collect();
    let n = collapsed.len() as u64;
    r.measure("collapsed_trajectories", n as f64);
    r.measure("failed_trajectories", manifest.failures.len() as f64);
    let worst = manifest
        .digests
        .iter()
        .map(|d| d.values["mass_conservation_error"])
        .fold(0.0, f64::max);
    r.expect("mass_conservation_error", worst, Comparator::Le, 1e-9, 0.0);
    if n > 0 {
        let toward = collapsed.iter().filter(|d| d.flags["toward_a"]).count() as u64;
        let freq = crate::ensemble::wilson("toward_a", n, toward);
        r.expect(
            "post_collapse_toward_a_frequency",
            freq.frequency,
            Comparator::AbsEq,
            0.5,
            binomial_tolerance(0.5, n),
        );
        let mean_abs = collapsed.iter().map(|d| d.values["deflection"].abs()).sum::<f64>() / n as f64;
        r.measure("post_collapse_mean_abs_deflection", mean_abs);
        r.detail("post_collapse_frequency", &freq)?;
    } else {
        r.warn("no trajectory collapsed before the horizon");
        r.check("post_collapse_toward_a_frequency", Comparator::AbsEq, 0.5, 0.0);
    }

    let angles: Vec<f64> = collapsed.iter().map(|d| d.values["deflection"]).collect();
    r.series(histogram("post_collapse_deflection", &angles, 41));
    r.detail("ensemble_aggregate", &manifest.aggregate)?;
    r.detail("ensemble_parameter_hash", &manifest.parameter_hash)?;
    finish(r, name, p, ctx, eta, cparams.lambda_amplification())
}

pub(crate) fn histogram(name: &str, values: &[f64], bins: usize) -> Series {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if values.is_empty() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0; bins];
    for v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1.0;
    }
    Series {
        name: name.to_string(),
        kind: SeriesKind::Histogram,
        x_label: name.to_string(),
        y_label: "count".into(),
        x: (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect(),
        y: counts,
    }
}
