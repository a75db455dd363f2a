// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Continuous collapse of a single particle spread over two bumps:
//! ensemble-mean variances only decrease, final outcomes follow the
//! initial weights, and switching the coupling off leaves pure
//! Schrödinger evolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::deflection::histogram;
use super::{
    binomial_tolerance, finish, require, Comparator, ExperimentName, ExperimentReport, ReportBuilder, RunContext,
    Series, SeriesKind,
};
use crate::dynamics::{
    csl_step, evolve_trajectory, unitary_step, CollapseParameters, DynamicsMode, Hamiltonian, TrajectoryConfig,
};
use crate::ensemble::{run_ensemble, Outcome, TrajectoryDigest};
use crate::error::Result;
use crate::state::{normalize, MassObservablePartition, ParticleSpec, SpatialGrid, State, WaveFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CslParams {
    /// Initial weights of the left bump.
    pub weights: Vec<f64>,
    pub gamma: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Snapshots after the initial one.
    pub snapshots: usize,
    pub ensemble: u64,
    /// A trajectory is decided once one side holds at least this weight.
    pub decided_weight: f64,
}

impl Default for CslParams {
    fn default() -> Self {
        Self {
            weights: vec![0.5, 0.9],
            gamma: 2.0,
            dt: 0.01,
            t_final: 4.0,
            snapshots: 4,
            ensemble: 10_000,
            decided_weight: 0.99,
        }
    }
}

const CELLS: usize = 8;
const LEFT: [usize; 2] = [1, 2];
const RIGHT: [usize; 2] = [5, 6];

impl CslParams {
    fn validate(&self) -> Result<()> {
        require(!self.weights.is_empty(), || "no branch weights given".into())?;
        require(self.weights.iter().all(|w| (0.0..=1.0).contains(w)), || {
            "branch weights must lie in [0, 1]".into()
        })?;
        require(self.gamma >= 0.0 && self.dt > 0.0 && self.t_final > self.dt, || {
            "need gamma >= 0 and 0 < dt < t_final".into()
        })?;
        let steps = (self.t_final / self.dt).round() as usize;
        require(self.snapshots >= 1 && steps % self.snapshots == 0, || {
            format!("{steps} steps cannot be split into {} snapshot intervals", self.snapshots)
        })?;
        require(self.ensemble >= 2, || "ensemble needs at least two trajectories".into())
    }
}

fn two_bumps(w: f64) -> Result<WaveFunction> {
    let grid = SpatialGrid::new(CELLS, 1.0, 0.0)?;
    let mut raw = vec![Complex64::new(0.0, 0.0); CELLS];
    for c in LEFT {
        raw[c] = Complex64::new(w.sqrt(), 0.0);
    }
    for c in RIGHT {
        raw[c] = Complex64::new((1.0 - w).sqrt(), 0.0);
    }
    normalize(raw, grid, vec![ParticleSpec::nucleon("p")])
}

/// Largest amplitude difference between uncoupled continuous steps and
/// plain unitary steps for a moving packet.
fn reduction_deviation(dt: f64) -> Result<f64> {
    let grid = SpatialGrid::spanning(-20.0, 20.0, 128)?;
    let mut a = WaveFunction::gaussian_with_momentum(grid.clone(), ParticleSpec::nucleon("p"), -5.0, 1.0, 1.0)?;
    let mut b = a.clone();
    let params = CollapseParameters::default().with_csl(0.0, 0.0);
    let h = Hamiltonian::free();
    let zeros = vec![0.0; grid.cell_count()];
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        a = csl_step(&a, &zeros, dt, &params, &h)?;
        b = unitary_step(&b, &h, dt)?;
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

fn variance_key(snapshot: usize, cell: usize) -> String {
    format!("v{snapshot}_c{cell}")
}

/// Cells and snapshot pairs whose ensemble-mean variance rises by more
/// than three standard errors of the paired difference.
fn variance_increases(digests: &[TrajectoryDigest], snapshots: usize) -> (usize, f64) {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let n = digests.len() as f64;
    for c in 0..CELLS {
        for s in 0..snapshots {
            let diffs: Vec<f64> = digests
                .iter()
                .map(|d| d.values[&variance_key(s + 1, c)] - d.values[&variance_key(s, c)])
                .collect();
            let mean = diffs.iter().sum::<f64>() / n;
            let var = diffs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            let excess = mean - 3.0 * (var / n).sqrt() - 1e-12;
            worst = worst.max(excess);
            if excess > 0.0 {
                violations += 1;
            }
        }
    }
    (violations, worst)
}

pub fn run_csl_collapse(p: &CslParams, ctx: &RunContext) -> Result<ExperimentReport> {
    let name = ExperimentName::CslCollapse;
    p.validate()?;
    let eta = ctx.threshold_for(name)?;
    let params = CollapseParameters::default().with_csl(p.gamma, 1.0);
    let steps = (p.t_final / p.dt).round() as usize;
    let sides = MassObservablePartition::new(
        "side",
        vec![("left".into(), (0..CELLS / 2).collect()), ("right".into(), (CELLS / 2..CELLS).collect())],
    );
    let mut r = ReportBuilder::default();
    r.expect("reduction_max_deviation", reduction_deviation(p.dt)?, Comparator::Le, 1e-12, 0.0);

    for (i, &w) in p.weights.iter().enumerate() {
        let k = format!("p{w}");
        let initial = State::WaveFunction(two_bumps(w)?);
        let seed = ctx.seed.wrapping_add(i as u64);
        let manifest = run_ensemble(&format!("csl-{k}"), p, p.ensemble, seed, ctx.parallelism, |_, seed, stream| {
            let config = TrajectoryConfig::new(p.t_final, p.dt, DynamicsMode::Csl, seed)
                .with_stream(stream)
                .with_snapshots(steps / p.snapshots)
                .with_partition(sides.clone());
            let rec = evolve_trajectory(&initial, &params, &config)?;
            let mut out = Outcome::new();
            let mut norm_dev: f64 = 0.0;
            let mut mass_err: f64 = 0.0;
            for (s, snap) in rec.snapshots.iter().enumerate() {
                for (c, v) in snap.variance.iter().enumerate() {
                    out = out.value(&variance_key(s, c), *v);
                }
                norm_dev = norm_dev.max((snap.norm - 1.0).abs());
                mass_err = mass_err.max((snap.total_mass - 1.0).abs());
            }
            let left = rec.final_branch_weights()[0];
            Ok(out
                .value("final_weight_left", left)
                .value("norm_deviation", norm_dev)
                .value("mass_conservation_error", mass_err)
                .flag("outcome_left", left > 0.5)
                .flag("decided", left.max(1.0 - left) >= p.decided_weight))
        })?;
        r.measure(&format!("failed_{k}"), manifest.failures.len() as f64);
        let digests = &manifest.digests;
        let worst = |key: &str| digests.iter().map(|d| d.values[key]).fold(0.0, f64::max);
        r.expect(&format!("norm_deviation_{k}"), worst("norm_deviation"), Comparator::Le, 1e-12, 0.0);
        r.expect(&format!("mass_conservation_error_{k}"), worst("mass_conservation_error"), Comparator::Le, 1e-9, 0.0);

        let agg = &manifest.aggregate;
        let outcome = agg.frequency("outcome_left").expect("outcome flag present");
        r.expect(
            &format!("frequency_{k}"),
            outcome.frequency,
            Comparator::AbsEq,
            w,
            binomial_tolerance(w, outcome.n).max(1e-12),
        );
        let decided = agg.frequency("decided").expect("decided flag present");
        r.measure(&format!("decided_fraction_{k}"), decided.frequency);
        if decided.frequency < 1.0 {
            r.warn(format!(
                "{} of {} trajectories at weight {w} are undecided at t = {}",
                decided.n - decided.successes,
                decided.n,
                p.t_final
            ));
        }
        let mean = agg.mean("final_weight_left").expect("weight value present");
        let se = mean.std_error.unwrap_or(0.0);
        r.measure(&format!("mean_final_weight_{k}"), mean.mean);
        r.expect(
            &format!("martingale_deviation_{k}"),
            (mean.mean - w).abs(),
            Comparator::Le,
            3.0 * se + 1e-12,
            0.0,
        );
        let (violations, excess) = variance_increases(digests, p.snapshots);
        r.measure(&format!("variance_max_excess_{k}"), excess);
        r.expect(&format!("variance_increases_{k}"), violations as f64, Comparator::AbsEq, 0.0, 0.0);

        let times: Vec<f64> = (0..=p.snapshots).map(|s| s as f64 * p.t_final / p.snapshots as f64).collect();
        let total_var: Vec<f64> = (0..=p.snapshots)
            .map(|s| {
                (0..CELLS)
                    .map(|c| agg.mean(&variance_key(s, c)).map_or(0.0, |m| m.mean))
                    .sum()
            })
            .collect();
        r.series(Series {
            name: format!("mean_total_variance_{k}"),
            kind: SeriesKind::Line,
            x_label: "time".into(),
            y_label: "ensemble-mean total variance".into(),
            x: times,
            y: total_var,
        });
        let finals: Vec<f64> = digests.iter().map(|d| d.values["final_weight_left"]).collect();
        r.series(histogram(&format!("final_weight_left_{k}"), &finals, 20));
    }
    finish(r, name, p, ctx, eta, params.lambda_amplification())
}
