// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single stochastic realizations, recorded as [`TrajectoryRecord`]s.
//!
//! Wavefunctions are stepped on a fixed time grid (unitary step, then
//! jumps or a CSL step). Branch states carry no Hamiltonian, so their
//! jump process is simulated event by event with exponential waiting
//! times at total rate `N λ`.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use super::csl::{csl_step, sample_noise};
use super::jumps::{apply_localization, pick_index, sample_jumps, JumpEvent};
use super::params::{mass_rate, CollapseParameters};
use super::seed_rng;
use super::unitary::{unitary_step, Hamiltonian};
use crate::error::{Error, Result};
use crate::massdensity::{degree_of, moments, DEFAULT_THRESHOLD};
use crate::state::{BranchState, MassObservablePartition, State, WaveFunction};

pub const TRAJECTORY_SCHEMA: &str = "grwm.trajectory/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsMode {
    Jumps,
    Csl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub t_final: f64,
    /// Step width for wavefunctions; snapshot spacing unit for branch states.
    pub dt: f64,
    pub mode: DynamicsMode,
    pub seed: u64,
    /// Independent stream of `seed`; ensembles use the trajectory index.
    #[serde(default)]
    pub stream: u64,
    /// Take a snapshot every this many steps (0 = only initial and final).
    pub snapshot_every: usize,
    #[serde(default)]
    pub hamiltonian: Hamiltonian,
    /// Branch weights are recorded against this partition (wavefunctions)
    /// or per branch (branch states).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<MassObservablePartition>,
    /// End the run at the first jump.
    #[serde(default)]
    pub stop_at_first_jump: bool,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl TrajectoryConfig {
    pub fn new(t_final: f64, dt: f64, mode: DynamicsMode, seed: u64) -> Self {
        Self {
            t_final,
            dt,
            mode,
            seed,
            stream: 0,
            snapshot_every: 0,
            hamiltonian: Hamiltonian::zero(),
            partition: None,
            stop_at_first_jump: false,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_snapshots(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn with_hamiltonian(mut self, hamiltonian: Hamiltonian) -> Self {
        self.hamiltonian = hamiltonian;
        self
    }

    pub fn with_partition(mut self, partition: MassObservablePartition) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn stopping_at_first_jump(mut self) -> Self {
        self.stop_at_first_jump = true;
        self
    }
}

/// Mass-density summary of the state at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub norm: f64,
    pub total_mass: f64,
    /// Integrated mass per cell / region.
    pub mass: Vec<f64>,
    pub variance: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branch_weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub schema_version: String,
    pub seed: u64,
    pub stream: u64,
    pub mode: DynamicsMode,
    pub parameters: CollapseParameters,
    pub lambda_amplification: f64,
    pub threshold: f64,
    pub t_final: f64,
    pub snapshots: Vec<Snapshot>,
    pub jumps: Vec<JumpEvent>,
    pub first_jump_time: Option<f64>,
    pub final_state: State,
}

impl TrajectoryRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Jump events as `time,particle,center` CSV.
    pub fn write_jumps_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "particle", "center"])?;
        for j in &self.jumps {
            w.write_record([j.time.to_string(), j.particle.to_string(), j.center.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn final_branch_weights(&self) -> Vec<f64> {
        self.snapshots
            .last()
            .map(|s| s.branch_weights.clone())
            .unwrap_or_default()
    }
}

pub fn evolve_trajectory(
    initial: &State,
    params: &CollapseParameters,
    config: &TrajectoryConfig,
) -> Result<TrajectoryRecord> {
    params.validate()?;
    if !(config.t_final > 0.0) || !config.t_final.is_finite() {
        return Err(Error::Parameter(format!("t_final must be positive, got {}", config.t_final)));
    }
    if !(config.dt > 0.0) || !config.dt.is_finite() {
        return Err(Error::Parameter(format!("dt must be positive, got {}", config.dt)));
    }
    crate::massdensity::check_threshold(config.threshold)?;
    let mut rng = seed_rng(config.seed, config.stream);
    let (snapshots, jumps, final_state) = match initial {
        State::WaveFunction(wf) => evolve_wave(wf, params, config, &mut rng)?,
        State::Branch(bs) => {
            if config.mode == DynamicsMode::Csl {
                return Err(Error::Parameter(
                    "continuous collapse needs a wavefunction; branch states support jump dynamics".into(),
                ));
            }
            evolve_branches(bs, params, config, &mut rng)?
        }
    };
    Ok(TrajectoryRecord {
        schema_version: TRAJECTORY_SCHEMA.to_string(),
        seed: config.seed,
        stream: config.stream,
        mode: config.mode,
        parameters: params.clone(),
        lambda_amplification: params.lambda_amplification(),
        threshold: config.threshold,
        t_final: config.t_final,
        first_jump_time: jumps.first().map(|j| j.time),
        snapshots,
        jumps,
        final_state,
    })
}

fn snapshot(state: &State, time: f64, weights: Vec<f64>) -> Snapshot {
    let m = moments(state);
    let norm = match state {
        State::WaveFunction(wf) => wf.norm_squared().sqrt(),
        State::Branch(bs) => bs.weights().iter().sum::<f64>().sqrt(),
    };
    Snapshot {
        time,
        norm,
        total_mass: m.mass.iter().sum(),
        mass: m.mass,
        variance: m.variance,
        branch_weights: weights,
    }
}

fn partition_weights(wf: &WaveFunction, partition: Option<&MassObservablePartition>) -> Result<Vec<f64>> {
    match partition {
        Some(p) => Ok(degree_of(&State::WaveFunction(wf.clone()), p)?.degrees()),
        None => Ok(Vec::new()),
    }
}

type Evolution = (Vec<Snapshot>, Vec<JumpEvent>, State);

fn evolve_wave(
    initial: &WaveFunction,
    params: &CollapseParameters,
    config: &TrajectoryConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Evolution> {
    let steps = (config.t_final / config.dt).round().max(1.0) as usize;
    let dt = config.t_final / steps as f64;
    let t0 = initial.time();
    let partition = config.partition.as_ref();
    let mut state = initial.clone();
    let mut snapshots = vec![snapshot(
        &State::WaveFunction(state.clone()),
        t0,
        partition_weights(&state, partition)?,
    )];
    let mut jumps = Vec::new();

    for step in 1..=steps {
        let time = t0 + step as f64 * dt;
        match config.mode {
            DynamicsMode::Jumps => {
                let pre = state.clone();
                let events = sample_jumps(&pre, dt, params, rng)?;
                state = unitary_step(&state, &config.hamiltonian, dt)?;
                let mut stop = false;
                for mut event in events {
                    event.pre_jump_branch_weights = partition_weights(&state, partition)?;
                    state = apply_localization(&state, event.particle as usize, event.center, params)?;
                    jumps.push(event);
                    stop = config.stop_at_first_jump;
                }
                state = state.at_time(time);
                if stop {
                    snapshots.push(snapshot(
                        &State::WaveFunction(state.clone()),
                        time,
                        partition_weights(&state, partition)?,
                    ));
                    return Ok((snapshots, jumps, State::WaveFunction(state)));
                }
            }
            DynamicsMode::Csl => {
                let noise = sample_noise(rng, state.grid(), dt);
                state = csl_step(&state, &noise, dt, params, &config.hamiltonian)?.at_time(time);
            }
        }
        let due = config.snapshot_every > 0 && step % config.snapshot_every == 0;
        if due || step == steps {
            snapshots.push(snapshot(
                &State::WaveFunction(state.clone()),
                time,
                partition_weights(&state, partition)?,
            ));
        }
    }
    Ok((snapshots, jumps, State::WaveFunction(state)))
}

/// Branch-level jump: pick a branch with its Born weight, the jumping
/// particle's region in proportion to that branch's occupancy, and a
/// center around that region; every branch is then reweighted by its
/// mean Gaussian overlap with the center.
pub fn branch_jump<R: Rng + ?Sized>(
    state: &BranchState,
    alpha: f64,
    rng: &mut R,
) -> Result<(BranchState, f64, u64)> {
    let weights = state.weights();
    let b = pick_index(&weights, rng.random());
    let occupancy = &state.branches()[b].occupancy;
    let occ: Vec<f64> = occupancy.iter().map(|&n| n as f64).collect();
    let r = pick_index(&occ, rng.random());
    // Label the jumping particle by its position in the branch's
    // region-ordered particle list.
    let before: u64 = occupancy[..r].iter().sum();
    let particle = before + rng.random_range(0..occupancy[r]);
    let z: f64 = StandardNormal.sample(rng);
    let center = state.regions()[r].center + alpha * z;

    let n = state.particle_count() as f64;
    let log_overlap: Vec<f64> = state
        .branches()
        .iter()
        .map(|br| {
            let terms: Vec<f64> = br
                .occupancy
                .iter()
                .zip(state.regions())
                .filter(|(&k, _)| k > 0)
                .map(|(&k, reg)| {
                    let d = (reg.center - center) / alpha;
                    (k as f64 / n).ln() - 0.5 * d * d
                })
                .collect();
            log_sum_exp(&terms)
        })
        .collect();
    let max = log_overlap
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let new_weights: Vec<f64> = weights
        .iter()
        .zip(&log_overlap)
        .map(|(w, l)| w * (l - max).exp())
        .collect();
    Ok((state.reweighted(&new_weights)?, center, particle))
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn evolve_branches(
    initial: &BranchState,
    params: &CollapseParameters,
    config: &TrajectoryConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Evolution> {
    let per_particle = mass_rate(initial.particle_mass(), params) * params.time_unit_scale;
    let total_rate = per_particle * initial.particle_count() as f64;
    let snapshot_dt = if config.snapshot_every > 0 {
        config.dt * config.snapshot_every as f64
    } else {
        f64::INFINITY
    };
    let mut state = initial.clone();
    let mut snapshots = vec![snapshot(&State::Branch(state.clone()), 0.0, state.weights())];
    let mut jumps = Vec::new();
    let mut next_snapshot = snapshot_dt;
    let mut time = 0.0;
    let waiting = (total_rate > 0.0)
        .then(|| Exp::new(total_rate).map_err(|e| Error::Parameter(e.to_string())))
        .transpose()?;

    loop {
        let next_jump = match &waiting {
            Some(w) => time + w.sample(rng),
            None => f64::INFINITY,
        };
        let horizon = next_jump.min(config.t_final);
        while next_snapshot < horizon {
            snapshots.push(snapshot(&State::Branch(state.clone()), next_snapshot, state.weights()));
            next_snapshot += snapshot_dt;
        }
        if next_jump > config.t_final {
            break;
        }
        time = next_jump;
        let pre = state.weights();
        let (post, center, particle) = branch_jump(&state, params.alpha_length, rng)?;
        state = post;
        jumps.push(JumpEvent {
            time,
            particle,
            center,
            pre_jump_branch_weights: pre,
        });
        if config.stop_at_first_jump {
            snapshots.push(snapshot(&State::Branch(state.clone()), time, state.weights()));
            return Ok((snapshots, jumps, State::Branch(state)));
        }
    }
    let last = snapshots.last().map(|s| s.time).unwrap_or(0.0);
    if config.t_final > last {
        snapshots.push(snapshot(&State::Branch(state.clone()), config.t_final, state.weights()));
    }
    Ok((snapshots, jumps, State::Branch(state)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ParticleSpec, Region, SpatialGrid};
    use approx::assert_abs_diff_eq;

    fn plus(n: u64) -> BranchState {
        BranchState::equal_superposition(
            Region::new("A", -10.0, 1.0).unwrap(),
            Region::new("B", 10.0, 1.0).unwrap(),
            n,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_rate_is_purely_unitary() {
        let g = SpatialGrid::spanning(-10.0, 10.0, 64).unwrap();
        let wf = WaveFunction::gaussian_with_momentum(g, ParticleSpec::nucleon("p"), 0.0, 1.0, 1.0).unwrap();
        let params = CollapseParameters::default().with_alpha(0.5).with_simulation_rate(0.0).unwrap();
        let cfg = TrajectoryConfig::new(1.0, 0.1, DynamicsMode::Jumps, 3)
            .with_hamiltonian(Hamiltonian::free())
            .with_snapshots(2);
        let rec = evolve_trajectory(&wf.clone().into(), &params, &cfg).unwrap();
        assert!(rec.jumps.is_empty());
        let mut expected = wf;
        for _ in 0..10 {
            expected = unitary_step(&expected, &Hamiltonian::free(), 0.1).unwrap();
        }
        let State::WaveFunction(fin) = &rec.final_state else { panic!() };
        for (a, b) in fin.amplitudes().iter().zip(expected.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
        let times: Vec<f64> = rec.snapshots.iter().map(|s| s.time).collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(times.len(), 6);
    }

    #[test]
    fn identical_seeds_give_identical_records() {
        let params = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(0.05).unwrap();
        let cfg = TrajectoryConfig::new(10.0, 0.5, DynamicsMode::Jumps, 99).with_snapshots(4);
        let a = evolve_trajectory(&plus(20).into(), &params, &cfg).unwrap();
        let b = evolve_trajectory(&plus(20).into(), &params, &cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = evolve_trajectory(&plus(20).into(), &params, &cfg.clone().with_stream(1)).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn branch_jump_collapses_far_separated_branches() {
        let params = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(1.0).unwrap();
        let cfg = TrajectoryConfig::new(100.0, 1.0, DynamicsMode::Jumps, 5).stopping_at_first_jump();
        let rec = evolve_trajectory(&plus(10).into(), &params, &cfg).unwrap();
        let w = rec.final_branch_weights();
        assert!(w.iter().any(|&x| x > 1.0 - 1e-12), "weights {w:?}");
        assert_eq!(rec.jumps.len(), 1);
        assert_eq!(rec.jumps[0].pre_jump_branch_weights.len(), 2);
    }

    #[test]
    fn csl_on_branch_state_is_rejected() {
        let params = CollapseParameters::default();
        let cfg = TrajectoryConfig::new(1.0, 0.1, DynamicsMode::Csl, 1);
        assert!(evolve_trajectory(&plus(2).into(), &params, &cfg).is_err());
    }

    #[test]
    fn jumps_csv_layout() {
        let params = CollapseParameters::default().with_alpha(1.0).with_simulation_rate(1.0).unwrap();
        let cfg = TrajectoryConfig::new(100.0, 1.0, DynamicsMode::Jumps, 5).stopping_at_first_jump();
        let rec = evolve_trajectory(&plus(10).into(), &params, &cfg).unwrap();
        let mut buf = Vec::new();
        rec.write_jumps_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,particle,center\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
