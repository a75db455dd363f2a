// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution: unitary steps, GRW jumps and continuous collapse.

mod csl;
mod jumps;
mod params;
mod trajectory;
mod unitary;

pub use csl::{csl_step, sample_noise, NoiseField};
pub use jumps::{
    apply_localization, draw_center, sample_jumps, JumpEvent, MAX_JUMP_PROBABILITY, NORM_FLOOR,
};
pub use params::{effective_rate, simulation_rate, CollapseParameters};
pub use trajectory::{
    branch_jump, evolve_trajectory, DynamicsMode, Snapshot, TrajectoryConfig, TrajectoryRecord,
    TRAJECTORY_SCHEMA,
};
pub use unitary::{momentum_distribution, unitary_step, Hamiltonian};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream `stream` of master seed `seed`.
///
/// ChaCha's 64-bit stream id splits one key into independent,
/// non-overlapping sequences, so `(seed, index)` gives every trajectory of
/// an ensemble its own stream regardless of scheduling.
pub fn seed_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
