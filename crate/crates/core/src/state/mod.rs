// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum states in two tiers: exact small-N wavefunctions on a grid and
//! symbolic branch/occupancy states for macroscopic particle numbers.
//!
//! The particle-number operator is realized by counting: for a
//! wavefunction, the occupancy of cell `r` is the number of particles
//! whose cell index equals `r`; for a branch state it is read off each
//! branch's occupancy map.

mod branch;
mod grid;
mod partition;
mod wave;

pub use branch::{Branch, BranchState, Region};
pub use grid::{ParticleSpec, SpatialGrid};
pub use partition::{Determinate, MassObservablePartition};
pub use wave::{normalize, product_state, superpose, WaveFunction, MAX_PARTICLES};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Either tier of state, as stored in JSON fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum State {
    WaveFunction(WaveFunction),
    Branch(BranchState),
}

impl State {
    pub fn total_mass(&self) -> f64 {
        match self {
            State::WaveFunction(wf) => wf.total_mass(),
            State::Branch(bs) => bs.total_mass(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl From<WaveFunction> for State {
    fn from(wf: WaveFunction) -> Self {
        State::WaveFunction(wf)
    }
}

impl From<BranchState> for State {
    fn from(bs: BranchState) -> Self {
        State::Branch(bs)
    }
}
