// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Continuous mass-density collapse.
//!
//! With `L_c = √(2γ)/m₀ · M_c` (`M_c` the cell-integrated mass operator)
//! the linear equation
//!
//! ```text
//! dφ = [-iH dt + Σ_c L_c dξ_c − Σ_c (γ/m₀²) M_c² dt] φ
//! ```
//!
//! is integrated with one exponential-Euler step per `dt`:
//! `φ ← exp(Σ_c L_c dξ_c − Σ_c L_c² dt) · U(dt) φ`, then renormalized.
//! The increment is `dξ_c = a·dB_c + 2⟨L_c⟩ dt` where `dB_c = v_c √dx dt`
//! comes from the white-noise sample `v_c` and `a` is `noise_amplitude`.
//! The `2⟨L_c⟩` drift weights realizations by their Born probability.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::params::CollapseParameters;
use super::unitary::{unitary_step, Hamiltonian};
use super::seed_rng;
use crate::error::{Error, Result};
use crate::state::{SpatialGrid, WaveFunction};

/// Discretized white noise: per step, one value per cell with mean 0 and
/// variance `1 / (cell_width · step_width)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseField {
    pub values: Vec<f64>,
    pub cells: usize,
    pub seed: u64,
    pub step_width: f64,
    pub cell_width: f64,
}

impl NoiseField {
    pub fn generate(grid: &SpatialGrid, steps: usize, step_width: f64, seed: u64) -> Result<Self> {
        if !(step_width > 0.0) {
            return Err(Error::Parameter(format!("step width must be positive, got {step_width}")));
        }
        let mut rng: ChaCha8Rng = seed_rng(seed, 0);
        let mut values = Vec::with_capacity(steps * grid.cell_count());
        for _ in 0..steps {
            values.extend(sample_noise(&mut rng, grid, step_width));
        }
        Ok(Self {
            values,
            cells: grid.cell_count(),
            seed,
            step_width,
            cell_width: grid.cell_width(),
        })
    }

    pub fn steps(&self) -> usize {
        self.values.len() / self.cells
    }

    pub fn step(&self, i: usize) -> &[f64] {
        &self.values[i * self.cells..(i + 1) * self.cells]
    }
}

/// One step's worth of noise values.
pub fn sample_noise<R: Rng + ?Sized>(rng: &mut R, grid: &SpatialGrid, step_width: f64) -> Vec<f64> {
    let sd = (grid.cell_width() * step_width).sqrt().recip();
    (0..grid.cell_count())
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

pub fn csl_step(
    state: &WaveFunction,
    noise: &[f64],
    dt: f64,
    params: &CollapseParameters,
    hamiltonian: &Hamiltonian,
) -> Result<WaveFunction> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    let grid = state.grid();
    let cells = grid.cell_count();
    if noise.len() != cells {
        return Err(Error::Parameter(format!(
            "noise slice has {} values for {} cells",
            noise.len(),
            cells
        )));
    }
    let evolved = unitary_step(state, hamiltonian, dt)?;
    if params.csl_gamma == 0.0 {
        return Ok(evolved);
    }

    let coupling = (2.0 * params.csl_gamma).sqrt() / params.reference_mass;
    let n = state.particle_count();
    let masses: Vec<f64> = state.particles().iter().map(|p| p.mass).collect();

    // ⟨L_c⟩ from the pre-step state.
    let mut mean_mass = vec![0.0; cells];
    for (k, m) in masses.iter().enumerate() {
        for (acc, p) in mean_mass.iter_mut().zip(state.marginal_probabilities(k)?) {
            *acc += m * p;
        }
    }
    let root_dx = grid.cell_width().sqrt();
    let dxi: Vec<f64> = noise
        .iter()
        .zip(&mean_mass)
        .map(|(v, mu)| params.noise_amplitude * v * root_dx * dt + 2.0 * coupling * mu * dt)
        .collect();

    let mut log_factor = Vec::with_capacity(evolved.amplitudes().len());
    let mut occupied = [(0usize, 0.0f64); crate::state::MAX_PARTICLES];
    for idx in 0..evolved.amplitudes().len() {
        // Group particle masses by cell for this configuration.
        let mut distinct = 0;
        for (k, m) in masses.iter().enumerate().take(n) {
            let c = evolved.cell_of_particle(idx, k);
            match occupied[..distinct].iter_mut().find(|(cell, _)| *cell == c) {
                Some((_, total)) => *total += m,
                None => {
                    occupied[distinct] = (c, *m);
                    distinct += 1;
                }
            }
        }
        let mut s = 0.0;
        for &(c, m) in &occupied[..distinct] {
            let l = coupling * m;
            s += l * dxi[c] - l * l * dt;
        }
        log_factor.push(s);
    }
    let max = log_factor
        .iter()
        .zip(evolved.amplitudes())
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(s, _)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let amps = evolved
        .amplitudes()
        .iter()
        .zip(&log_factor)
        .map(|(a, s)| a * (s - max).exp())
        .collect();
    evolved
        .with_raw_amplitudes(amps, evolved.time())
        .map_err(|e| match e {
            Error::ZeroState(msg) => Error::ZeroState(format!("csl step underflow: {msg}")),
            other => other,
        })
}
