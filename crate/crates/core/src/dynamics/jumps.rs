// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! GRW spontaneous localization.
//!
//! A jump of particle `k` at center `x_c` multiplies the wavefunction by
//! `exp(-(x_k - x_c)² / (4α²))`, so that a flat state ends up with a
//! position density of standard deviation α. Centers are drawn from
//! `⟨ψ|L_k(x_c)†L_k(x_c)|ψ⟩ = ∫ P_k(x) N(x_c; x, α²) dx`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::params::{simulation_rate, CollapseParameters};
use crate::error::{Error, Result};
use crate::state::WaveFunction;

/// Upper bound on `Σ_k λ_k dt` per step.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// Smallest norm² a localized state may have before renormalization.
pub const NORM_FLOOR: f64 = 1e-300;

const MAX_CENTER_DRAWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    pub particle: u64,
    pub center: f64,
    /// Branch (or determinate) weights just before the jump; empty when
    /// the trajectory does not track a partition.
    #[serde(default)]
    pub pre_jump_branch_weights: Vec<f64>,
}

/// Draws the jumps occurring during a step of width `dt`. Each particle
/// jumps independently with probability `λ_k dt`; all centers are drawn
/// from the pre-step state. Event times are uniform within the step.
pub fn sample_jumps<R: Rng + ?Sized>(
    state: &WaveFunction,
    dt: f64,
    params: &CollapseParameters,
    rng: &mut R,
) -> Result<Vec<JumpEvent>> {
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    let rates: Vec<f64> = state
        .particles()
        .iter()
        .map(|p| simulation_rate(p, params))
        .collect();
    let total: f64 = rates.iter().sum::<f64>() * dt;
    if total >= MAX_JUMP_PROBABILITY {
        return Err(Error::StepTooLarge {
            probability: total,
            limit: MAX_JUMP_PROBABILITY,
        });
    }
    let mut events = Vec::new();
    for (k, rate) in rates.iter().enumerate() {
        if *rate == 0.0 {
            continue;
        }
        if rng.random::<f64>() < rate * dt {
            let time = state.time() + rng.random::<f64>() * dt;
            let center = draw_center(state, k, params.alpha_length, rng)?;
            events.push(JumpEvent {
                time,
                particle: k as u64,
                center,
                pre_jump_branch_weights: Vec::new(),
            });
        }
    }
    Ok(events)
}

/// Samples a collapse center for particle `k` with the Born weighting.
/// The cell density is treated as piecewise constant; centers falling
/// outside the grid are redrawn.
pub fn draw_center<R: Rng + ?Sized>(
    state: &WaveFunction,
    k: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<f64> {
    let probs = state.marginal_probabilities(k)?;
    let grid = state.grid();
    let dx = grid.cell_width();
    for _ in 0..MAX_CENTER_DRAWS {
        let u: f64 = rng.random();
        let cell = pick_index(&probs, u);
        let x = grid.center(cell) + (rng.random::<f64>() - 0.5) * dx;
        let z: f64 = StandardNormal.sample(rng);
        let center = x + alpha * z;
        if grid.contains(center) {
            return Ok(center);
        }
    }
    Err(Error::Parameter(format!(
        "could not draw a collapse center inside the grid; alpha = {alpha} is too wide for it"
    )))
}

/// Inverse-CDF pick over unnormalized weights.
pub(crate) fn pick_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_nonzero = i;
        }
        acc += w;
        if target < acc {
            return i;
        }
    }
    last_nonzero
}

/// Multiplies particle `k`'s coordinate by the localization Gaussian
/// centered at `center` and renormalizes.
pub fn apply_localization(
    state: &WaveFunction,
    k: usize,
    center: f64,
    params: &CollapseParameters,
) -> Result<WaveFunction> {
    let n = state.particle_count();
    if k >= n {
        return Err(Error::Index { index: k, len: n });
    }
    if !state.grid().contains(center) {
        return Err(Error::Parameter(format!(
            "collapse center {center} lies outside the grid {:?}",
            state.grid().extent()
        )));
    }
    let alpha = params.alpha_length;
    let factors: Vec<f64> = state
        .grid()
        .centers()
        .iter()
        .map(|x| {
            let d = x - center;
            (-d * d / (4.0 * alpha * alpha)).exp()
        })
        .collect();
    let amps: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(idx, a)| a * factors[state.cell_of_particle(idx, k)])
        .collect();
    let norm_sq = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * state.volume_element();
    if !(norm_sq > NORM_FLOOR) {
        return Err(Error::ZeroState(format!(
            "localization at {center} leaves norm² {norm_sq}"
        )));
    }
    state.with_raw_amplitudes(amps, state.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ParticleSpec, SpatialGrid};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64, rate: f64) -> CollapseParameters {
        CollapseParameters::default()
            .with_alpha(alpha)
            .with_simulation_rate(rate)
            .unwrap()
    }

    #[test]
    fn zero_rate_never_jumps() {
        let g = SpatialGrid::spanning(-1.0, 1.0, 16).unwrap();
        let wf = WaveFunction::gaussian(g, ParticleSpec::nucleon("p"), 0.0, 0.2).unwrap();
        let p = params(0.1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert!(sample_jumps(&wf, 0.5, &p, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn oversized_step_is_refused() {
        let g = SpatialGrid::spanning(-1.0, 1.0, 16).unwrap();
        let wf = WaveFunction::gaussian(g, ParticleSpec::nucleon("p"), 0.0, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_jumps(&wf, 0.2, &params(0.1, 1.0), &mut rng).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn spike_is_unchanged() {
        let g = SpatialGrid::spanning(-1.0, 1.0, 20).unwrap();
        let wf = WaveFunction::cell_eigenstate(g.clone(), ParticleSpec::nucleon("p"), 7).unwrap();
        let out = apply_localization(&wf, 0, g.center(7), &params(0.1, 0.0)).unwrap();
        for (a, b) in wf.amplitudes().iter().zip(out.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn localization_outside_grid_or_of_missing_particle_fails() {
        let g = SpatialGrid::spanning(-1.0, 1.0, 20).unwrap();
        let wf = WaveFunction::cell_eigenstate(g, ParticleSpec::nucleon("p"), 7).unwrap();
        let p = params(0.1, 0.0);
        assert!(apply_localization(&wf, 0, 3.0, &p).is_err());
        assert!(matches!(apply_localization(&wf, 1, 0.0, &p), Err(Error::Index { .. })));
    }

    #[test]
    fn far_localization_of_spike_underflows() {
        let g = SpatialGrid::spanning(0.0, 100.0, 100).unwrap();
        let wf = WaveFunction::cell_eigenstate(g, ParticleSpec::nucleon("p"), 0).unwrap();
        let err = apply_localization(&wf, 0, 99.5, &params(0.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::ZeroState(_)));
    }

    #[test]
    fn pick_index_skips_zero_weights() {
        assert_eq!(pick_index(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(pick_index(&[0.0, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(pick_index(&[0.5, 0.0, 0.5], 0.75), 2);
    }
}
