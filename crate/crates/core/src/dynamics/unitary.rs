// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Spectral split-step propagation (ħ = 1) on the periodic grid.
//!
//! `H = Σ_k p_k² / (2 m_k) + Σ_k V(x_k)`, Strang-split as
//! `e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}`. The kinetic factor is applied
//! exactly in momentum space along each particle's axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::WaveFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Hamiltonian {
    /// Include the free kinetic term.
    pub kinetic: bool,
    /// External potential sampled at cell centers, felt by every particle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
}

impl Hamiltonian {
    pub fn zero() -> Self {
        Self {
            kinetic: false,
            potential: None,
        }
    }

    pub fn free() -> Self {
        Self {
            kinetic: true,
            potential: None,
        }
    }

    pub fn with_potential(mut self, potential: Vec<f64>) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn is_zero(&self) -> bool {
        !self.kinetic && self.potential.as_ref().is_none_or(|v| v.iter().all(|&x| x == 0.0))
    }
}

pub fn unitary_step(state: &WaveFunction, hamiltonian: &Hamiltonian, dt: f64) -> Result<WaveFunction> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    let time = state.time() + dt;
    if hamiltonian.is_zero() {
        return Ok(state.clone().at_time(time));
    }
    let cells = state.grid().cell_count();
    let mut amps = state.amplitudes().to_vec();

    let potential_phase = match &hamiltonian.potential {
        Some(v) => {
            if v.len() != cells {
                return Err(Error::Parameter(format!(
                    "potential has {} samples for {} cells",
                    v.len(),
                    cells
                )));
            }
            Some(potential_phases(state, v, 0.5 * dt))
        }
        None => None,
    };

    if let Some(phase) = &potential_phase {
        for (a, p) in amps.iter_mut().zip(phase) {
            *a *= p;
        }
    }
    if hamiltonian.kinetic {
        kinetic_step(state, &mut amps, dt);
    }
    if let Some(phase) = &potential_phase {
        for (a, p) in amps.iter_mut().zip(phase) {
            *a *= p;
        }
    }
    state.with_raw_amplitudes(amps, time)
}

fn potential_phases(state: &WaveFunction, v: &[f64], dt: f64) -> Vec<Complex64> {
    let n = state.particle_count();
    (0..state.amplitudes().len())
        .map(|idx| {
            let e: f64 = (0..n).map(|k| v[state.cell_of_particle(idx, k)]).sum();
            Complex64::from_polar(1.0, -e * dt)
        })
        .collect()
}

/// Angular wavenumbers in FFT order.
pub(crate) fn wavenumbers(cells: usize, dx: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (cells as f64 * dx);
    (0..cells)
        .map(|j| {
            let j = if j < cells.div_ceil(2) { j as f64 } else { j as f64 - cells as f64 };
            j * dk
        })
        .collect()
}

fn kinetic_step(state: &WaveFunction, amps: &mut [Complex64], dt: f64) {
    let cells = state.grid().cell_count();
    let k = wavenumbers(cells, state.grid().cell_width());
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(cells);
    let inv = planner.plan_fft_inverse(cells);
    let scale = 1.0 / cells as f64;
    let mut line = vec![Complex64::new(0.0, 0.0); cells];

    for (axis, particle) in state.particles().iter().enumerate() {
        let phase: Vec<Complex64> = k
            .iter()
            .map(|&kj| Complex64::from_polar(scale, -kj * kj / (2.0 * particle.mass) * dt))
            .collect();
        let stride = state.stride(axis);
        let block = stride * cells;
        for base in (0..amps.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = amps[start + j * stride];
                }
                fwd.process(&mut line);
                for (slot, p) in line.iter_mut().zip(&phase) {
                    *slot *= p;
                }
                inv.process(&mut line);
                for (j, slot) in line.iter().enumerate() {
                    amps[start + j * stride] = *slot;
                }
            }
        }
    }
}

/// `|ψ̃(k)|²` for a single-particle state (unnormalized FFT power).
pub fn momentum_distribution(state: &WaveFunction) -> Vec<f64> {
    let cells = state.grid().cell_count();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(cells);
    let mut out = vec![0.0; cells];
    let stride = state.stride(0);
    let mut line = vec![Complex64::new(0.0, 0.0); cells];
    for offset in 0..stride {
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = state.amplitudes()[offset + j * stride];
        }
        fwd.process(&mut line);
        for (acc, a) in out.iter_mut().zip(&line) {
            *acc += a.norm_sqr();
        }
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{product_state, ParticleSpec, SpatialGrid};
    use approx::assert_abs_diff_eq;

    fn packet() -> WaveFunction {
        let g = SpatialGrid::spanning(-20.0, 20.0, 256).unwrap();
        WaveFunction::gaussian_with_momentum(g, ParticleSpec::nucleon("p"), -2.0, 1.0, 1.5).unwrap()
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let wf = packet();
        let out = unitary_step(&wf, &Hamiltonian::zero(), 0.7).unwrap();
        assert_eq!(out.amplitudes(), wf.amplitudes());
        assert_eq!(out.time(), 0.7);
    }

    #[test]
    fn rejects_non_positive_dt() {
        assert!(matches!(
            unitary_step(&packet(), &Hamiltonian::free(), 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn free_step_preserves_norm_and_momentum() {
        let wf = packet();
        let before = momentum_distribution(&wf);
        let out = unitary_step(&wf, &Hamiltonian::free(), 0.5).unwrap();
        assert_abs_diff_eq!(out.norm_squared(), 1.0, epsilon = 1e-12);
        for (a, b) in before.iter().zip(momentum_distribution(&out)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn halved_steps_agree_with_potential() {
        let wf = packet();
        let v: Vec<f64> = wf.grid().centers().iter().map(|x| 0.05 * x * x).collect();
        let h = Hamiltonian::free().with_potential(v);
        let dt = 1e-3;
        let one = unitary_step(&wf, &h, dt).unwrap();
        let half = unitary_step(&unitary_step(&wf, &h, dt / 2.0).unwrap(), &h, dt / 2.0).unwrap();
        let diff = one
            .amplitudes()
            .iter()
            .zip(half.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "max amplitude difference {diff}");
    }

    #[test]
    fn two_particle_free_step_preserves_norm() {
        let g = SpatialGrid::spanning(-8.0, 8.0, 32).unwrap();
        let a = WaveFunction::gaussian(g.clone(), ParticleSpec::nucleon("a"), -2.0, 1.0).unwrap();
        let b = WaveFunction::gaussian(g, ParticleSpec::new("b", 2.0).unwrap(), 2.0, 1.0).unwrap();
        let wf = product_state(&[a.clone(), b.clone()]).unwrap();
        let h = Hamiltonian::free();
        let out = unitary_step(&wf, &h, 0.3).unwrap();
        assert_abs_diff_eq!(out.norm_squared(), 1.0, epsilon = 1e-12);
        // Without interactions each factor evolves independently.
        let expected = product_state(&[
            unitary_step(&a, &h, 0.3).unwrap(),
            unitary_step(&b, &h, 0.3).unwrap(),
        ])
        .unwrap();
        for (x, y) in out.amplitudes().iter().zip(expected.amplitudes()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-12);
        }
    }
}
