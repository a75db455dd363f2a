// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::ParticleSpec;

/// Collapse constants.
///
/// `lambda_base` is a physical rate (s⁻¹). One simulation time unit
/// corresponds to `time_unit_scale` physical seconds, so the rate used by
/// the simulation is `lambda_base · time_unit_scale`; `time_unit_scale`
/// is therefore also the λ amplification factor reported in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollapseParameters {
    /// Localization accuracy α (length units of the grid).
    pub alpha_length: f64,
    /// Per-nucleon localization rate λ.
    pub lambda_base: f64,
    /// m₀; masses are measured in these units.
    pub reference_mass: f64,
    /// λ_k = λ · (m_k / m₀)^exponent.
    pub rate_mass_exponent: f64,
    /// γ, strength of the continuous (CSL) coupling.
    pub csl_gamma: f64,
    /// Scale of the stochastic increment in the continuous dynamics.
    pub noise_amplitude: f64,
    pub time_unit_scale: f64,
}

impl Default for CollapseParameters {
    fn default() -> Self {
        Self {
            alpha_length: 1e-7,
            lambda_base: 1e-16,
            reference_mass: 1.0,
            rate_mass_exponent: 1.0,
            csl_gamma: 0.0,
            noise_amplitude: 1.0,
            time_unit_scale: 1.0,
        }
    }
}

impl CollapseParameters {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Parameter(format!("{what} = {v}")));
        if !(self.alpha_length > 0.0) || !self.alpha_length.is_finite() {
            return bad("alpha_length must be > 0", self.alpha_length);
        }
        if !(self.lambda_base >= 0.0) || !self.lambda_base.is_finite() {
            return bad("lambda_base must be >= 0", self.lambda_base);
        }
        if !(self.reference_mass > 0.0) || !self.reference_mass.is_finite() {
            return bad("reference_mass must be > 0", self.reference_mass);
        }
        if !self.rate_mass_exponent.is_finite() {
            return bad("rate_mass_exponent must be finite", self.rate_mass_exponent);
        }
        if !(self.csl_gamma >= 0.0) || !self.csl_gamma.is_finite() {
            return bad("csl_gamma must be >= 0", self.csl_gamma);
        }
        if !(self.noise_amplitude >= 0.0) || !self.noise_amplitude.is_finite() {
            return bad("noise_amplitude must be >= 0", self.noise_amplitude);
        }
        if !(self.time_unit_scale > 0.0) || !self.time_unit_scale.is_finite() {
            return bad("time_unit_scale must be > 0", self.time_unit_scale);
        }
        Ok(())
    }

    /// Parameters whose simulation-time rate per nucleon is `rate`,
    /// keeping the physical `lambda_base` and recording the amplification.
    pub fn with_simulation_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::Parameter(format!("simulation rate must be >= 0, got {rate}")));
        }
        if rate == 0.0 {
            self.lambda_base = 0.0;
            return Ok(self);
        }
        if self.lambda_base == 0.0 {
            self.lambda_base = 1e-16;
        }
        self.time_unit_scale = rate / self.lambda_base;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_length = alpha;
        self
    }

    pub fn with_csl(mut self, gamma: f64, noise_amplitude: f64) -> Self {
        self.csl_gamma = gamma;
        self.noise_amplitude = noise_amplitude;
        self
    }

    /// λ amplification factor relative to physical time.
    pub fn lambda_amplification(&self) -> f64 {
        self.time_unit_scale
    }
}

/// Physical localization rate of `particle`: `λ · (m / m₀)^exponent`.
pub fn effective_rate(particle: &ParticleSpec, params: &CollapseParameters) -> f64 {
    mass_rate(particle.mass, params)
}

pub(crate) fn mass_rate(mass: f64, params: &CollapseParameters) -> f64 {
    params.lambda_base * (mass / params.reference_mass).powf(params.rate_mass_exponent)
}

/// Rate per simulation time unit.
pub fn simulation_rate(particle: &ParticleSpec, params: &CollapseParameters) -> f64 {
    effective_rate(particle, params) * params.time_unit_scale
}
