// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mass-density collapse dynamics at desk scale.
//!
//! The crate computes the mass-density field 𝓜 of a quantum state, its
//! variance 𝓥 and the accessibility ratio 𝓡 = √𝓥/𝓜, classifies mass as
//! accessible when 𝓡 falls below a threshold η, and ascribes degree-valued
//! properties from squared projections. States come in two tiers:
//! exact wavefunctions of up to three particles on a 1D grid, and branch
//! states for macroscopic particle numbers. GRW jumps and continuous
//! mass-density collapse evolve either tier.
//!
//! The named scenarios in [`experiments`] each produce a JSON report with
//! pass/fail checks; see the crate's `examples/` directory for one
//! runnable program per scenario.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod massdensity;
pub mod plot;
pub mod state;

pub use error::{Error, Result};
