// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The state has (numerically) zero norm and cannot be normalized.
    #[error("zero state: {0}")]
    ZeroState(String),

    /// States that must share a grid / particle list do not.
    #[error("incompatible states: {0}")]
    IncompatibleState(String),

    #[error("product of an empty list of factors")]
    EmptyProduct,

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Σ_k λ_k·dt exceeded the allowed jump probability per step.
    #[error("time step too large: total jump probability {probability} per step exceeds {limit}")]
    StepTooLarge { probability: f64, limit: f64 },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serde(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Serde(err.to_string())
    }
}
