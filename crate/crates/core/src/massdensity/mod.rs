// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! The mass-density ontology: 𝓜, 𝓥, 𝓡, accessibility and degrees.

mod degree;
mod export;
mod field;

pub use degree::{
    degree_of, degree_threshold_for, indeterminacy_report, ComponentVerdict, DegreeEntry,
    DegreeProfile, Determinacy, IndeterminacyReport, SPLIT_LABEL,
};
pub use export::{field_csv_string, field_json, write_field_csv};
pub use field::{
    accessibility_ratio, analyze, branch_moments, classify_accessible, mass_density,
    mass_variance, moments, smear_density, wave_moments, wave_region_moments, Layout,
    MassDensityField, MassMoments, DEFAULT_THRESHOLD, MASS_FLOOR_FRACTION,
};
pub(crate) use field::check_threshold;
