// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use serde::Serialize;

use super::field::MassDensityField;
use crate::error::Result;

#[derive(Serialize)]
struct FieldRow<'a> {
    label: &'a str,
    cell_center: f64,
    mean: f64,
    variance: f64,
    ratio: Option<f64>,
    accessible: bool,
}

/// Writes `label,cell_center,mean,variance,ratio,accessible` rows; an
/// undefined ratio is an empty field. `mean` is the density 𝓜.
pub fn write_field_csv<W: Write>(field: &MassDensityField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for i in 0..field.len() {
        w.serialize(FieldRow {
            label: &field.layout.labels[i],
            cell_center: field.layout.centers[i],
            mean: field.density[i],
            variance: field.variance[i],
            ratio: field.ratio[i],
            accessible: field.accessible[i],
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn field_csv_string(field: &MassDensityField) -> Result<String> {
    let mut buf = Vec::new();
    write_field_csv(field, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// JSON document with the threshold and mass floor alongside the data.
pub fn field_json(field: &MassDensityField) -> Result<String> {
    Ok(serde_json::to_string_pretty(field)?)
}
