// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded Monte Carlo ensembles.
//!
//! Trajectory `i` of an ensemble with master seed `s` draws from stream
//! `i` of `s` (see [`crate::dynamics::seed_rng`]). Results are stored by
//! index and aggregated in index order, so manifests do not depend on the
//! thread count or completion order.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_SCHEMA: &str = "grwm.ensemble/1";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Per-trajectory summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TrajectoryDigest {
    pub index: u64,
    pub seed: u64,
    pub stream: u64,
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
    /// SHA-256 over the digest's values and flags.
    #[serde(default)]
    pub hash: String,
}

/// What a trajectory reports back to the runner.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub values: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

impl Outcome {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.flags.insert(key.to_string(), v);
        self
    }
}

impl TrajectoryDigest {
    pub fn new(index: u64, seed: u64, stream: u64, outcome: Outcome) -> Self {
        let mut d = Self {
            index,
            seed,
            stream,
            values: outcome.values,
            flags: outcome.flags,
            hash: String::new(),
        };
        d.hash = content_hash(&(&d.values, &d.flags));
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFailure {
    pub index: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanStat {
    pub key: String,
    pub n: u64,
    pub mean: f64,
    /// Sample standard deviation over √n; absent for n = 1.
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyStat {
    pub key: String,
    pub n: u64,
    pub successes: u64,
    pub frequency: f64,
    /// Wilson score 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl FrequencyStat {
    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Statistics {
    pub means: Vec<MeanStat>,
    pub frequencies: Vec<FrequencyStat>,
}

impl Statistics {
    pub fn mean(&self, key: &str) -> Option<&MeanStat> {
        self.means.iter().find(|m| m.key == key)
    }

    pub fn frequency(&self, key: &str) -> Option<&FrequencyStat> {
        self.frequencies.iter().find(|f| f.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub schema_version: String,
    pub label: String,
    pub master_seed: u64,
    pub trajectory_count: u64,
    pub parameter_hash: String,
    pub parameters: serde_json::Value,
    pub digests: Vec<TrajectoryDigest>,
    pub failures: Vec<TrajectoryFailure>,
    pub aggregate: Statistics,
}

impl EnsembleManifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Digests as CSV: `index,seed,stream,hash` followed by every value
    /// and flag key in sorted order.
    pub fn write_digests_csv<W: Write>(&self, out: W) -> Result<()> {
        let value_keys: BTreeSet<&String> = self.digests.iter().flat_map(|d| d.values.keys()).collect();
        let flag_keys: BTreeSet<&String> = self.digests.iter().flat_map(|d| d.flags.keys()).collect();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["index".to_string(), "seed".into(), "stream".into(), "hash".into()];
        header.extend(value_keys.iter().map(|k| k.to_string()));
        header.extend(flag_keys.iter().map(|k| k.to_string()));
        w.write_record(&header)?;
        for d in &self.digests {
            let mut row = vec![d.index.to_string(), d.seed.to_string(), d.stream.to_string(), d.hash.clone()];
            row.extend(value_keys.iter().map(|k| d.values.get(*k).map(f64::to_string).unwrap_or_default()));
            row.extend(flag_keys.iter().map(|k| d.flags.get(*k).map(bool::to_string).unwrap_or_default()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn content_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    let digest = Sha256::digest(&bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs `trajectory(index, master_seed, stream)` for every index in
/// `0..n` on a pool of `parallelism` threads (0 = rayon default).
/// Failed trajectories are recorded and excluded from the aggregates.
pub fn run_ensemble<P, F>(
    label: &str,
    parameters: &P,
    n: u64,
    master_seed: u64,
    parallelism: usize,
    trajectory: F,
) -> Result<EnsembleManifest>
where
    P: Serialize + ?Sized,
    F: Fn(u64, u64, u64) -> Result<Outcome> + Sync,
{
    if n == 0 {
        return Err(Error::Parameter("ensemble needs at least one trajectory".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let results: Vec<(u64, Result<Outcome>)> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| (i, trajectory(i, master_seed, i)))
            .collect()
    });
    let mut digests = Vec::with_capacity(n as usize);
    let mut failures = Vec::new();
    for (i, r) in results {
        match r {
            Ok(outcome) => digests.push(TrajectoryDigest::new(i, master_seed, i, outcome)),
            Err(e) => failures.push(TrajectoryFailure {
                index: i,
                error: e.to_string(),
            }),
        }
    }
    let aggregate = if digests.is_empty() {
        Statistics::default()
    } else {
        aggregate(&digests)?
    };
    let parameters = serde_json::to_value(parameters)?;
    Ok(EnsembleManifest {
        schema_version: MANIFEST_SCHEMA.to_string(),
        label: label.to_string(),
        master_seed,
        trajectory_count: n,
        parameter_hash: content_hash(&parameters),
        parameters,
        digests,
        failures,
        aggregate,
    })
}

/// Means with standard errors for every value key and Wilson intervals
/// for every flag key. Digests are canonicalized by index first.
pub fn aggregate(digests: &[TrajectoryDigest]) -> Result<Statistics> {
    if digests.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut sorted: Vec<&TrajectoryDigest> = digests.iter().collect();
    sorted.sort_by_key(|d| d.index);

    let mut values: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut flags: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for d in &sorted {
        for (k, v) in &d.values {
            values.entry(k).or_default().push(*v);
        }
        for (k, v) in &d.flags {
            let e = flags.entry(k).or_default();
            e.0 += 1;
            e.1 += u64::from(*v);
        }
    }
    let means = values
        .into_iter()
        .map(|(key, xs)| mean_stat(key, &xs))
        .collect();
    let frequencies = flags
        .into_iter()
        .map(|(key, (n, k))| wilson(key, n, k))
        .collect();
    Ok(Statistics { means, frequencies })
}

fn mean_stat(key: &str, xs: &[f64]) -> MeanStat {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std_error = (xs.len() > 1).then(|| {
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    MeanStat {
        key: key.to_string(),
        n: xs.len() as u64,
        mean,
        std_error,
    }
}

pub fn wilson(key: &str, n: u64, successes: u64) -> FrequencyStat {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    FrequencyStat {
        key: key.to_string(),
        n,
        successes,
        frequency: p,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    }
}
