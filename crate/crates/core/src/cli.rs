// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 success (all checks passed), 1 some check failed,
//! 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    born_ensemble, first_jump_ensemble, run, BornParams, ExperimentName, ExperimentReport, ExperimentSpec,
    RateScalingParams,
};
use crate::massdensity::{
    analyze, degree_of, degree_threshold_for, indeterminacy_report, write_field_csv, DegreeProfile,
    IndeterminacyReport, MassDensityField, DEFAULT_THRESHOLD,
};
use crate::plot::report_svgs;
use crate::state::{MassObservablePartition, State};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED_CHECKS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "grwm", version, about = "Mass-density analysis of collapse models")]
pub struct Cli {
    /// Directory for output files; without it results go to stdout.
    #[arg(long, global = true, env = "GRWM_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Leave the wall-clock timestamp out of reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named experiment.
    Experiment(ExperimentArgs),
    /// Mass density, variance, ratio and accessibility of a saved state.
    Analyze(AnalyzeArgs),
    /// Threshold-sweep experiment with an explicit η grid.
    SweepThreshold(SweepArgs),
    /// Seeded trajectory ensemble; writes a manifest.
    Ensemble(EnsembleArgs),
    /// SVG charts for every series of a report.
    Plot(PlotArgs),
    /// List the available experiments.
    List,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON spec file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Worker threads (0 = one per core); never changes results.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Scenario parameter override, `key=value` with a JSON value.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub name: Option<ExperimentName>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated thresholds, each in (0, 1].
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub state: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Partition JSON for a degree profile.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Attach a Gaussian-smeared density of this width.
    #[arg(long)]
    pub smear: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    /// Two-outcome state stopped at the first jump.
    Born,
    /// First-jump times of the N-particle equal superposition.
    FirstJump,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(value_enum)]
    pub kind: EnsembleKind,
    #[arg(long, default_value_t = 10_000)]
    pub trajectories: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub particles: u64,
    /// Weight of the "all in A" branch (born).
    #[arg(long, default_value_t = 0.5)]
    pub weight: f64,
    /// Simulation-time rate per particle.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 0)]
    pub parallelism: usize,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub report: PathBuf,
}

/// Parses `args` (including the program name), runs, and returns the
/// exit code. Results go to `out` unless an output directory is set.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Experiment(a) => {
            let spec = build_spec(a.name, &a.run, None)?;
            emit_report(cli, run(&spec)?, out)
        }
        Command::SweepThreshold(a) => {
            let etas = a.etas.as_ref().map(|e| serde_json::json!(e));
            let spec = build_spec(Some(ExperimentName::ThresholdSweep), &a.run, etas)?;
            emit_report(cli, run(&spec)?, out)
        }
        Command::Analyze(a) => analyze_cmd(cli, a, out),
        Command::Ensemble(a) => ensemble_cmd(cli, a, out),
        Command::Plot(a) => {
            let report = ExperimentReport::from_json(&read(&a.report)?)?;
            let dir = cli.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;
            for (series, svg) in report_svgs(&report)? {
                let path = dir.join(format!("{}_{}.svg", report.name, series));
                fs::write(&path, svg)?;
                writeln!(out, "{}", path.display())?;
            }
            Ok(EXIT_PASS)
        }
        Command::List => {
            for n in ExperimentName::ALL {
                writeln!(out, "{n}")?;
            }
            Ok(EXIT_PASS)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Spec from the config file (if any), overridden by flags.
fn build_spec(name: Option<ExperimentName>, a: &RunArgs, etas: Option<serde_json::Value>) -> Result<ExperimentSpec> {
    let mut spec = match &a.config {
        Some(path) => {
            let mut v: serde_json::Value = serde_json::from_str(&read(path)?)?;
            if let (Some(n), Some(obj)) = (name, v.as_object_mut()) {
                obj.insert("name".into(), serde_json::to_value(n)?);
            }
            serde_json::from_value(v).map_err(|e| Error::Parameter(format!("config {}: {e}", path.display())))?
        }
        None => ExperimentSpec::new(name.ok_or_else(|| {
            Error::Parameter("experiment name missing (give it or a --config with a name)".into())
        })?),
    };
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(t) = a.threshold {
        spec.threshold = Some(t);
    }
    if let Some(p) = a.parallelism {
        spec.parallelism = p;
    }
    if spec.params.is_null() {
        spec.params = serde_json::json!({});
    }
    let params = spec
        .params
        .as_object_mut()
        .ok_or_else(|| Error::Parameter("params must be a JSON object".into()))?;
    if let Some(e) = etas {
        params.insert("etas".into(), e);
    }
    for kv in &a.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("--param expects key=value, got {kv}")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
        params.insert(k.trim().to_string(), value);
    }
    Ok(spec)
}

fn timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

fn emit_report(cli: &Cli, mut report: ExperimentReport, out: &mut dyn Write) -> Result<i32> {
    if !cli.no_timestamp {
        report.timestamp = Some(timestamp());
    }
    let code = if report.passed { EXIT_PASS } else { EXIT_FAILED_CHECKS };
    match cli.format {
        Format::Json => write_or_print(cli, &format!("{}.json", report.name), report.to_json()? + "\n", out)?,
        Format::Text => write_or_print(cli, &format!("{}.txt", report.name), report.summary_text(), out)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value"])?;
            for (k, v) in &report.measured {
                w.write_record([k.as_str(), &v.to_string()])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            write_or_print(cli, &format!("{}.csv", report.name), String::from_utf8_lossy(&bytes).into(), out)?;
        }
        Format::Svg => {
            for (series, svg) in report_svgs(&report)? {
                write_or_print(cli, &format!("{}_{series}.svg", report.name), svg, out)?;
            }
        }
    }
    Ok(code)
}

fn write_or_print(cli: &Cli, file: &str, content: String, out: &mut dyn Write) -> Result<()> {
    match &cli.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(file);
            fs::write(&path, content)?;
            writeln!(out, "{}", path.display())?;
        }
        None => out.write_all(content.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Analysis {
    field: MassDensityField,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_profile: Option<DegreeProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indeterminacy: Option<IndeterminacyReport>,
}

fn analyze_cmd(cli: &Cli, a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let state = State::from_json(&read(&a.state)?)?;
    let mut field = analyze(&state, a.threshold)?;
    if let Some(alpha) = a.smear {
        field = field.with_smearing(alpha)?;
    }
    let stem = a
        .state
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into());
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_field_csv(&field, &mut buf)?;
            write_or_print(cli, &format!("{stem}_field.csv"), String::from_utf8_lossy(&buf).into(), out)?;
        }
        Format::Json | Format::Text => {
            let (degree_profile, indeterminacy) = match &a.partition {
                Some(path) => {
                    let partition: MassObservablePartition = serde_json::from_str(&read(path)?)?;
                    let profile = degree_of(&state, &partition)?;
                    let verdict = indeterminacy_report(&profile, degree_threshold_for(a.threshold));
                    (Some(profile), Some(verdict))
                }
                None => (None, None),
            };
            let analysis = Analysis {
                field,
                degree_profile,
                indeterminacy,
            };
            let text = serde_json::to_string_pretty(&analysis)? + "\n";
            write_or_print(cli, &format!("{stem}_analysis.json"), text, out)?;
        }
        Format::Svg => {
            return Err(Error::Parameter(
                "analyze writes json or csv; plot a report for svg".into(),
            ))
        }
    }
    Ok(EXIT_PASS)
}

fn ensemble_cmd(cli: &Cli, a: &EnsembleArgs, out: &mut dyn Write) -> Result<i32> {
    let manifest = match a.kind {
        EnsembleKind::Born => {
            let p = BornParams {
                weights: vec![a.weight],
                particles: a.particles,
                ensemble: a.trajectories,
                rate: a.rate,
                ..BornParams::default()
            };
            born_ensemble(&p, a.weight, a.seed, a.parallelism)?
        }
        EnsembleKind::FirstJump => {
            let p = RateScalingParams {
                particle_counts: vec![a.particles],
                ensemble: a.trajectories,
                rate: a.rate,
                ..RateScalingParams::default()
            };
            first_jump_ensemble(&p, a.particles, a.seed, a.parallelism)?
        }
    };
    let code = if manifest.failures.is_empty() { EXIT_PASS } else { EXIT_FAILED_CHECKS };
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            manifest.write_digests_csv(&mut buf)?;
            write_or_print(cli, &format!("{}.csv", manifest.label), String::from_utf8_lossy(&buf).into(), out)?;
        }
        Format::Json | Format::Text => {
            write_or_print(cli, &format!("{}.json", manifest.label), manifest.to_json()? + "\n", out)?
        }
        Format::Svg => return Err(Error::Parameter("ensemble writes json or csv".into())),
    }
    Ok(code)
}
