//! Command-line front end.
//!
//! Builds an [`ExperimentConfig`] from an optional TOML file plus flag
//! overrides, runs the experiment named by the subcommand, and writes the
//! report under the output directory (`--out`, else `$SPTSIM_OUT`, else the
//! working directory).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sptsim::harness::{
    emit_report, run_classification, run_entropy_experiment, run_oracle_experiment,
    run_resolved_experiment, run_teleport_experiment, CsvTabular, ExperimentConfig,
    ExperimentKind, NoiseConfig, ReportEnvelope, ReportFormat,
};
use sptsim::{Error, Result};

#[derive(Parser)]
#[command(name = "sptsim", version, about = "Cluster-state entanglement and teleportation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Second Rényi entropy per subsystem cut, from two-copy overlap tests.
    Entropy,
    /// Symmetry-resolved entanglement moments per parity sector.
    Resolved,
    /// Wire-teleportation fidelity sweep over the perturbation angle.
    Teleport,
    /// Classify configured noise as symmetry preserving or breaking.
    ClassifyNoise,
    /// Exact spectra and entropies from the density-matrix path, no sampling.
    Oracle,
}

impl Command {
    fn experiment(&self) -> ExperimentKind {
        match self {
            Command::Entropy => ExperimentKind::Entropy,
            Command::Resolved => ExperimentKind::Resolved,
            Command::Teleport => ExperimentKind::Teleport,
            Command::ClassifyNoise => ExperimentKind::ClassifyNoise,
            Command::Oracle => ExperimentKind::Oracle,
        }
    }
}

#[derive(Args)]
struct Overrides {
    /// Experiment config file (TOML); defaults apply when omitted. The
    /// subcommand always decides the experiment kind.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shots per executed circuit.
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// Independent repetitions aggregated into the standard error.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Noise description file (TOML), or "none" to strip configured noise.
    #[arg(long, global = true, value_name = "FILE|none")]
    noise: Option<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", env = "SPTSIM_OUT")]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, default_value = "json")]
    format: ReportFormat,
}

fn load_config(command: &Command, overrides: &Overrides) -> Result<ExperimentConfig> {
    // Parse without validating so that a flag can repair a value the file
    // gets wrong; the merged config is validated once at the end.
    let mut cfg: ExperimentConfig = match &overrides.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("config parse: {e}")))?
        }
        None => toml::from_str(&format!("experiment = \"{}\"", command.experiment()))
            .map_err(|e| Error::Config(format!("config parse: {e}")))?,
    };
    cfg.experiment = command.experiment();
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(shots) = overrides.shots {
        cfg.shots = shots;
    }
    if let Some(runs) = overrides.runs {
        cfg.runs = runs;
    }
    match overrides.noise.as_deref() {
        None => {}
        Some("none") => cfg.noise = None,
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let noise: NoiseConfig =
                toml::from_str(&text).map_err(|e| Error::Config(format!("noise parse: {e}")))?;
            cfg.noise = Some(noise);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit<D: Serialize + CsvTabular>(
    cfg: &ExperimentConfig,
    data: D,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<PathBuf> {
    emit_report(&ReportEnvelope::new(cfg, data), format, out_dir)
}

fn run(cli: &Cli) -> Result<PathBuf> {
    let cfg = load_config(&cli.command, &cli.overrides)?;
    let out_dir = cli
        .overrides
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let format = cli.overrides.format;
    match cfg.experiment {
        ExperimentKind::Entropy => emit(&cfg, run_entropy_experiment(&cfg)?, format, &out_dir),
        ExperimentKind::Resolved => emit(&cfg, run_resolved_experiment(&cfg)?, format, &out_dir),
        ExperimentKind::Teleport => emit(&cfg, run_teleport_experiment(&cfg)?, format, &out_dir),
        ExperimentKind::ClassifyNoise => emit(&cfg, run_classification(&cfg)?, format, &out_dir),
        ExperimentKind::Oracle => emit(&cfg, run_oracle_experiment(&cfg)?, format, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
