//! Declarative experiment configuration.
//!
//! A config is a single TOML document: top-level scalars select the
//! experiment, resource and sampling budget, a `[teleport]` table holds
//! the sweep grid, and an optional `[noise]` table holds per-gate-class
//! channels plus readout bias. Every field has a default except
//! `experiment`, so the minimal config is one line.

use crate::circuits::PerturbationKind;
use crate::error::{Error, Result};
use crate::noise::{dephasing_channel, depolarizing_channel, BiasVariant, NoiseModel};
use crate::state::{KrausChannel, DEFAULT_MAX_QUBITS};
use crate::symmetry::{Boundary, ResourceKind};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which experiment a config drives. Matches the CLI subcommand names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Two-copy purity scan over subsystem sizes.
    Entropy,
    /// Parity-sector-resolved moments over subsystem sizes.
    Resolved,
    /// Wire-teleportation fidelity sweep over the perturbation angle.
    Teleport,
    /// Symmetry classification of the configured noise model.
    ClassifyNoise,
    /// Exact density-matrix reference data, no sampling.
    Oracle,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::Resolved => "resolved",
            ExperimentKind::Teleport => "teleport",
            ExperimentKind::ClassifyNoise => "classify-noise",
            ExperimentKind::Oracle => "oracle",
        })
    }
}

/// Sign relation tying the wire angle to the perturbation angle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    #[default]
    PlusAlpha,
    MinusAlpha,
}

/// Sweep grid and perturbation family for the teleport experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeleportConfig {
    #[serde(default = "default_perturbation")]
    pub kind: PerturbationKind,
    #[serde(default)]
    pub beta_mode: BetaMode,
    /// Number of uniformly spaced angles, endpoints included.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub alpha_start: f64,
    #[serde(default = "default_alpha_end")]
    pub alpha_end: f64,
}

impl Default for TeleportConfig {
    fn default() -> Self {
        TeleportConfig {
            kind: default_perturbation(),
            beta_mode: BetaMode::default(),
            points: default_points(),
            alpha_start: 0.0,
            alpha_end: default_alpha_end(),
        }
    }
}

/// Built-in channel families selectable from a config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Dephasing,
    Depolarizing,
}

/// One per-gate-class channel assignment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub p: f64,
}

impl ChannelConfig {
    pub fn build(&self) -> Result<KrausChannel<f64>> {
        match self.kind {
            ChannelKind::Dephasing => dephasing_channel(self.p),
            ChannelKind::Depolarizing => depolarizing_channel(self.p),
        }
    }
}

/// Noise-model section of a config file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(default)]
    pub one_qubit: Option<ChannelConfig>,
    #[serde(default)]
    pub two_qubit: Option<ChannelConfig>,
    #[serde(default)]
    pub readout_bias: f64,
    #[serde(default)]
    pub bias_variant: BiasVariant,
}

impl NoiseConfig {
    pub fn build(&self) -> Result<NoiseModel<f64>> {
        let one = self.one_qubit.map(|c| c.build()).transpose()?;
        let two = self.two_qubit.map(|c| c.build()).transpose()?;
        NoiseModel::new(one, two, self.readout_bias, self.bias_variant)
    }
}

/// Full run description for one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_resource")]
    pub resource: ResourceKind,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    /// Shots per executed circuit.
    #[serde(default = "default_shots")]
    pub shots: usize,
    /// Independent repetitions; standard errors are computed across runs
    /// when there is more than one.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub teleport: TeleportConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
}

fn default_perturbation() -> PerturbationKind {
    PerturbationKind::Symmetric
}
fn default_points() -> usize {
    21
}
fn default_alpha_end() -> f64 {
    std::f64::consts::PI
}
fn default_resource() -> ResourceKind {
    ResourceKind::Cluster
}
fn default_l() -> usize {
    4
}
fn default_boundary() -> Boundary {
    Boundary::Open
}
fn default_shots() -> usize {
    8192
}
fn default_runs() -> usize {
    10
}
fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    /// Parses and validates a TOML config document.
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("config serialize: {e}")))
    }

    /// Checks the cross-field invariants; called after parsing and again
    /// after CLI overrides are applied.
    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::ChainTooShort(self.l));
        }
        if self.shots < 100 {
            return Err(Error::Config(
                "shots must be at least 100 for statistical outputs".into(),
            ));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        let qubits_needed = match self.experiment {
            ExperimentKind::Entropy | ExperimentKind::Resolved => 2 * self.l,
            ExperimentKind::Oracle | ExperimentKind::ClassifyNoise => self.l,
            ExperimentKind::Teleport => 5,
        };
        if qubits_needed > DEFAULT_MAX_QUBITS {
            return Err(Error::QubitLimitExceeded {
                requested: qubits_needed,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        if self.experiment == ExperimentKind::Teleport {
            let t = &self.teleport;
            if t.points == 0 {
                return Err(Error::Config("teleport grid must be nonempty".into()));
            }
            if !t.alpha_start.is_finite() || !t.alpha_end.is_finite() {
                return Err(Error::Config("teleport angles must be finite".into()));
            }
            if t.alpha_end < t.alpha_start {
                return Err(Error::Config(
                    "teleport alpha_end must not precede alpha_start".into(),
                ));
            }
        }
        // Surfaces bad channel probabilities and bias values at load time.
        self.noise_model()?;
        Ok(())
    }

    /// Builds the configured noise model, `None` when no `[noise]` table
    /// is present.
    pub fn noise_model(&self) -> Result<Option<NoiseModel<f64>>> {
        self.noise.as_ref().map(|n| n.build()).transpose()
    }

    /// Uniform inclusive grid of perturbation angles.
    pub fn alpha_grid(&self) -> Vec<f64> {
        let t = &self.teleport;
        if t.points == 1 {
            return vec![t.alpha_start];
        }
        let step = (t.alpha_end - t.alpha_start) / (t.points - 1) as f64;
        (0..t.points).map(|i| t.alpha_start + step * i as f64).collect()
    }

    pub fn beta_for(&self, alpha: f64) -> f64 {
        match self.teleport.beta_mode {
            BetaMode::PlusAlpha => alpha,
            BetaMode::MinusAlpha => -alpha,
        }
    }
}
