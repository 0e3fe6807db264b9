//! Experiment orchestration: configuration, exact estimand oracles,
//! tomography post-processing, experiment runners and report emission.
//!
//! The harness layer is concrete over `f64`; configs and reports carry
//! plain floats so the serialized artifacts are stable across builds.

pub mod config;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod tomography;

pub use config::{
    BetaMode, ChannelConfig, ChannelKind, ExperimentConfig, ExperimentKind, NoiseConfig,
    TeleportConfig,
};
pub use oracle::{expectation_estimand, parity_estimand, purity_estimand, weighted_estimand};
pub use report::{
    emit_report, parse_report, report_to_csv, report_to_json, CsvTabular, ReportEnvelope,
    ReportFormat,
};
pub use runner::{
    run_classification, run_entropy_experiment, run_oracle_experiment, run_resolved_experiment,
    run_teleport_experiment, ClassificationReport, EntropyReport, OracleReport, ResolvedReport,
    TeleportReport,
};
pub use tomography::{corrected_fidelity, tomography, Fidelity, TomographyResult};
