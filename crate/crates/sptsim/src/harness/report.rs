//! Report envelopes and figure-ready emission.
//!
//! JSON carries the full envelope (schema version, config echo, data)
//! with stable key order, so identical configs and seeds produce
//! byte-identical files. CSV flattens the data section alone into a
//! fixed column schema per experiment for direct plotting.

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::runner::{
    ClassificationReport, EntropyReport, OracleReport, ResolvedReport, TeleportReport,
};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

/// Versioned wrapper around one experiment's data section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<D> {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub data: D,
}

impl<D> ReportEnvelope<D> {
    pub fn new(cfg: &ExperimentConfig, data: D) -> ReportEnvelope<D> {
        ReportEnvelope {
            schema_version: SCHEMA_VERSION,
            experiment: cfg.experiment.to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            data,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown report format {other:?}, expected json or csv"
            ))),
        }
    }
}

pub fn report_to_json<D: Serialize>(envelope: &ReportEnvelope<D>) -> Result<String> {
    let mut text = serde_json::to_string_pretty(envelope)
        .map_err(|e| Error::Config(format!("report serialize: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn parse_report<D: DeserializeOwned>(text: &str) -> Result<ReportEnvelope<D>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("report parse: {e}")))
}

/// Data sections that flatten into a fixed CSV column schema.
pub trait CsvTabular {
    fn csv_header() -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

pub fn report_to_csv<D: CsvTabular>(data: &D) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(D::csv_header())
        .map_err(|e| Error::Config(format!("csv write: {e}")))?;
    for row in data.csv_rows() {
        writer
            .write_record(&row)
            .map_err(|e| Error::Config(format!("csv write: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Config(format!("csv write: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv encoding: {e}")))
}

/// Writes `{experiment}.{json|csv}` under `out_dir` and returns the
/// path.
pub fn emit_report<D: Serialize + CsvTabular>(
    envelope: &ReportEnvelope<D>,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let (extension, contents) = match format {
        ReportFormat::Json => ("json", report_to_json(envelope)?),
        ReportFormat::Csv => ("csv", report_to_csv(&envelope.data)?),
    };
    let path = out_dir.join(format!("{}.{extension}", envelope.experiment));
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn num(x: f64) -> String {
    // Normalizes -0.0 so estimators that land exactly on zero from below
    // do not produce a signed zero cell.
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

impl CsvTabular for EntropyReport {
    fn csv_header() -> &'static [&'static str] {
        &["l_a", "estimate", "stderr", "oracle"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let (estimate, stderr) = match &row.neg_ln_s2 {
                    Some(e) => (num(e.value), num(e.std_error)),
                    None => (String::new(), String::new()),
                };
                let oracle = row.oracle_neg_ln_s2.map(num).unwrap_or_default();
                vec![row.l_a.to_string(), estimate, stderr, oracle]
            })
            .collect()
    }
}

impl CsvTabular for ResolvedReport {
    fn csv_header() -> &'static [&'static str] {
        &["l_a", "sector", "moment", "estimate", "stderr", "oracle"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (sector, oracle) in row.estimates.sectors.iter().zip(&row.oracle_sectors) {
                for (moment, est, target) in [
                    (1u32, &sector.s1, oracle.s1),
                    (2u32, &sector.s2, oracle.s2),
                ] {
                    out.push(vec![
                        row.estimates.l_a.to_string(),
                        format!("{:+}", sector.sector),
                        moment.to_string(),
                        num(est.value),
                        num(est.std_error),
                        num(target),
                    ]);
                }
            }
        }
        out
    }
}

impl CsvTabular for TeleportReport {
    fn csv_header() -> &'static [&'static str] {
        &["alpha", "state", "fidelity", "stderr", "oracle"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for point in &self.points {
            for s in &point.states {
                out.push(vec![
                    num(point.alpha),
                    s.label.clone(),
                    num(s.fidelity.value),
                    num(s.fidelity.std_error),
                    num(s.oracle),
                ]);
            }
            out.push(vec![
                num(point.alpha),
                "min".into(),
                num(point.f_min.value),
                num(point.f_min.std_error),
                num(point.oracle_f_min),
            ]);
        }
        out
    }
}

impl CsvTabular for ClassificationReport {
    fn csv_header() -> &'static [&'static str] {
        &["kind", "label", "l_a", "value", "stderr", "reference", "preserving"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for channel in &self.channels {
            let label = format!(
                "{}-{}-p{}",
                channel.gate_class,
                match channel.kind {
                    crate::harness::config::ChannelKind::Dephasing => "dephasing",
                    crate::harness::config::ChannelKind::Depolarizing => "depolarizing",
                },
                channel.p
            );
            for cut in &channel.cuts {
                out.push(vec![
                    "channel-witness".into(),
                    label.clone(),
                    cut.l_a.to_string(),
                    num(cut.witness),
                    String::new(),
                    num(self.tolerance),
                    cut.preserving.to_string(),
                ]);
            }
        }
        if let Some(bias) = &self.bias {
            let label = format!("bias-eps{}", bias.eps);
            for cut in &bias.cuts {
                out.push(vec![
                    "bias-witness".into(),
                    label.clone(),
                    cut.l_a.to_string(),
                    num(cut.witness),
                    String::new(),
                    num(self.tolerance),
                    cut.preserving.to_string(),
                ]);
            }
            for gap in &bias.gaps {
                out.push(vec![
                    "bias-gap".into(),
                    label.clone(),
                    gap.l_a.to_string(),
                    num(gap.sampled.value),
                    num(gap.sampled.std_error),
                    num(gap.predictions.sector_gap),
                    String::new(),
                ]);
            }
        }
        out
    }
}

impl CsvTabular for OracleReport {
    fn csv_header() -> &'static [&'static str] {
        &["l_a", "quantity", "sector", "n", "value"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for row in &self.rows {
            let l_a = row.l_a.to_string();
            for (i, value) in row.spectrum.iter().enumerate() {
                out.push(vec![
                    l_a.clone(),
                    "spectrum".into(),
                    String::new(),
                    i.to_string(),
                    num(*value),
                ]);
            }
            for (order, value) in &row.renyi {
                out.push(vec![
                    l_a.clone(),
                    "renyi".into(),
                    String::new(),
                    order.to_string(),
                    num(*value),
                ]);
            }
            for entry in &row.resolved {
                out.push(vec![
                    l_a.clone(),
                    "moment".into(),
                    entry.sector.clone(),
                    entry.n.to_string(),
                    num(entry.value),
                ]);
            }
            out.push(vec![
                l_a.clone(),
                "degeneracy-gap".into(),
                String::new(),
                String::new(),
                num(row.degeneracy_gap),
            ]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::runner::{
        run_entropy_experiment, run_oracle_experiment, run_teleport_experiment,
    };

    fn entropy_envelope() -> ReportEnvelope<EntropyReport> {
        let cfg = ExperimentConfig::from_toml(
            "experiment = \"entropy\"\nshots = 512\nruns = 2\nseed = 13",
        )
        .unwrap();
        let data = run_entropy_experiment(&cfg).unwrap();
        ReportEnvelope::new(&cfg, data)
    }

    #[test]
    fn json_round_trips_and_is_reproducible() {
        let envelope = entropy_envelope();
        let text = report_to_json(&envelope).unwrap();
        let parsed: ReportEnvelope<EntropyReport> = parse_report(&text).unwrap();
        assert_eq!(parsed, envelope);
        assert_eq!(parsed.schema_version, SCHEMA_VERSION);

        // Same config, fresh run: byte-identical emission.
        let again = report_to_json(&entropy_envelope()).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn entropy_csv_has_the_documented_shape() {
        let envelope = entropy_envelope();
        let csv = report_to_csv(&envelope.data).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "l_a,estimate,stderr,oracle");
        assert_eq!(lines.count(), 4);
    }

    #[test]
    fn teleport_csv_appends_a_min_row_per_point() {
        let cfg = ExperimentConfig::from_toml(concat!(
            "experiment = \"teleport\"\nshots = 256\nseed = 21\n",
            "[teleport]\npoints = 2\nalpha_end = 0.8\n",
        ))
        .unwrap();
        let data = run_teleport_experiment(&cfg).unwrap();
        let csv = report_to_csv(&data).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,state,fidelity,stderr,oracle");
        assert_eq!(lines.len(), 1 + 2 * 7);
        assert_eq!(lines[7].split(',').nth(1), Some("min"));
    }

    #[test]
    fn emit_writes_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let envelope = entropy_envelope();
        let json_path = emit_report(&envelope, ReportFormat::Json, dir.path()).unwrap();
        let csv_path = emit_report(&envelope, ReportFormat::Csv, dir.path()).unwrap();
        assert_eq!(json_path.file_name().unwrap(), "entropy.json");
        assert_eq!(csv_path.file_name().unwrap(), "entropy.csv");
        let text = std::fs::read_to_string(json_path).unwrap();
        let parsed: ReportEnvelope<EntropyReport> = parse_report(&text).unwrap();
        assert_eq!(parsed, envelope);
    }

    #[test]
    fn oracle_csv_lists_every_quantity() {
        let cfg = ExperimentConfig::from_toml("experiment = \"oracle\"").unwrap();
        let data = run_oracle_experiment(&cfg).unwrap();
        let csv = report_to_csv(&data).unwrap();
        assert!(csv.starts_with("l_a,quantity,sector,n,value"));
        for quantity in ["spectrum", "renyi", "moment", "degeneracy-gap"] {
            assert!(csv.contains(quantity), "missing {quantity} rows");
        }
    }

    #[test]
    fn format_parsing_rejects_unknown_names() {
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("yaml".parse::<ReportFormat>().is_err());
    }
}
