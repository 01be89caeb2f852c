use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::tables::ResultTable;
use super::{ExperimentSpec, Study};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestFile {
    pub path: PathBuf,
    pub description: String,
    /// Whether the contents depend only on the spec and seed.
    pub deterministic: bool,
}

/// Record of one study run, written next to its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub study: String,
    pub master_seed: u64,
    pub timestamp: String,
    pub crate_version: String,
    pub spec: ExperimentSpec,
    pub files: Vec<ManifestFile>,
    /// Result rows, duplicated from the CSV for convenience.
    pub results: ResultTable,
}

/// Writes `{study}_{timestamp}.csv`, a wall-time sidecar where applicable and
/// `{study}_{timestamp}_manifest.json` into `dir`, creating it if needed.
pub fn write_study(dir: &Path, study: Study, spec: &ExperimentSpec, table: &ResultTable) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let timestamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let stem = format!("{}_{timestamp}", study.name());
    let mut files = Vec::new();

    let csv_path = dir.join(format!("{stem}.csv"));
    table.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    files.push(ManifestFile {
        path: csv_path,
        description: format!("{} results", study.name()),
        deterministic: study != Study::Timing,
    });

    if matches!(table, ResultTable::Rate { .. }) {
        let path = dir.join(format!("{stem}_walltime.csv"));
        table.write_walltime_csv(BufWriter::new(File::create(&path)?))?;
        files.push(ManifestFile {
            path,
            description: "mean wall-clock seconds per algorithm run".into(),
            deterministic: false,
        });
    }

    let manifest_path = dir.join(format!("{stem}_manifest.json"));
    files.push(ManifestFile {
        path: manifest_path.clone(),
        description: "run manifest".into(),
        deterministic: false,
    });
    let manifest = Manifest {
        study: study.name().to_string(),
        master_seed: spec.master_seed,
        timestamp,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        files,
        results: table.clone(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&manifest_path)?), &manifest)?;
    Ok(manifest)
}
