//! Output files and the run manifest.
//!
//! All CSV output is UTF-8 with a header row, LF line endings, and floats at
//! 17 significant digits, so files are bitwise reproducible from the manifest
//! alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits; round-trips any f64 exactly.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_u64(v: Option<u64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn sha256_hex(path: &Path) -> io::Result<String> {
    let bytes = fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(format!("{:x}", h.finalize()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    /// Data rows (CSV) or 0 (JSON).
    pub rows: u64,
    /// CSV columns or top-level JSON keys; the schema the digest covers.
    pub columns: Vec<String>,
}

/// Everything needed to reproduce a run's outputs byte-for-byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub schema_version: u32,
    pub subcommand: String,
    pub config: ExperimentConfig,
    /// Duplicated out of the config for quick scanning; None for report.
    pub seed: Option<u64>,
    pub normal_transform: String,
    pub outputs: Vec<OutputRecord>,
    pub duration_seconds: f64,
}

pub struct OutDir {
    path: PathBuf,
    records: Vec<OutputRecord>,
}

pub struct Csv {
    name: String,
    path: PathBuf,
    w: BufWriter<fs::File>,
    columns: Vec<String>,
    rows: u64,
}

impl OutDir {
    pub fn create(path: &str) -> io::Result<Self> {
        let path = PathBuf::from(path);
        fs::create_dir_all(&path)?;
        Ok(OutDir {
            path,
            records: Vec::new(),
        })
    }

    pub fn csv(&self, name: &str, columns: &[&str]) -> io::Result<Csv> {
        let path = self.path.join(name);
        let mut w = BufWriter::new(fs::File::create(&path)?);
        writeln!(w, "{}", columns.join(","))?;
        Ok(Csv {
            name: name.to_string(),
            path,
            w,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: 0,
        })
    }

    pub fn finish_csv(&mut self, mut csv: Csv) -> io::Result<()> {
        csv.w.flush()?;
        drop(csv.w);
        self.records.push(OutputRecord {
            file: csv.name,
            sha256: sha256_hex(&csv.path)?,
            rows: csv.rows,
            columns: csv.columns,
        });
        Ok(())
    }

    pub fn text(&mut self, name: &str, content: &str) -> io::Result<()> {
        let path = self.path.join(name);
        fs::write(&path, content)?;
        self.records.push(OutputRecord {
            file: name.to_string(),
            sha256: sha256_hex(&path)?,
            rows: 0,
            columns: Vec::new(),
        });
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &serde_json::Value) -> io::Result<()> {
        let path = self.path.join(name);
        let text = format!(
            "{}\n",
            serde_json::to_string_pretty(value).expect("value serializes")
        );
        fs::write(&path, &text)?;
        let mut columns: Vec<String> = value
            .as_object()
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default();
        columns.sort();
        self.records.push(OutputRecord {
            file: name.to_string(),
            sha256: sha256_hex(&path)?,
            rows: 0,
            columns,
        });
        Ok(())
    }

    pub fn write_manifest(
        &mut self,
        subcommand: &str,
        config: ExperimentConfig,
        seed: Option<u64>,
        started: Instant,
    ) -> io::Result<PathBuf> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            config,
            seed,
            normal_transform: erwkit::rng::NORMAL_TRANSFORM_ID.to_string(),
            outputs: self.records.clone(),
            duration_seconds: started.elapsed().as_secs_f64(),
        };
        let path = self.path.join("manifest.json");
        let text = format!(
            "{}\n",
            serde_json::to_string_pretty(&manifest).expect("manifest serializes")
        );
        fs::write(&path, text)?;
        Ok(path)
    }
}

impl Csv {
    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns.len());
        writeln!(self.w, "{}", fields.join(","))?;
        self.rows += 1;
        Ok(())
    }
}
