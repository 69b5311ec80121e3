//! Pool collide runs into one summary, verifying output digests first.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use erwkit::stats::{self, Summary};

use crate::config::{CollideConfig, ExperimentConfig, ReportConfig};
use crate::outputs::{self, OutDir, RunManifest, SCHEMA_VERSION};
use crate::AppError;

struct PooledRun {
    cfg: CollideConfig,
    rows: Vec<Row>,
}

struct Row {
    count: f64,
    last_collision: Option<u64>,
    stat_plus: f64,
    stat_minus: f64,
}

pub fn run(cfg: &ReportConfig, started: Instant) -> Result<(), AppError> {
    let mut runs: Vec<PooledRun> = Vec::new();
    for path in &cfg.manifests {
        runs.push(load_run(Path::new(path))?);
    }
    let head = &runs[0].cfg;
    for (path, other) in cfg.manifests.iter().zip(&runs).skip(1) {
        let c = &other.cfg;
        if (c.p, c.q, c.p2, c.q2, c.horizon) != (head.p, head.q, head.p2, head.q2, head.horizon) {
            return Err(AppError::Config(format!(
                "{path}: experiment (p={}, q={}, p2={}, q2={}, horizon={}) \
                 does not match the first manifest; only identical collide \
                 experiments pool",
                c.p, c.q, c.p2, c.q2, c.horizon
            )));
        }
    }
    warn_on_overlap(cfg, &runs);

    let mut counts = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut present = Vec::new();
    for run in &runs {
        for row in &run.rows {
            counts.push(row.count);
            plus.push(row.stat_plus);
            minus.push(row.stat_minus);
            present.push(if row.last_collision.is_some() { 1.0 } else { 0.0 });
        }
    }

    let mut dir = OutDir::create(&cfg.out)?;
    let mut csv = dir.csv(
        "summary.csv",
        &["metric", "n", "mean", "stderr", "q05", "median", "q95"],
    )?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "pooled {} replicas from {} runs (p={}, q={}, p2={}, q2={}, horizon={})",
        counts.len(),
        runs.len(),
        head.p,
        head.q,
        head.p2,
        head.q2,
        head.horizon
    );
    for (name, xs) in [
        ("collision_count", &counts),
        ("stat_plus", &plus),
        ("stat_minus", &minus),
        ("last_collision_present", &present),
    ] {
        let s = Summary::from_samples(xs)?;
        let se = s.std_dev() / (s.n as f64).sqrt();
        let q05 = stats::quantile(xs, 0.05)?;
        let med = stats::quantile(xs, 0.5)?;
        let q95 = stats::quantile(xs, 0.95)?;
        csv.row(&[
            name.to_string(),
            s.n.to_string(),
            outputs::float(s.mean),
            outputs::float(se),
            outputs::float(q05),
            outputs::float(med),
            outputs::float(q95),
        ])?;
        let _ = writeln!(
            text,
            "{name}: mean {:.6} +- {:.6} (q05 {:.6}, median {:.6}, q95 {:.6})",
            s.mean, se, q05, med, q95
        );
    }
    if let Some(c) = crate::runs::distance_constant(head.p, head.p2) {
        csv.row(&[
            "distance_constant_theory".to_string(),
            String::new(),
            outputs::float(c),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
        let _ = writeln!(text, "distance_constant_theory: {c:.6}");
    }
    dir.finish_csv(csv)?;
    dir.text("summary.txt", &text)?;
    print!("{text}");
    dir.write_manifest("report", ExperimentConfig::Report(cfg.clone()), None, started)?;
    Ok(())
}

fn load_run(manifest_path: &Path) -> Result<PooledRun, AppError> {
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| AppError::Config(format!("{}: {e}", manifest_path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| {
        AppError::Config(format!("{}: not a run manifest: {e}", manifest_path.display()))
    })?;
    if manifest.tool_version != env!("CARGO_PKG_VERSION")
        || manifest.schema_version != SCHEMA_VERSION
    {
        eprintln!(
            "warning: {} was written by tool {} (schema {}); this tool is {} (schema {})",
            manifest_path.display(),
            manifest.tool_version,
            manifest.schema_version,
            env!("CARGO_PKG_VERSION"),
            SCHEMA_VERSION
        );
    }
    let cfg = match manifest.config {
        ExperimentConfig::Collide(c) => c,
        _ => {
            return Err(AppError::Config(format!(
                "{}: report pools collide runs, got subcommand {}",
                manifest_path.display(),
                manifest.subcommand
            )))
        }
    };
    let record = manifest
        .outputs
        .iter()
        .find(|r| r.file == "collide.csv")
        .ok_or_else(|| {
            AppError::Config(format!(
                "{}: manifest records no collide.csv",
                manifest_path.display()
            ))
        })?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let csv_path: PathBuf = dir.join(&record.file);
    let digest = outputs::sha256_hex(&csv_path)
        .map_err(|e| AppError::Config(format!("{}: {e}", csv_path.display())))?;
    if digest != record.sha256 {
        return Err(AppError::Config(format!(
            "{}: digest mismatch against its manifest; the file changed after the run",
            csv_path.display()
        )));
    }
    let rows = parse_collide_csv(&csv_path)?;
    if rows.len() as u64 != record.rows {
        return Err(AppError::Config(format!(
            "{}: {} rows but manifest records {}",
            csv_path.display(),
            rows.len(),
            record.rows
        )));
    }
    Ok(PooledRun { cfg, rows })
}

fn parse_collide_csv(path: &Path) -> Result<Vec<Row>, AppError> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = || AppError::Config(format!("{}:{}: malformed row", path.display(), i + 1));
        if fields.len() != 6 {
            return Err(bad());
        }
        let count: u64 = fields[2].parse().map_err(|_| bad())?;
        let last_collision = if fields[3].is_empty() {
            None
        } else {
            Some(fields[3].parse().map_err(|_| bad())?)
        };
        rows.push(Row {
            count: count as f64,
            last_collision,
            stat_plus: fields[4].parse().map_err(|_| bad())?,
            stat_minus: fields[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

/// Pooling the same seed over intersecting replica ranges double-counts
/// paths; it is legal (the files verify) but statistically wrong, so warn.
fn warn_on_overlap(cfg: &ReportConfig, runs: &[PooledRun]) {
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let (a, b) = (&runs[i].cfg, &runs[j].cfg);
            if a.seed != b.seed {
                continue;
            }
            let (a0, a1) = (a.replica_offset as u64, a.replica_offset as u64 + a.replicas as u64);
            let (b0, b1) = (b.replica_offset as u64, b.replica_offset as u64 + b.replicas as u64);
            if a0 < b1 && b0 < a1 {
                eprintln!(
                    "warning: {} and {} share seed {} with overlapping replica \
                     ranges [{a0}, {a1}) and [{b0}, {b1}); pooled rows are not independent",
                    cfg.manifests[i], cfg.manifests[j], a.seed
                );
            }
        }
    }
}
