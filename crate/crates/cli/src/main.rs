//! Experiment runner over the erwkit library. Every subcommand writes its
//! outputs plus a manifest that records the full config, the seed, and a
//! digest of every file, so a run can be reproduced or audited byte-for-byte.

mod config;
mod outputs;
mod report;
mod runs;

use clap::Parser;
use std::process::ExitCode;
use std::time::Instant;

use config::{BvnConfig, CollideConfig, KernelConfig, LilConfig, ReportConfig, SimulateConfig};

/// Errors surfaced to the shell. Bad configuration exits 2 (matching clap's
/// own usage errors); numeric and IO failures exit 3.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numeric(_) | AppError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (kind, msg) = match self {
            AppError::Config(m) => ("config", m),
            AppError::Numeric(m) => ("numeric", m),
            AppError::Io(m) => ("io", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl std::error::Error for AppError {}

impl From<erwkit::Error> for AppError {
    fn from(e: erwkit::Error) -> Self {
        if e.is_invalid_input() {
            AppError::Config(e.to_string())
        } else {
            AppError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "erwkit",
    version,
    about = "Memory random walk experiments with reproducible outputs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Subcommand)]
enum Cmd {
    /// Simulate memory walks, optionally with the exact endpoint law.
    Simulate(SimulateConfig),
    /// Run independent walk pairs, recording collisions and distance stats.
    Collide(CollideConfig),
    /// Dump a covariance kernel and its scaling profile.
    Kernel(KernelConfig),
    /// Tabulate block quantities for the iterated-logarithm analysis.
    Lil(LilConfig),
    /// Evaluate the bivariate normal quadrant functions at one point.
    Bvn(BvnConfig),
    /// Pool collide runs, given their manifests, into one summary.
    Report(ReportConfig),
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Simulate(cfg) => runs::simulate(cfg, started),
        Cmd::Collide(cfg) => runs::collide(cfg, started),
        Cmd::Kernel(cfg) => runs::kernel(cfg, started),
        Cmd::Lil(cfg) => runs::lil_tables(cfg, started),
        Cmd::Bvn(cfg) => runs::bvn(cfg, started),
        Cmd::Report(cfg) => report::run(cfg, started),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
