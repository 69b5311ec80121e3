//! Flag parsing and the serializable experiment configuration.
//!
//! Every subcommand's flags round-trip through one config struct, which the
//! run manifest embeds verbatim. Unknown keys are rejected on the way back
//! in, so a manifest from a newer schema fails loudly instead of silently
//! dropping fields.

use erwkit::sgp::KernelSpec;
use serde::{Deserialize, Serialize};

use crate::AppError;

/// Seed flag: decimal or 0x-prefixed hex.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|e| format!("seed is not valid hex: {e}"))
    } else {
        t.parse().map_err(|e| format!("seed is not a valid integer: {e}"))
    }
}

/// Probability flag: a float or a rational `a/b`. IEEE division is correctly
/// rounded, so any rational mathematically equal to 3/4 parses to exactly
/// 0.75 and the walk code classifies it as critical without a tolerance.
pub fn parse_prob(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v = if let Some((num, den)) = t.split_once('/') {
        let n: u32 = num
            .trim()
            .parse()
            .map_err(|e| format!("rational numerator: {e}"))?;
        let d: u32 = den
            .trim()
            .parse()
            .map_err(|e| format!("rational denominator: {e}"))?;
        if d == 0 {
            return Err("rational probability has zero denominator".into());
        }
        f64::from(n) / f64::from(d)
    } else {
        t.parse().map_err(|e| format!("probability: {e}"))?
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("probability {v} outside [0, 1]"));
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Fbm,
    Rlfbm,
    Erwdiff,
    Stable,
}

/// Kernel family plus its per-family shape parameters; unused parameters
/// stay `None` and serialize as null.
#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelChoice {
    /// Kernel family.
    #[arg(long, value_enum)]
    pub variant: Variant,
    /// Hurst exponent in (0, 1] (fbm).
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Integrand exponent (rlfbm).
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Startpoint singularity exponent in [0, 1) (rlfbm).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// First walk memory parameter, < 3/4 (erwdiff).
    #[arg(long, value_parser = parse_prob)]
    pub p: Option<f64>,
    /// Second walk memory parameter, < 3/4 (erwdiff).
    #[arg(long, value_parser = parse_prob)]
    pub p2: Option<f64>,
    /// Spectral tail exponent in (0, 2] (stable).
    #[arg(long)]
    pub stable_alpha: Option<f64>,
}

impl KernelChoice {
    pub fn to_spec(&self) -> Result<KernelSpec, AppError> {
        fn need(v: Option<f64>, flag: &str, variant: &str) -> Result<f64, AppError> {
            v.ok_or_else(|| AppError::Config(format!("variant {variant} requires {flag}")))
        }
        let spec = match self.variant {
            Variant::Fbm => KernelSpec::fbm(need(self.hurst, "--hurst", "fbm")?),
            Variant::Rlfbm => KernelSpec::rlfbm(
                need(self.beta, "--beta", "rlfbm")?,
                need(self.gamma, "--gamma", "rlfbm")?,
            ),
            Variant::Erwdiff => KernelSpec::erw_diff(
                need(self.p, "--p", "erwdiff")?,
                need(self.p2, "--p2", "erwdiff")?,
            ),
            Variant::Stable => {
                KernelSpec::stable_spectral(need(self.stable_alpha, "--stable-alpha", "stable")?)
            }
        };
        Ok(spec?)
    }
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Memory parameter (float or rational like 3/4).
    #[arg(long, value_parser = parse_prob)]
    pub p: f64,
    /// First-step up probability.
    #[arg(long, value_parser = parse_prob)]
    pub q: f64,
    /// Path length.
    #[arg(long)]
    pub steps: u64,
    /// Emit every stride-th step (the final step is always emitted).
    #[arg(long, default_value_t = 1)]
    pub stride: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: u32,
    /// First replica index; lets disjoint runs share one logical experiment.
    #[arg(long, default_value_t = 0)]
    pub replica_offset: u32,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: u64,
    /// Also dump the exact law of the endpoint (steps <= 4096).
    #[arg(long, default_value_t = false)]
    pub exact_law: bool,
    /// Worker threads for replica fan-out; 1 = serial.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollideConfig {
    /// First walk memory parameter.
    #[arg(long, value_parser = parse_prob)]
    pub p: f64,
    /// First walk first-step up probability.
    #[arg(long, value_parser = parse_prob)]
    pub q: f64,
    /// Second walk memory parameter.
    #[arg(long, value_parser = parse_prob)]
    pub p2: f64,
    /// Second walk first-step up probability.
    #[arg(long, value_parser = parse_prob)]
    pub q2: f64,
    /// Common horizon (>= 16 so the distance normalizer is defined).
    #[arg(long)]
    pub horizon: u64,
    #[arg(long, default_value_t = 1)]
    pub replicas: u32,
    /// First replica index; lets disjoint runs share one logical experiment.
    #[arg(long, default_value_t = 0)]
    pub replica_offset: u32,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: u64,
    /// Worker threads for replica fan-out; 1 = serial.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[command(flatten)]
    pub kernel: KernelChoice,
    /// Largest time in the covariance dump.
    #[arg(long, default_value_t = 8.0)]
    pub grid_max: f64,
    /// Grid resolution of the covariance dump (pairs s <= t).
    #[arg(long, default_value_t = 16)]
    pub grid_points: usize,
    /// Largest ratio in the scaling-profile dump.
    #[arg(long, default_value_t = 1e6)]
    pub x_max: f64,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LilConfig {
    #[command(flatten)]
    pub kernel: KernelChoice,
    /// Geometric grid ratio t_n = alpha^n.
    #[arg(long, default_value_t = erwkit::lil::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Number of grid levels.
    #[arg(long)]
    pub nmax: usize,
    /// Largest correlation lag in the delta table.
    #[arg(long, default_value_t = 48)]
    pub jmax: usize,
    /// Sampled replicas for the empirical statistic; 0 = tables only.
    #[arg(long, default_value_t = 0)]
    pub replicas: u32,
    /// First replica index; lets disjoint runs share one logical experiment.
    #[arg(long, default_value_t = 0)]
    pub replica_offset: u32,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: u64,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BvnConfig {
    /// Correlation, strictly inside (-1, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// First corner coordinate.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Second corner coordinate.
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

#[derive(clap::Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    /// Run manifests of the collide experiments to pool.
    #[arg(required = true)]
    pub manifests: Vec<String>,
    /// Output directory; use a fresh one per experiment.
    #[arg(long, default_value = ".")]
    pub out: String,
}

/// One experiment per document; the manifest stores exactly this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Simulate(SimulateConfig),
    Collide(CollideConfig),
    Kernel(KernelConfig),
    Lil(LilConfig),
    Bvn(BvnConfig),
    Report(ReportConfig),
}
