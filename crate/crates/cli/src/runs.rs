//! Subcommand implementations: compute, write outputs, write the manifest.

use erwkit::duo::{self, PairCheckpoint, PairParams};
use erwkit::erw::{self, WalkParams, WalkState};
use erwkit::lil;
use erwkit::rng::StreamKey;
use erwkit::sgp;
use rayon::prelude::*;
use serde_json::json;
use std::time::Instant;

use crate::config::{
    BvnConfig, CollideConfig, ExperimentConfig, KernelConfig, LilConfig, SimulateConfig,
};
use crate::outputs::{self, OutDir};
use crate::AppError;

/// Map a pure per-replica job over a replica range, optionally on a thread
/// pool. Results come back in replica order either way, so the writer stays
/// deterministic.
fn run_replicas<T: Send>(
    threads: usize,
    replicas: &[u32],
    job: impl Fn(u32) -> erwkit::Result<T> + Sync,
) -> Result<Vec<T>, AppError> {
    if threads <= 1 {
        replicas.iter().map(|&r| Ok(job(r)?)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
        pool.install(|| {
            replicas
                .par_iter()
                .map(|&r| job(r).map_err(AppError::from))
                .collect()
        })
    }
}

fn replica_range(offset: u32, count: u32) -> Result<Vec<u32>, AppError> {
    let end = offset
        .checked_add(count)
        .ok_or_else(|| AppError::Config("replica range overflows u32".into()))?;
    Ok((offset..end).collect())
}

fn geometric_xs(hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = hi.log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=n)
        .map(|i| 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

pub fn simulate(cfg: &SimulateConfig, started: Instant) -> Result<(), AppError> {
    let params = WalkParams::new(cfg.p, cfg.q)?;
    if cfg.steps == 0 {
        return Err(AppError::Config("--steps must be >= 1".into()));
    }
    if cfg.stride == 0 {
        return Err(AppError::Config("--stride must be >= 1".into()));
    }
    if cfg.exact_law && cfg.steps > 4096 {
        return Err(AppError::Config(
            "--exact-law is quadratic in --steps; capped at 4096".into(),
        ));
    }
    let mut grid: Vec<u64> = (1..=cfg.steps / cfg.stride).map(|i| i * cfg.stride).collect();
    if grid.last() != Some(&cfg.steps) {
        grid.push(cfg.steps);
    }
    let replicas = replica_range(cfg.replica_offset, cfg.replicas)?;
    let paths: Vec<Vec<WalkState>> = run_replicas(cfg.threads, &replicas, |r| {
        erw::simulate_checkpoints(params, &grid, StreamKey::new(cfg.seed, r, 0))
    })?;

    let mut dir = OutDir::create(&cfg.out)?;
    let mut csv = dir.csv("paths.csv", &["replica", "n", "s_n"])?;
    for (r, path) in replicas.iter().zip(&paths) {
        for st in path {
            csv.row(&[r.to_string(), st.n.to_string(), st.position.to_string()])?;
        }
    }
    dir.finish_csv(csv)?;

    if cfg.exact_law {
        let law = erw::exact_law(params, cfg.steps)?;
        let mut csv = dir.csv("law.csv", &["k", "probability"])?;
        for (k, p) in law.iter() {
            csv.row(&[k.to_string(), outputs::float(p)])?;
        }
        dir.finish_csv(csv)?;
    }

    println!(
        "{}",
        json!({
            "regime": params.regime().to_string(),
            "replicas": cfg.replicas,
            "checkpoints_per_path": grid.len(),
        })
    );
    dir.write_manifest(
        "simulate",
        ExperimentConfig::Simulate(cfg.clone()),
        Some(cfg.seed),
        started,
    )?;
    Ok(())
}

pub fn collide(cfg: &CollideConfig, started: Instant) -> Result<(), AppError> {
    let pair = PairParams::new(
        WalkParams::new(cfg.p, cfg.q)?,
        WalkParams::new(cfg.p2, cfg.q2)?,
    );
    let grid = [cfg.horizon];
    let replicas = replica_range(cfg.replica_offset, cfg.replicas)?;
    let rows: Vec<PairCheckpoint> = run_replicas(cfg.threads, &replicas, |r| {
        Ok(duo::scan_pair(pair, &grid, StreamKey::new(cfg.seed, r, 0))?[0])
    })?;

    let mut dir = OutDir::create(&cfg.out)?;
    let mut csv = dir.csv(
        "collide.csv",
        &["replica", "horizon", "count", "last_collision", "stat_plus", "stat_minus"],
    )?;
    let mut mean_count = 0.0;
    for (r, cp) in replicas.iter().zip(&rows) {
        mean_count += cp.collision_count as f64;
        csv.row(&[
            r.to_string(),
            cp.n.to_string(),
            cp.collision_count.to_string(),
            outputs::opt_u64(cp.last_collision),
            outputs::float(cp.stat_plus),
            outputs::float(cp.stat_minus),
        ])?;
    }
    mean_count /= rows.len().max(1) as f64;
    dir.finish_csv(csv)?;

    println!(
        "{}",
        json!({
            "replicas": cfg.replicas,
            "mean_collision_count": mean_count,
            "normalizer": format!("{:?}", duo::DistanceNormalizer::for_pair(&pair)).to_lowercase(),
        })
    );
    dir.write_manifest(
        "collide",
        ExperimentConfig::Collide(cfg.clone()),
        Some(cfg.seed),
        started,
    )?;
    Ok(())
}

pub fn kernel(cfg: &KernelConfig, started: Instant) -> Result<(), AppError> {
    let spec = cfg.kernel.to_spec()?;
    if !(cfg.grid_max > 0.0) {
        return Err(AppError::Config("--grid-max must be positive".into()));
    }
    if cfg.grid_points == 0 || cfg.grid_points > 512 {
        return Err(AppError::Config("--grid-points must be in 1..=512".into()));
    }
    if !(cfg.x_max > 1.0) {
        return Err(AppError::Config("--x-max must exceed 1".into()));
    }

    let mut dir = OutDir::create(&cfg.out)?;
    let mut csv = dir.csv("kernel.csv", &["s", "t", "r"])?;
    let pts = cfg.grid_points;
    for i in 1..=pts {
        let s = cfg.grid_max * i as f64 / pts as f64;
        for j in i..=pts {
            let t = cfg.grid_max * j as f64 / pts as f64;
            let r = sgp::kernel_eval(spec, s, t)?;
            csv.row(&[outputs::float(s), outputs::float(t), outputs::float(r)])?;
        }
    }
    dir.finish_csv(csv)?;

    let xs = geometric_xs(cfg.x_max, 12);
    let prof = sgp::h_profile(spec, &xs)?;
    let mut csv = dir.csv("hprofile.csv", &["x", "h", "log_x", "log_h"])?;
    for (x, h) in prof.xs.iter().zip(&prof.hs) {
        let log_h = if *h > 0.0 {
            outputs::float(h.ln())
        } else {
            String::new()
        };
        csv.row(&[outputs::float(*x), outputs::float(*h), outputs::float(x.ln()), log_h])?;
    }
    dir.finish_csv(csv)?;

    let summary = json!({
        "rho": spec.rho(),
        "sigma2": spec.sigma2()?,
        "profile_exponent": prof.fitted_exponent,
        "profile_fit_points": prof.fit_points,
    });
    println!("{summary}");
    dir.json("kernel.json", &summary)?;
    dir.write_manifest(
        "kernel",
        ExperimentConfig::Kernel(cfg.clone()),
        None,
        started,
    )?;
    Ok(())
}

pub fn lil_tables(cfg: &LilConfig, started: Instant) -> Result<(), AppError> {
    let spec = cfg.kernel.to_spec()?;
    if cfg.nmax < 2 {
        return Err(AppError::Config("--nmax must be >= 2".into()));
    }
    let grid = lil::GeometricGrid::new(cfg.alpha, cfg.nmax)?;
    let blocks = lil::BlockQuantities::new(spec, &grid)?;

    let mut dir = OutDir::create(&cfg.out)?;
    let mut csv = dir.csv("blocks.csv", &["k", "t_k", "gamma_k", "a_k"])?;
    for k in 1..cfg.nmax {
        let a = blocks.a[k - 1];
        let a_field = if a.is_nan() {
            String::new()
        } else {
            outputs::float(a)
        };
        csv.row(&[
            k.to_string(),
            outputs::float(grid.t(k)),
            outputs::float(blocks.gamma[k - 1]),
            a_field,
        ])?;
    }
    dir.finish_csv(csv)?;

    let mut csv = dir.csv("deltas.csv", &["j", "delta_j"])?;
    for j in 0..=cfg.jmax {
        csv.row(&[j.to_string(), outputs::float(lil::delta_corr(spec, cfg.alpha, j)?)])?;
    }
    dir.finish_csv(csv)?;

    let mut ns: Vec<usize> = Vec::new();
    let mut v = 2usize;
    while v < cfg.nmax {
        ns.push(v);
        v *= 2;
    }
    ns.push(cfg.nmax);
    let reports = lil::er_ratio_series(spec, cfg.alpha, &ns)?;
    let mut csv = dir.csv("ratios.csv", &["n", "numerator", "denominator", "ratio"])?;
    for rep in &reports {
        csv.row(&[
            rep.n.to_string(),
            outputs::float(rep.numerator),
            outputs::float(rep.denominator),
            outputs::float(rep.ratio),
        ])?;
    }
    dir.finish_csv(csv)?;

    let mut jitter = None;
    if cfg.replicas > 0 {
        let times = grid.times();
        let key = StreamKey::new(cfg.seed, cfg.replica_offset, 0);
        let mut csv = dir.csv(
            "stats.csv",
            &["replica", "running_max_plus", "running_max_minus", "fire_count"],
        )?;
        let mut rows: Vec<(u32, lil::LilReplicaStat)> = Vec::with_capacity(cfg.replicas as usize);
        let mut stat_err = None;
        let j = sgp::for_each_path(spec, &times, cfg.replicas, key, |r, path| {
            if stat_err.is_some() {
                return;
            }
            match lil::lil_statistic(spec, &grid, &blocks, path) {
                Ok(stat) => rows.push((cfg.replica_offset + r, stat)),
                Err(e) => stat_err = Some(e),
            }
        })?;
        if let Some(e) = stat_err {
            return Err(e.into());
        }
        for (r, stat) in &rows {
            csv.row(&[
                r.to_string(),
                outputs::float(stat.running_max_plus),
                outputs::float(stat.running_max_minus),
                stat.fire_count.to_string(),
            ])?;
        }
        dir.finish_csv(csv)?;
        jitter = Some(j);
    }

    // L_0(alpha) - sigma^2 -> 0 as alpha grows; a visibly nonzero gap means
    // the grid ratio is too small for the block approximation.
    let sigma2 = spec.sigma2()?;
    let l0 = lil::l_block(spec, cfg.alpha, 0)?;
    let diag = json!({
        "alpha": cfg.alpha,
        "rho": spec.rho(),
        "sigma2": sigma2,
        "l0": l0,
        "l0_minus_sigma2": l0 - sigma2,
        "cholesky_jitter": jitter,
    });
    println!("{diag}");
    dir.json("lil.json", &diag)?;
    dir.write_manifest("lil", ExperimentConfig::Lil(cfg.clone()), Some(cfg.seed), started)?;
    Ok(())
}

pub fn bvn(cfg: &BvnConfig, started: Instant) -> Result<(), AppError> {
    let q = erwkit::bvn::BvnQuery::new(cfg.delta, cfg.a, cfg.b)?;
    let phi = erwkit::bvn::phi(q)?;
    let bound = if cfg.a > 0.0 && cfg.b > 0.0 {
        Some(erwkit::bvn::phi_bound(q)?)
    } else {
        None
    };
    let quadrant = erwkit::bvn::quadrant_prob(cfg.delta, cfg.a, cfg.b)?;
    let result = json!({
        "delta": cfg.delta,
        "a": cfg.a,
        "b": cfg.b,
        "phi": phi,
        "phi_envelope": bound,
        "quadrant_prob": quadrant,
    });
    println!("{result}");
    let mut dir = OutDir::create(&cfg.out)?;
    dir.json("bvn.json", &result)?;
    dir.write_manifest("bvn", ExperimentConfig::Bvn(cfg.clone()), None, started)?;
    Ok(())
}

/// Theoretical distance-statistic constant for a diffusive pair, printed by
/// report next to the empirical quantiles. None outside the diffusive regime.
pub fn distance_constant(p: f64, p2: f64) -> Option<f64> {
    let pair = PairParams::new(WalkParams::new(p, 0.5).ok()?, WalkParams::new(p2, 0.5).ok()?);
    duo::lil_constant_theory(pair).ok()
}
