//! Pairs of independent elephant random walks: collision statistics and the
//! normalized distance process.
//!
//! For two independent walks with memory parameters below 3/4, the distance
//! `S_n - S'_n` obeys an iterated-logarithm law with constant
//! `sqrt(1/(3-4p) + 1/(3-4p'))` under the normalizer `sqrt(2n log log n)`.
//! At the critical value 3/4 the normalizer gains a `log n` factor. The
//! collision count separates the regimes: memoryless-like pairs meet
//! infinitely often, superdiffusive pairs only finitely often.

use crate::erw::{self, RegimeLabel, WalkParams, WalkState};
use crate::rng::StreamKey;
use crate::{error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of two independent walks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub first: WalkParams,
    pub second: WalkParams,
}

impl PairParams {
    pub fn new(first: WalkParams, second: WalkParams) -> Self {
        PairParams { first, second }
    }

    fn any_superdiffusive(&self) -> bool {
        self.first.regime() == RegimeLabel::Superdiffusive
            || self.second.regime() == RegimeLabel::Superdiffusive
    }

    fn any_critical(&self) -> bool {
        self.first.regime() == RegimeLabel::Critical
            || self.second.regime() == RegimeLabel::Critical
    }
}

/// A pair under key `(seed, replica, stream = k)` occupies the walk streams
/// `2k` and `2k + 1`, so pairs at different `k` never share draws.
pub fn pair_keys(key: StreamKey) -> (StreamKey, StreamKey) {
    (
        key.with_stream(key.stream.wrapping_mul(2)),
        key.with_stream(key.stream.wrapping_mul(2).wrapping_add(1)),
    )
}

/// Simulate two independent walks of equal length.
pub fn simulate_pair(
    pair: PairParams,
    n_steps: u64,
    key: StreamKey,
) -> Result<(Vec<WalkState>, Vec<WalkState>)> {
    let (k1, k2) = pair_keys(key);
    Ok((
        erw::simulate(pair.first, n_steps, k1)?,
        erw::simulate(pair.second, n_steps, k2)?,
    ))
}

/// Times `n >= 1` at which two equal-length paths share a position.
#[derive(Clone, Debug)]
pub struct CollisionRecord {
    horizon: u64,
    times: Vec<u64>,
}

impl CollisionRecord {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Strictly increasing collision times.
    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn count(&self) -> usize {
        self.times.len()
    }

    pub fn last(&self) -> Option<u64> {
        self.times.last().copied()
    }
}

/// Exact collision set of two aligned paths.
pub fn collisions(first: &[WalkState], second: &[WalkState]) -> Result<CollisionRecord> {
    if first.len() != second.len() {
        return Err(crate::Error::LengthMismatch {
            left: first.len(),
            right: second.len(),
        });
    }
    if first.is_empty() {
        return Err(error::invalid("collision scan needs nonempty paths"));
    }
    let mut times = Vec::new();
    for (a, b) in first.iter().zip(second) {
        if a.n != b.n {
            return Err(error::invalid("paths are not step-aligned"));
        }
        if a.position == b.position {
            times.push(a.n);
        }
    }
    Ok(CollisionRecord {
        horizon: first.last().expect("nonempty").n,
        times,
    })
}

/// Iterated-logarithm constant for the distance of two sub-critical walks:
/// `sqrt(1/(3-4p) + 1/(3-4p'))`.
pub fn lil_constant_theory(pair: PairParams) -> Result<f64> {
    if pair.first.regime() != RegimeLabel::Diffusive
        || pair.second.regime() != RegimeLabel::Diffusive
    {
        return Err(error::invalid(
            "distance LIL constant requires both memory parameters below 3/4",
        ));
    }
    let (p1, p2) = (pair.first.p, pair.second.p);
    Ok((1.0 / (3.0 - 4.0 * p1) + 1.0 / (3.0 - 4.0 * p2)).sqrt())
}

/// Normalizer for the distance statistic.
///
/// `Baseline` is `sqrt(2 n log log n)`, the sub-critical scaling; `Critical`
/// is `sqrt(2 n log n log log log n)`, used whenever a critical walk is
/// present and no superdiffusive one is. Pairs containing a superdiffusive
/// walk keep the baseline scaling (the statistic then grows without bound;
/// [`divergence_ratio`] is the meaningful report there).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceNormalizer {
    Baseline,
    Critical,
}

/// Smallest horizon at which both normalizers are positive:
/// `log log log 16 > 0`.
pub const MIN_STAT_HORIZON: u64 = 16;

impl DistanceNormalizer {
    pub fn for_pair(pair: &PairParams) -> Self {
        if pair.any_critical() && !pair.any_superdiffusive() {
            DistanceNormalizer::Critical
        } else {
            DistanceNormalizer::Baseline
        }
    }

    pub fn eval(self, n: u64) -> Result<f64> {
        if n < MIN_STAT_HORIZON {
            return Err(error::invalid(format!(
                "normalized distance statistic needs n >= {MIN_STAT_HORIZON}"
            )));
        }
        let nf = n as f64;
        let ln = nf.ln();
        Ok(match self {
            DistanceNormalizer::Baseline => (2.0 * nf * ln.ln()).sqrt(),
            DistanceNormalizer::Critical => (2.0 * nf * ln * ln.ln().ln()).sqrt(),
        })
    }
}

/// Running maxima of the normalized signed distance up to a horizon.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DistanceStat {
    pub horizon: u64,
    /// Running max of `(S_n - S'_n) / normalizer(n)` over `16 <= n <= horizon`.
    pub running_max_plus: f64,
    /// Running max of `(S'_n - S_n) / normalizer(n)` over the same range.
    pub running_max_minus: f64,
}

fn validate_grid(grid: &[u64], max_n: u64) -> Result<()> {
    if grid.is_empty() {
        return Err(error::invalid("horizon grid must be nonempty"));
    }
    if grid[0] < MIN_STAT_HORIZON {
        return Err(error::invalid(format!(
            "horizon grid entries must be >= {MIN_STAT_HORIZON}"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(error::invalid("horizon grid must be strictly increasing"));
    }
    if *grid.last().expect("nonempty") > max_n {
        return Err(error::invalid("horizon grid exceeds path length"));
    }
    Ok(())
}

/// Distance statistics of two aligned paths at the given horizons.
pub fn distance_statistic(
    first: &[WalkState],
    second: &[WalkState],
    pair: &PairParams,
    grid: &[u64],
) -> Result<Vec<DistanceStat>> {
    if first.len() != second.len() {
        return Err(crate::Error::LengthMismatch {
            left: first.len(),
            right: second.len(),
        });
    }
    validate_grid(grid, first.len() as u64)?;
    let norm = DistanceNormalizer::for_pair(pair);
    let mut out = Vec::with_capacity(grid.len());
    let mut max_plus = 0.0f64;
    let mut max_minus = 0.0f64;
    let mut next = 0usize;
    for (a, b) in first.iter().zip(second) {
        debug_assert_eq!(a.n, b.n);
        if a.n >= MIN_STAT_HORIZON {
            let d = (a.position - b.position) as f64 / norm.eval(a.n)?;
            max_plus = max_plus.max(d);
            max_minus = max_minus.max(-d);
        }
        if next < grid.len() && grid[next] == a.n {
            out.push(DistanceStat {
                horizon: a.n,
                running_max_plus: max_plus,
                running_max_minus: max_minus,
            });
            next += 1;
        }
    }
    Ok(out)
}

/// One streaming checkpoint of a simulated pair: positions, collision
/// progress, and distance statistics, all accumulated in O(1) memory.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PairCheckpoint {
    pub n: u64,
    pub first_position: i64,
    pub second_position: i64,
    pub collision_count: u64,
    pub last_collision: Option<u64>,
    pub stat_plus: f64,
    pub stat_minus: f64,
}

/// Simulate a pair to `max(grid)` and report checkpoints at the grid
/// horizons, never materializing the paths.
///
/// Equivalent to [`simulate_pair`] + [`collisions`] + [`distance_statistic`]
/// on the same key, but in constant memory; the equivalence is asserted in
/// tests.
pub fn scan_pair(pair: PairParams, grid: &[u64], key: StreamKey) -> Result<Vec<PairCheckpoint>> {
    let last = *grid.last().ok_or_else(|| error::invalid("empty grid"))?;
    validate_grid(grid, last)?;
    let (k1, k2) = pair_keys(key);
    let norm = DistanceNormalizer::for_pair(&pair);
    let mut out = Vec::with_capacity(grid.len());

    let mut pos1: i64 = if crate::rng::uniform01(k1, 0) < pair.first.q { 1 } else { -1 };
    let mut pos2: i64 = if crate::rng::uniform01(k2, 0) < pair.second.q { 1 } else { -1 };
    let mut count = 0u64;
    let mut last_hit: Option<u64> = None;
    let mut max_plus = 0.0f64;
    let mut max_minus = 0.0f64;
    let mut next = 0usize;
    let a1 = 2.0 * pair.first.p - 1.0;
    let a2 = 2.0 * pair.second.p - 1.0;

    let observe = |n: u64, pos1: i64, pos2: i64,
                       count: &mut u64,
                       last_hit: &mut Option<u64>,
                       max_plus: &mut f64,
                       max_minus: &mut f64|
     -> Result<()> {
        if pos1 == pos2 {
            *count += 1;
            *last_hit = Some(n);
        }
        if n >= MIN_STAT_HORIZON {
            let d = (pos1 - pos2) as f64 / norm.eval(n)?;
            *max_plus = max_plus.max(d);
            *max_minus = max_minus.max(-d);
        }
        Ok(())
    };

    observe(1, pos1, pos2, &mut count, &mut last_hit, &mut max_plus, &mut max_minus)?;
    for n in 1..last {
        let up1 = 0.5 + a1 * pos1 as f64 / (2.0 * n as f64);
        let up2 = 0.5 + a2 * pos2 as f64 / (2.0 * n as f64);
        pos1 += if crate::rng::uniform01(k1, n) < up1 { 1 } else { -1 };
        pos2 += if crate::rng::uniform01(k2, n) < up2 { 1 } else { -1 };
        observe(n + 1, pos1, pos2, &mut count, &mut last_hit, &mut max_plus, &mut max_minus)?;
        if next < grid.len() && grid[next] == n + 1 {
            out.push(PairCheckpoint {
                n: n + 1,
                first_position: pos1,
                second_position: pos2,
                collision_count: count,
                last_collision: last_hit,
                stat_plus: max_plus,
                stat_minus: max_minus,
            });
            next += 1;
        }
    }
    Ok(out)
}

/// `|S_n - S'_n| / n^(2 max(p, p') - 1)` at the given horizons along one
/// simulated pair. Meaningful when the dominant walk is superdiffusive, where
/// the ratio converges almost surely to a nonzero limit; other regimes are
/// rejected.
pub fn divergence_ratio(pair: PairParams, grid: &[u64], key: StreamKey) -> Result<Vec<f64>> {
    if !pair.any_superdiffusive() {
        return Err(error::invalid(
            "divergence ratio requires a superdiffusive walk, p > 3/4",
        ));
    }
    let (k1, k2) = pair_keys(key);
    let first = erw::simulate_checkpoints(pair.first, grid, k1)?;
    let second = erw::simulate_checkpoints(pair.second, grid, k2)?;
    let expo = 2.0 * pair.first.p.max(pair.second.p) - 1.0;
    Ok(first
        .iter()
        .zip(&second)
        .map(|(a, b)| ((a.position - b.position).abs() as f64) / (a.n as f64).powf(expo))
        .collect())
}
