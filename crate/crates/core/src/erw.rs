//! Elephant random walks: memory-`p` steps on the integer line.
//!
//! The first step is +1 with probability `q`. Every later step picks a
//! uniformly random past step and repeats it with probability `p`, otherwise
//! reverses it. Conditioning on the current position collapses that rule to
//!
//! ```text
//! P(X_{n+1} = +1 | S_n) = 1/2 + (2p - 1) S_n / (2n),
//! ```
//!
//! so the walk is Markov in `(n, S_n)` and can be sampled in O(1) memory.
//! The literal resample-the-history sampler is kept as a distributional
//! oracle. The memory parameter splits the behavior at `p = 3/4`: diffusive
//! below, an extra `log n` in the variance at the critical point, and
//! almost-sure `S_n / n^{2p-1}` convergence to a non-Gaussian limit above.

use crate::rng::{uniform01, StreamKey};
use crate::{error, Result};
use serde::{Deserialize, Serialize};

/// Memory parameter `p` and first-step bias `q`, both probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub p: f64,
    pub q: f64,
}

/// Tolerance for recognizing the critical memory value 3/4 from a float.
/// Values entered as rationals with 4a = 3b land on 0.75 exactly.
pub const CRITICAL_TOL: f64 = 1e-12;

impl WalkParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(error::invalid("memory parameter p must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(error::invalid("first-step probability q must lie in [0, 1]"));
        }
        Ok(WalkParams { p, q })
    }

    pub fn regime(&self) -> RegimeLabel {
        if (self.p - 0.75).abs() < CRITICAL_TOL {
            RegimeLabel::Critical
        } else if self.p < 0.75 {
            RegimeLabel::Diffusive
        } else {
            RegimeLabel::Superdiffusive
        }
    }
}

/// Position after `n` steps. `|position| <= n` and `position ≡ n (mod 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkState {
    pub n: u64,
    pub position: i64,
}

/// Walk behavior class determined by the memory parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    Diffusive,
    Critical,
    Superdiffusive,
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeLabel::Diffusive => write!(f, "diffusive"),
            RegimeLabel::Critical => write!(f, "critical"),
            RegimeLabel::Superdiffusive => write!(f, "superdiffusive"),
        }
    }
}

/// `P(X_{n+1} = +1 | S_n)` for a walk at `state`. The first step is a plain
/// Bernoulli(q) and is not covered by this rule, so `state.n >= 1`.
pub fn step_probability(params: WalkParams, state: WalkState) -> Result<f64> {
    if state.n == 0 {
        return Err(error::invalid(
            "conditional step rule starts at n = 1; the first step is Bernoulli(q)",
        ));
    }
    if state.position.unsigned_abs() > state.n {
        return Err(error::invalid("position exceeds step count"));
    }
    let up = 0.5 + (2.0 * params.p - 1.0) * state.position as f64 / (2.0 * state.n as f64);
    Ok(up.clamp(0.0, 1.0))
}

/// Sample one walk for `n_steps` steps, returning the state after every step.
/// Uses one uniform per step: step `k` consumes counter `k - 1`.
pub fn simulate(params: WalkParams, n_steps: u64, key: StreamKey) -> Result<Vec<WalkState>> {
    if n_steps == 0 {
        return Err(error::invalid("n_steps must be at least 1"));
    }
    let mut out = Vec::with_capacity(n_steps as usize);
    let mut pos: i64 = if uniform01(key, 0) < params.q { 1 } else { -1 };
    out.push(WalkState { n: 1, position: pos });
    let two_p_minus_1 = 2.0 * params.p - 1.0;
    for n in 1..n_steps {
        let up = 0.5 + two_p_minus_1 * pos as f64 / (2.0 * n as f64);
        pos += if uniform01(key, n) < up { 1 } else { -1 };
        out.push(WalkState {
            n: n + 1,
            position: pos,
        });
    }
    Ok(out)
}

/// Walk to `max(grid)` in O(1) memory, emitting states only at the grid
/// points. Grid must be strictly increasing and start at 1 or later.
pub fn simulate_checkpoints(
    params: WalkParams,
    grid: &[u64],
    key: StreamKey,
) -> Result<Vec<WalkState>> {
    if grid.is_empty() || grid[0] == 0 {
        return Err(error::invalid("checkpoint grid must start at n >= 1"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(error::invalid("checkpoint grid must be strictly increasing"));
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut pos: i64 = if uniform01(key, 0) < params.q { 1 } else { -1 };
    let mut next = 0usize;
    if grid[next] == 1 {
        out.push(WalkState { n: 1, position: pos });
        next += 1;
    }
    let two_p_minus_1 = 2.0 * params.p - 1.0;
    let last = *grid.last().expect("nonempty grid");
    for n in 1..last {
        let up = 0.5 + two_p_minus_1 * pos as f64 / (2.0 * n as f64);
        pos += if uniform01(key, n) < up { 1 } else { -1 };
        if next < grid.len() && grid[next] == n + 1 {
            out.push(WalkState {
                n: n + 1,
                position: pos,
            });
            next += 1;
        }
    }
    Ok(out)
}

/// Literal history-resampling sampler: stores every step, draws a uniform
/// index, repeats or reverses. Distributionally identical to [`simulate`];
/// kept as a test oracle only. Step `n` consumes counters `2n - 2, 2n - 1`.
pub fn simulate_naive(params: WalkParams, n_steps: u64, key: StreamKey) -> Result<Vec<WalkState>> {
    if n_steps == 0 {
        return Err(error::invalid("n_steps must be at least 1"));
    }
    let mut steps: Vec<i8> = Vec::with_capacity(n_steps as usize);
    let mut out = Vec::with_capacity(n_steps as usize);
    steps.push(if uniform01(key, 0) < params.q { 1 } else { -1 });
    let mut pos = steps[0] as i64;
    out.push(WalkState { n: 1, position: pos });
    for n in 1..n_steps {
        let pick = uniform01(key, 2 * n);
        let idx = ((pick * n as f64) as u64).min(n - 1) as usize;
        let repeat = uniform01(key, 2 * n + 1) < params.p;
        let step = if repeat { steps[idx] } else { -steps[idx] };
        steps.push(step);
        pos += step as i64;
        out.push(WalkState {
            n: n + 1,
            position: pos,
        });
    }
    Ok(out)
}

/// Exact distribution of the position after `n` steps.
///
/// Support is `{-n, -n+2, ..., n}`; `pmf[i]` is the probability of position
/// `-n + 2i`. Mass sums to 1 within 1e-12.
#[derive(Clone, Debug)]
pub struct ExactLaw {
    n: u64,
    pmf: Vec<f64>,
}

impl ExactLaw {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Probability of ending at `position`; zero off the lattice.
    pub fn prob(&self, position: i64) -> f64 {
        let shifted = position + self.n as i64;
        if shifted < 0 || shifted % 2 != 0 {
            return 0.0;
        }
        let idx = (shifted / 2) as usize;
        if idx >= self.pmf.len() {
            return 0.0;
        }
        self.pmf[idx]
    }

    /// `(position, probability)` pairs over the full support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.n as i64;
        self.pmf.iter().enumerate().map(move |(i, &p)| (-n + 2 * i as i64, p))
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(s, p)| s as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(s, p)| (s as f64 - m) * (s as f64 - m) * p).sum()
    }
}

/// Largest `n` accepted by [`exact_law`]; the recursion is quadratic in `n`.
pub const EXACT_LAW_MAX_N: u64 = 1 << 12;

/// Exact finite-`n` law of the position by forward recursion over `(n, S_n)`.
pub fn exact_law(params: WalkParams, n: u64) -> Result<ExactLaw> {
    if n == 0 || n > EXACT_LAW_MAX_N {
        return Err(error::invalid(format!(
            "exact_law supports 1 <= n <= {EXACT_LAW_MAX_N}"
        )));
    }
    // Index i at step m holds P(S_m = -m + 2i).
    let mut cur = vec![1.0 - params.q, params.q];
    let two_p_minus_1 = 2.0 * params.p - 1.0;
    for m in 1..n {
        let mut next = vec![0.0; m as usize + 2];
        for (i, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let s = -(m as i64) + 2 * i as i64;
            let up = (0.5 + two_p_minus_1 * s as f64 / (2.0 * m as f64)).clamp(0.0, 1.0);
            next[i + 1] += mass * up;
            next[i] += mass * (1.0 - up);
        }
        cur = next;
    }
    Ok(ExactLaw { n, pmf: cur })
}

/// Exact mean and variance of the position after `n` steps, by moment
/// recursions (valid beyond the [`exact_law`] size guard):
///
/// ```text
/// E S_{m+1}    = E S_m   * (1 + (2p-1)/m),          E S_1   = 2q - 1
/// E S_{m+1}^2  = E S_m^2 * (1 + 2(2p-1)/m) + 1,     E S_1^2 = 1
/// ```
pub fn exact_moments(params: WalkParams, n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(error::invalid("moments need n >= 1"));
    }
    let a = 2.0 * params.p - 1.0;
    let mut mean = 2.0 * params.q - 1.0;
    let mut m2 = 1.0;
    for m in 1..n {
        let mf = m as f64;
        mean *= 1.0 + a / mf;
        m2 = m2 * (1.0 + 2.0 * a / mf) + 1.0;
    }
    Ok((mean, m2 - mean * mean))
}

/// Track `S_n / n^{2p-1}` along one path at the given horizons.
///
/// Only meaningful in the superdiffusive regime, where the ratio converges
/// almost surely; other regimes are rejected.
pub fn superdiffusive_limit_estimate(
    params: WalkParams,
    horizons: &[u64],
    key: StreamKey,
) -> Result<Vec<f64>> {
    if params.regime() != RegimeLabel::Superdiffusive {
        return Err(error::invalid(
            "limit estimate requires the superdiffusive regime p > 3/4",
        ));
    }
    let states = simulate_checkpoints(params, horizons, key)?;
    let expo = 2.0 * params.p - 1.0;
    Ok(states
        .iter()
        .map(|s| s.position as f64 / (s.n as f64).powf(expo))
        .collect())
}
