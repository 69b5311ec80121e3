//! Block machinery for iterated-logarithm analysis of self-similar Gaussian
//! processes on geometric time grids.
//!
//! Everything here works on the grid `t_n = alpha^n`. Increments across
//! consecutive grid points form a stationary sequence after standardisation;
//! the block variance `gamma_k`, the tail levels `a_k`, and the inter-block
//! correlations `delta_j` are the three ingredients, and the second-moment
//! (exceedance-ratio) series built from them quantifies how close the block
//! events are to independent.

use crate::bvn::{self, BvnQuery};
use crate::error;
use crate::quad::{self, KahanSum};
use crate::sgp::{kernel_eval, KernelSpec};
use crate::stats;
use crate::{Error, Result};

/// Grid ratio used by the block tools when the caller does not pick one.
/// Large ratios make the inter-block correlations decay faster.
pub const DEFAULT_ALPHA: f64 = 16.0;

/// Running maxima of the normalised statistic start here: `log log t`
/// reaches 1, so the normaliser is past its pre-asymptotic blow-up.
pub const STAT_MIN_TIME: f64 = 15.154262241479262; // e^e

/// Geometric time grid `t_n = alpha^n`, `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGrid {
    alpha: f64,
    n_max: usize,
}

impl GeometricGrid {
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(error::invalid("grid ratio must be finite and exceed 1"));
        }
        if n_max == 0 {
            return Err(error::invalid("grid needs at least one point"));
        }
        if (n_max as f64) * alpha.ln() > 690.0 {
            return Err(error::invalid("grid end alpha^n_max overflows f64"));
        }
        Ok(Self { alpha, n_max })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `t_n = alpha^n`; `n` must be in `1..=n_max`.
    pub fn t(&self, n: usize) -> f64 {
        debug_assert!(n >= 1 && n <= self.n_max);
        self.alpha.powi(n as i32)
    }

    pub fn times(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| self.t(n)).collect()
    }
}

/// Variance of the grid increment `X(t_{k+1}) - X(t_k)`, `1 <= k < n_max`.
pub fn gamma_block(spec: KernelSpec, grid: &GeometricGrid, k: usize) -> Result<f64> {
    if k < 1 || k >= grid.n_max {
        return Err(error::invalid("block index must satisfy 1 <= k < n_max"));
    }
    let (s, t) = (grid.t(k), grid.t(k + 1));
    let g = kernel_eval(spec, t, t)? - 2.0 * kernel_eval(spec, s, t)? + kernel_eval(spec, s, s)?;
    if !(g > 0.0) {
        return Err(Error::NonPositive {
            what: "block increment variance",
            value: g,
        });
    }
    Ok(g)
}

/// Tail level `a_k = sqrt(2 log log t_{k+1}) = sqrt(2 (log(k+1) + log log alpha))`.
///
/// NaN when `log log t_{k+1} < 0`, i.e. when the grid ratio is so close to 1
/// that the early grid points sit below `e`.
pub fn a_level(alpha: f64, k: usize) -> f64 {
    let sq = 2.0 * (((k + 1) as f64).ln() + alpha.ln().ln());
    sq.sqrt()
}

/// Per-block tables on a geometric grid: increment variances, tail levels,
/// and the process scale `sigma = sqrt(R(1,1))`.
#[derive(Debug, Clone)]
pub struct BlockQuantities {
    /// `gamma[k-1] = Var(X(t_{k+1}) - X(t_k))` for `k = 1..n_max-1`.
    pub gamma: Vec<f64>,
    /// `a[k-1] = a_k`; NaN below `valid_from`.
    pub a: Vec<f64>,
    /// `sqrt(R(1,1))`.
    pub sigma: f64,
    /// Smallest `k` with a real tail level; `a_k` is increasing from here on.
    pub valid_from: usize,
}

impl BlockQuantities {
    pub fn new(spec: KernelSpec, grid: &GeometricGrid) -> Result<Self> {
        if grid.n_max < 2 {
            return Err(error::invalid("block tables need n_max >= 2"));
        }
        let mut gamma = Vec::with_capacity(grid.n_max - 1);
        let mut a = Vec::with_capacity(grid.n_max - 1);
        let mut valid_from = grid.n_max;
        for k in 1..grid.n_max {
            gamma.push(gamma_block(spec, grid, k)?);
            let level = a_level(grid.alpha, k);
            if level.is_nan() {
                if valid_from <= k {
                    return Err(error::invalid("tail levels must be increasing once real"));
                }
            } else if valid_from > k {
                valid_from = k;
            }
            a.push(level);
        }
        let sigma = spec.sigma2()?.sqrt();
        Ok(Self {
            gamma,
            a,
            sigma,
            valid_from,
        })
    }
}

/// `L_j(alpha)`: unnormalised covariance between standardised grid increments
/// `j` blocks apart, expressed through the scale-free profile `h`.
pub fn l_block(spec: KernelSpec, alpha: f64, j: usize) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(error::invalid("grid ratio must be finite and exceed 1"));
    }
    let rho = spec.rho();
    let h = |m: usize| h_at_power(spec, alpha, m);
    let jm = if j == 0 { 1 } else { j - 1 };
    Ok((1.0 + alpha.powf(-2.0 * rho)) * h(j)?
        - alpha.powf(-rho) * (h(j + 1)? + h(jm)?))
}

/// `h(alpha^m)` with a hard zero once `alpha^m` leaves f64 range; every
/// supported kernel has `h -> 0` there, far below any tolerance in use.
fn h_at_power(spec: KernelSpec, alpha: f64, m: usize) -> Result<f64> {
    if (m as f64) * alpha.ln() > 230.0 {
        return Ok(0.0);
    }
    let x = alpha.powi(m as i32);
    let rho = spec.rho();
    Ok(x.powf(-rho) * kernel_eval(spec, 1.0, x)?)
}

/// Correlation `delta_j = L_j(alpha) / L_0(alpha)` between standardised grid
/// increments `j` blocks apart. Exactly 1 at `j = 0`.
pub fn delta_corr(spec: KernelSpec, alpha: f64, j: usize) -> Result<f64> {
    if j == 0 {
        return Ok(1.0);
    }
    let l0 = l_block(spec, alpha, 0)?;
    if !(l0 > 0.0) {
        return Err(Error::NonPositive {
            what: "block variance scale L_0",
            value: l0,
        });
    }
    Ok(l_block(spec, alpha, j)? / l0)
}

/// Max over `j = 1..=j_max` of `|delta_j| (j log alpha)^eta`: finite output
/// witnesses the polynomial-decay envelope with exponent `eta`.
pub fn delta_decay_check(spec: KernelSpec, alpha: f64, j_max: usize, eta: f64) -> Result<f64> {
    if j_max == 0 {
        return Err(error::invalid("decay check needs j_max >= 1"));
    }
    let mut worst = 0.0f64;
    for j in 1..=j_max {
        let d = delta_corr(spec, alpha, j)?;
        worst = worst.max(d.abs() * ((j as f64) * alpha.ln()).powf(eta));
    }
    Ok(worst)
}

/// Standard normal upper-tail probability with its elementary sandwich
/// `(1/a - 1/a^3) phi(a) <= P <= phi(a)/a`, valid for `a >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventProb {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

/// Probability that a standardised block increment exceeds level `a`.
pub fn event_prob(a: f64) -> Result<EventProb> {
    if !(a >= 1.0) {
        return Err(error::invalid("tail sandwich requires level a >= 1"));
    }
    let density_over_a = (-0.5 * a * a).exp() / (a * (2.0 * std::f64::consts::PI).sqrt());
    Ok(EventProb {
        lower: 0.5 * density_over_a,
        value: stats::normal_tail(a),
        upper: density_over_a,
    })
}

/// Second-moment ratio of the block exceedance count at horizon `n`:
/// `numerator = Var(N_n)` written as diagonal plus pairwise-covariance sums,
/// `denominator = (E N_n)^2`. A ratio that dies like `1/sqrt(log n)` is the
/// divergent-mean half of a Borel-Cantelli argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ERRatioReport {
    pub n: usize,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// `er_ratio` at each horizon in `ns` (strictly increasing, first >= 2),
/// sharing the level and correlation tables across horizons.
pub fn er_ratio_series(spec: KernelSpec, alpha: f64, ns: &[usize]) -> Result<Vec<ERRatioReport>> {
    if ns.is_empty() {
        return Err(error::invalid("horizon list must be nonempty"));
    }
    if ns[0] < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(error::invalid(
            "horizons must be strictly increasing and start at n >= 2",
        ));
    }
    let n_max = *ns.last().expect("nonempty");

    // a[k], p[k] for k = 1..=n_max (index 0 unused).
    let mut a = vec![0.0f64; n_max + 1];
    let mut p = vec![0.0f64; n_max + 1];
    for k in 1..=n_max {
        a[k] = a_level(alpha, k);
        if !(a[k] >= 1.0) {
            return Err(error::invalid(
                "grid ratio too small: tail levels must start at a_1 >= 1",
            ));
        }
        p[k] = stats::normal_tail(a[k]);
    }

    let deltas = delta_table(spec, alpha, n_max.saturating_sub(1))?;
    // Rows far out enough that even n_max copies of the largest possible
    // term change nothing are dropped once the cheap row bound says so.
    let rows: Vec<(usize, f64)> = deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| (i + 1, d))
        .filter(|&(j, d)| {
            if d == 0.0 {
                return false;
            }
            if j <= 64 || j + 1 > n_max {
                return true;
            }
            let bound = bvn::phi_bound(BvnQuery::new(d, a[1], a[1 + j]).expect("levels >= 1"))
                .unwrap_or(f64::INFINITY);
            (n_max as f64) * bound >= 1e-12
        })
        .collect();

    let mut diag = KahanSum::new();
    let mut off = KahanSum::new();
    let mut p_sum = KahanSum::new();
    let mut reports = Vec::with_capacity(ns.len());
    let mut want = ns.iter().copied().peekable();
    for n in 1..=n_max {
        p_sum.add(p[n]);
        diag.add(p[n] - p[n] * p[n]);
        for &(j, d) in &rows {
            if j >= n {
                break;
            }
            let q = BvnQuery::new(d, a[n - j], a[n]).expect("levels >= 1, |delta| < 1");
            if bvn::phi_bound(q)? < 1e-18 {
                continue;
            }
            off.add(er_phi(q)?);
        }
        if want.peek() == Some(&n) {
            want.next();
            let numerator = diag.value() + 2.0 * off.value();
            let denominator = p_sum.value() * p_sum.value();
            reports.push(ERRatioReport {
                n,
                numerator,
                denominator,
                ratio: numerator / denominator,
            });
        }
    }
    Ok(reports)
}

/// Single-horizon wrapper around [`er_ratio_series`].
pub fn er_ratio(spec: KernelSpec, alpha: f64, n: usize) -> Result<ERRatioReport> {
    Ok(er_ratio_series(spec, alpha, &[n])?
        .pop()
        .expect("one horizon in, one report out"))
}

/// `delta_j` for `j = 1..=j_max`, truncated after two consecutive entries
/// under 1e-18 (zeros from there on contribute nothing through `phi`).
fn delta_table(spec: KernelSpec, alpha: f64, j_max: usize) -> Result<Vec<f64>> {
    if j_max == 0 {
        return Ok(Vec::new());
    }
    let rho = spec.rho();
    let mut h = Vec::with_capacity(j_max + 2);
    for m in 0..=j_max + 1 {
        h.push(h_at_power(spec, alpha, m)?);
    }
    let am = alpha.powf(-rho);
    let l = |j: usize| {
        let jm = if j == 0 { 1 } else { j - 1 };
        (1.0 + am * am) * h[j] - am * (h[j + 1] + h[jm])
    };
    let l0 = l(0);
    if !(l0 > 0.0) {
        return Err(Error::NonPositive {
            what: "block variance scale L_0",
            value: l0,
        });
    }
    let mut out = Vec::with_capacity(j_max);
    let mut tiny_run = 0usize;
    for j in 1..=j_max {
        let d = l(j) / l0;
        if !(d.abs() < 1.0) {
            return Err(error::invalid(
                "block correlation must stay strictly inside (-1, 1)",
            ));
        }
        if d.abs() < 1e-18 {
            tiny_run += 1;
            if tiny_run >= 2 {
                break;
            }
        } else {
            tiny_run = 0;
        }
        out.push(d);
    }
    while matches!(out.last(), Some(&d) if d.abs() < 1e-18) {
        out.pop();
    }
    Ok(out)
}

/// `phi(delta, a, b)` tuned for the exceedance sums: midpoint rule for
/// near-zero correlations (error is cubic in `delta` and lands far below
/// 1e-12 here), a single 15-point panel for small ones, full adaptive
/// quadrature otherwise. Absolute error stays within 1e-12 on every path.
fn er_phi(q: BvnQuery) -> Result<f64> {
    let d = q.delta;
    if d.abs() < 1e-6 {
        return Ok(d * bvn::psi(0.5 * d, q.a, q.b)?);
    }
    if d.abs() <= 0.05 {
        let (lo, hi) = if d < 0.0 { (d, 0.0) } else { (0.0, d) };
        let f = |t: f64| bvn::psi(t, q.a, q.b).expect("|t| <= |delta| < 1");
        let (v, e) = quad::gk15(&f, lo, hi);
        if e <= 1e-13 {
            return Ok(if d < 0.0 { -v } else { v });
        }
    }
    bvn::phi(q)
}

/// Gaussian concentration bound `exp(-(x - m_hat)^2 / (2 v))` for the upper
/// tail of a supremum with scale proxy `m_hat` and top variance `v`.
pub fn borell_tis_bound(m_hat: f64, v: f64, x: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::NonPositive {
            what: "top variance",
            value: v,
        });
    }
    if !(x > m_hat) {
        return Err(error::invalid(
            "bound holds past the scale proxy: x > m_hat required",
        ));
    }
    Ok((-(x - m_hat) * (x - m_hat) / (2.0 * v)).exp())
}

/// One replica of the normalised-supremum diagnostics on a geometric grid.
#[derive(Debug, Clone)]
pub struct LilReplicaStat {
    /// `X(t_n) / sqrt(2 t_n^(2 rho) log log t_n)` aligned with the grid;
    /// NaN where `t_n <= e` leaves the normaliser undefined.
    pub norm: Vec<f64>,
    /// Running max of `norm` over `t_n >= STAT_MIN_TIME`.
    pub running_max_plus: f64,
    /// Running max of `-norm` over the same window.
    pub running_max_minus: f64,
    /// `fires[k-1]`: did `X(t_{k+1}) - X(t_k) > sqrt(gamma_k) a_k`? Always
    /// false where the tail level is undefined.
    pub fires: Vec<bool>,
    pub fire_count: usize,
}

/// Normalised-supremum statistic and block-event indicators for one sampled
/// path given on the grid times.
pub fn lil_statistic(
    spec: KernelSpec,
    grid: &GeometricGrid,
    blocks: &BlockQuantities,
    values: &[f64],
) -> Result<LilReplicaStat> {
    if values.len() != grid.n_max {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: grid.n_max,
        });
    }
    if blocks.gamma.len() != grid.n_max - 1 {
        return Err(Error::LengthMismatch {
            left: blocks.gamma.len(),
            right: grid.n_max - 1,
        });
    }
    let rho = spec.rho();
    let mut norm = Vec::with_capacity(values.len());
    let mut max_plus = f64::NEG_INFINITY;
    let mut max_minus = f64::NEG_INFINITY;
    for (i, &x) in values.iter().enumerate() {
        let t = grid.t(i + 1);
        let loglog = t.ln().ln();
        if loglog <= 0.0 {
            norm.push(f64::NAN);
            continue;
        }
        let s = x / (2.0 * t.powf(2.0 * rho) * loglog).sqrt();
        norm.push(s);
        if t >= STAT_MIN_TIME {
            max_plus = max_plus.max(s);
            max_minus = max_minus.max(-s);
        }
    }
    let mut fires = Vec::with_capacity(grid.n_max - 1);
    let mut fire_count = 0usize;
    for k in 1..grid.n_max {
        let hit = values[k] - values[k - 1] > blocks.gamma[k - 1].sqrt() * blocks.a[k - 1];
        fires.push(hit);
        fire_count += usize::from(hit);
    }
    Ok(LilReplicaStat {
        norm,
        running_max_plus: max_plus,
        running_max_minus: max_minus,
        fires,
        fire_count,
    })
}
