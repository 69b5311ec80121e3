//! Self-similar Gaussian process kernels, exact grid simulation, and the
//! Lamperti correspondence.
//!
//! Every kernel here satisfies `R(cs, ct) = c^(2 rho) R(s, t)`, so the
//! process `X` is self-similar of index `rho` and `Y_u = e^(-rho u) X(e^u)`
//! is stationary. All of the kernel's long-range structure is carried by
//!
//! ```text
//! h(x) = x^(-rho) R(1, x),   x >= 1,
//! ```
//!
//! the stationary covariance at log-lag `log x`. Four variants:
//!
//! * `Fbm { h }`: fractional Brownian motion, `rho = H`.
//! * `Rlfbm { beta, gamma }`: the Riemann-Liouville-type kernel
//!   `R(s,t) = integral_0^(s^t) (s-u)^beta (t-u)^beta u^(-gamma) du`,
//!   `rho = beta - gamma/2 + 1/2`.
//! * `ErwDiff { p1, p2 }`: the Gaussian limit of the distance of two
//!   independent elephant random walks with sub-critical memories,
//!   `rho = 1/2`.
//! * `StableSpectral { alpha }`: `rho = 1/2` with
//!   `h(x) = f_alpha(log x) / f_alpha(0)`, `f_alpha` the symmetric
//!   alpha-stable density; positive definite by Bochner's theorem.

use crate::duo::PairParams;
use crate::erw::RegimeLabel;
use crate::rng::{standard_normal, StreamKey};
use crate::{error, quad, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Kernel family and parameters. Construct through the checked constructors;
/// deserialized values must be revalidated with [`KernelSpec::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum KernelSpec {
    Fbm { h: f64 },
    Rlfbm { beta: f64, gamma: f64 },
    ErwDiff { p1: f64, p2: f64 },
    StableSpectral { alpha: f64 },
}

impl KernelSpec {
    pub fn fbm(h: f64) -> Result<Self> {
        let spec = KernelSpec::Fbm { h };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rlfbm(beta: f64, gamma: f64) -> Result<Self> {
        let spec = KernelSpec::Rlfbm { beta, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn erw_diff(p1: f64, p2: f64) -> Result<Self> {
        let spec = KernelSpec::ErwDiff { p1, p2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn stable_spectral(alpha: f64) -> Result<Self> {
        let spec = KernelSpec::StableSpectral { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Fbm { h } => {
                if !(h > 0.0 && h < 1.0) {
                    return Err(error::invalid("Fbm requires h in (0, 1)"));
                }
            }
            KernelSpec::Rlfbm { beta, gamma } => {
                if !(beta > -0.5) {
                    return Err(error::invalid("Rlfbm requires beta > -1/2"));
                }
                if !(0.0..1.0).contains(&gamma) {
                    return Err(error::invalid("Rlfbm requires gamma in [0, 1)"));
                }
                if beta - gamma / 2.0 + 0.5 <= 0.0 {
                    return Err(error::invalid(
                        "Rlfbm requires beta - gamma/2 + 1/2 > 0",
                    ));
                }
            }
            KernelSpec::ErwDiff { p1, p2 } => {
                for p in [p1, p2] {
                    if !(p > 0.0) || crate::erw::WalkParams::new(p, 0.5)?.regime()
                        != RegimeLabel::Diffusive
                    {
                        return Err(error::invalid("ErwDiff requires p1, p2 in (0, 3/4)"));
                    }
                }
            }
            KernelSpec::StableSpectral { alpha } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    return Err(error::invalid("StableSpectral requires alpha in (0, 2]"));
                }
            }
        }
        Ok(())
    }

    /// Self-similarity index.
    pub fn rho(&self) -> f64 {
        match *self {
            KernelSpec::Fbm { h } => h,
            KernelSpec::Rlfbm { beta, gamma } => beta - gamma / 2.0 + 0.5,
            KernelSpec::ErwDiff { .. } | KernelSpec::StableSpectral { .. } => 0.5,
        }
    }

    /// `sigma^2 = R(1, 1)`, the variance at time 1.
    pub fn sigma2(&self) -> Result<f64> {
        kernel_eval(*self, 1.0, 1.0)
    }
}

/// Kernel value `R(s, t)` for positive times.
///
/// Closed forms for `Fbm` and `ErwDiff`; quadrature to relative error 1e-10
/// for `Rlfbm` and `StableSpectral`.
pub fn kernel_eval(spec: KernelSpec, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(error::invalid("kernel requires s, t > 0"));
    }
    spec.validate()?;
    match spec {
        KernelSpec::Fbm { h } => {
            // 0.5 (s^2H + t^2H - |t-s|^2H), written so the cancellation
            // between t^2H and (t-s)^2H for s << t is taken analytically:
            // t^2H - (t-s)^2H = -t^2H expm1(2H ln1p(-s/t)).
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            Ok(0.5
                * (lo.powf(2.0 * h)
                    - hi.powf(2.0 * h) * (2.0 * h * (-lo / hi).ln_1p()).exp_m1()))
        }
        KernelSpec::ErwDiff { p1, p2 } => {
            let m = s.min(t);
            let term = |p: f64| {
                (s * t).powf(2.0 * p - 1.0) / (3.0 - 4.0 * p) * m.powf(3.0 - 4.0 * p)
            };
            Ok(term(p1) + term(p2))
        }
        KernelSpec::Rlfbm { beta, gamma } => rlfbm_kernel(beta, gamma, s, t),
        KernelSpec::StableSpectral { alpha } => {
            let m = s.min(t);
            let ratio = s.max(t) / m;
            Ok((s * t).sqrt() * stable_h(alpha, ratio)?)
        }
    }
}

/// `integral_0^(s^t) (s-u)^beta (t-u)^beta u^(-gamma) du`.
///
/// The substitution `u = v^(1/(1-gamma))` removes the left-endpoint
/// singularity exactly; the remaining `(m - u)^beta` singularity at the right
/// endpoint (for beta < 0) is handled by tanh-sinh quadrature, with `m - u`
/// computed from the distance to the endpoint so it never cancels.
fn rlfbm_kernel(beta: f64, gamma: f64, s: f64, t: f64) -> Result<f64> {
    const REL_TOL: f64 = 1e-10;
    let m = s.min(t);
    let k = 1.0 / (1.0 - gamma);
    let v_max = m.powf(1.0 - gamma);
    let f = |from_a: f64, from_b: f64| {
        // m - u, evaluated from whichever endpoint is closer.
        let m_minus_u = if from_a <= from_b {
            m - from_a.powf(k)
        } else {
            -m * (k * (-from_b / v_max).ln_1p()).exp_m1()
        };
        ((s - m) + m_minus_u).powf(beta) * ((t - m) + m_minus_u).powf(beta) * k
    };
    // Crude magnitude for the first absolute tolerance; refined by a second
    // pass if the achieved relative error is not yet met.
    let scale = s.max(t).powf(2.0 * beta.max(0.0)) * v_max * k;
    let q = quad::tanh_sinh(&f, 0.0, v_max, (1e-12 * scale).max(1e-300), 12)?;
    if q.error_estimate <= REL_TOL * q.value.abs() {
        return Ok(q.value);
    }
    let q = quad::tanh_sinh(&f, 0.0, v_max, (1e-12 * q.value.abs()).max(1e-300), 13)?;
    if q.error_estimate <= REL_TOL * q.value.abs() {
        Ok(q.value)
    } else {
        Err(Error::QuadratureNoConverge {
            achieved: q.error_estimate / q.value.abs(),
            requested: REL_TOL,
        })
    }
}

/// `h(x) = f_alpha(log x) / f_alpha(0)` for the spectral kernel.
fn stable_h(alpha: f64, x: f64) -> Result<f64> {
    use statrs::function::gamma::gamma;
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok(stable_cos_transform(alpha, x.ln())? / gamma(1.0 + 1.0 / alpha))
}

/// Symmetric alpha-stable density `f_alpha(y) = (1/pi) integral_0^inf
/// cos(xi y) exp(-xi^alpha) d xi`.
pub fn stable_density(alpha: f64, y: f64) -> Result<f64> {
    use statrs::function::gamma::gamma;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(error::invalid("stable density requires alpha in (0, 2]"));
    }
    if y == 0.0 {
        return Ok(gamma(1.0 + 1.0 / alpha) / std::f64::consts::PI);
    }
    Ok(stable_cos_transform(alpha, y)? / std::f64::consts::PI)
}

/// `integral_0^inf cos(xi y) exp(-xi^alpha) d xi` for `y != 0`.
///
/// Few oscillations under the envelope: one adaptive pass. Large `y` (and any
/// `y` when `alpha < 1`): inverse-power series in `y^(-k alpha - 1)`, which is
/// convergent for `alpha < 1` and asymptotic with factorially small optimal
/// truncation otherwise; rejected unless its truncation term meets tolerance.
/// In between: sum of half-period panels with compensated accumulation,
/// truncated once the envelope bounds the remaining alternating tail below
/// tolerance. Combinations covered by none of the three are reported as
/// non-convergent rather than approximated.
fn stable_cos_transform(alpha: f64, y: f64) -> Result<f64> {
    use statrs::function::gamma::gamma;
    let y = y.abs();
    // |I(y)| <= I(0) = Gamma(1 + 1/alpha) anchors the absolute tolerances.
    let scale = gamma(1.0 + 1.0 / alpha);
    // exp(-45) ~ 3e-20 terminates the envelope.
    let xi_max = 45.0f64.powf(1.0 / alpha);

    if y * xi_max < 20.0 {
        let g = |xi: f64| (xi * y).cos() * (-xi.powf(alpha)).exp();
        let q = quad::adaptive_gk(&g, 0.0, xi_max, 1e-13 * scale, 20_000)?;
        return Ok(q.value);
    }
    if y >= 30.0 || alpha < 1.0 {
        if let Ok(v) = stable_tail_series(alpha, y) {
            return Ok(v);
        }
    }
    stable_panel_sum(alpha, y, scale)
}

/// Half-period panel sum for the oscillatory regime. The envelope
/// `exp(-xi^alpha)` has a cusp at the origin for `alpha < 1`, which tanh-sinh
/// absorbs; panels wide relative to the envelope's own scale are split until
/// their error estimates clear a fixed budget.
fn stable_panel_sum(alpha: f64, y: f64, scale: f64) -> Result<f64> {
    const REL_TOL: f64 = 1e-10;
    const MAX_PANELS: usize = 200_000;
    let xi_max = 45.0f64.powf(1.0 / alpha);
    let g = |xi: f64| (xi * y).cos() * (-xi.powf(alpha)).exp();
    let half = std::f64::consts::PI / (2.0 * y);
    let panels = y * xi_max / std::f64::consts::PI;
    if !(panels <= MAX_PANELS as f64) {
        return Err(Error::QuadratureNoConverge {
            achieved: panels,
            requested: MAX_PANELS as f64,
        });
    }
    let budget = 1e-13 * scale;
    let mut sum = quad::KahanSum::new();
    let mut err = 0.0f64;
    let first_right = half.min(xi_max);
    let first = quad::tanh_sinh(&|fa, _| g(fa), 0.0, first_right, budget, 12)?;
    sum.add(first.value);
    err += first.error_estimate;
    let mut left = first_right;
    while left < xi_max {
        let right = (left + 2.0 * half).min(xi_max);
        let (v, e) = refine_panel(&g, left, right, budget, 24);
        sum.add(v);
        err += e;
        left = right;
        // Remaining alternating tail is bounded by one full panel under the
        // envelope at the current edge.
        let tail = 2.0 * half * (-left.powf(alpha)).exp();
        if tail < 1e-14 * scale {
            err += tail;
            break;
        }
    }
    let value = sum.value();
    let tol = (REL_TOL * value.abs()).max(1e-11 * scale);
    if err <= tol {
        Ok(value)
    } else {
        Err(Error::QuadratureNoConverge {
            achieved: err,
            requested: tol,
        })
    }
}

/// One 15-point panel, bisected while its error estimate exceeds the budget.
fn refine_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64, budget: f64, depth: u32) -> (f64, f64) {
    let (v, e) = quad::gk15(f, a, b);
    if e <= budget || depth == 0 {
        return (v, e);
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = refine_panel(f, a, m, 0.5 * budget, depth - 1);
    let (v2, e2) = refine_panel(f, m, b, 0.5 * budget, depth - 1);
    (v1 + v2, e1 + e2)
}

/// Inverse-power expansion of the cosine transform:
/// `sum_k (-1)^(k+1) Gamma(k alpha + 1)/k! sin(k pi alpha / 2) y^(-k alpha - 1)`.
///
/// Terms are accumulated until the magnitude envelope (sine factor dropped,
/// so `alpha = 2` truncates honestly) falls below tolerance; a growing
/// envelope past `k = 2` marks the asymptotic divergence onset and stops the
/// sum at its smallest term. Errors instead of returning a sum whose
/// truncation term is above tolerance.
fn stable_tail_series(alpha: f64, y: f64) -> Result<f64> {
    use statrs::function::gamma::ln_gamma;
    const REL_TOL: f64 = 1e-12;
    const ABS_FLOOR: f64 = 1e-18;
    const MAX_TERMS: usize = 400;
    let ln_y = y.ln();
    let mut sum = quad::KahanSum::new();
    let mut prev_mag = f64::INFINITY;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        let mag = (ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) - (kf * alpha + 1.0) * ln_y)
            .exp();
        let tol = (REL_TOL * sum.value().abs()).max(ABS_FLOOR);
        if mag <= tol {
            return Ok(sum.value());
        }
        if mag >= prev_mag && k > 2 {
            return Err(Error::QuadratureNoConverge {
                achieved: prev_mag,
                requested: tol,
            });
        }
        // Intermediate growth past the final scale poisons the cancellation.
        if mag > 1e12 {
            return Err(Error::QuadratureNoConverge {
                achieved: mag,
                requested: 1e12,
            });
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum.add(sign * mag * (kf * std::f64::consts::PI * alpha / 2.0).sin());
        prev_mag = mag;
    }
    Err(Error::QuadratureNoConverge {
        achieved: prev_mag,
        requested: ABS_FLOOR,
    })
}

/// Max relative deviation of `R(cs, ct)` from `c^(2 rho) R(s, t)` over the
/// given pairs.
pub fn self_similarity_check(spec: KernelSpec, c: f64, pairs: &[(f64, f64)]) -> Result<f64> {
    if !(c > 0.0) {
        return Err(error::invalid("scaling factor must be positive"));
    }
    let factor = c.powf(2.0 * spec.rho());
    let mut worst = 0.0f64;
    for &(s, t) in pairs {
        let scaled = kernel_eval(spec, c * s, c * t)?;
        let reference = factor * kernel_eval(spec, s, t)?;
        worst = worst.max((scaled - reference).abs() / reference.abs());
    }
    Ok(worst)
}

/// Sampled `h(x)` profile with a fitted decay exponent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HProfile {
    pub xs: Vec<f64>,
    pub hs: Vec<f64>,
    /// Least-squares slope of `log h` against `log x` (against `log log x`
    /// for the spectral variant, whose decay is polynomial in `log x`) over
    /// the top decade of `xs` restricted to `x >= 100`. `None` when fewer
    /// than two usable points remain or when the decay is super-polynomial
    /// (the Gaussian spectral case `alpha = 2`), where no finite-sample
    /// exponent is meaningful.
    pub fitted_exponent: Option<f64>,
    /// Number of points entering the fit.
    pub fit_points: usize,
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Evaluate `h(x) = x^(-rho) R(1, x)` on an increasing grid of `x >= 1` and
/// fit its decay exponent over the top decade (see [`HProfile`]).
pub fn h_profile(spec: KernelSpec, xs: &[f64]) -> Result<HProfile> {
    if xs.is_empty() || xs[0] < 1.0 {
        return Err(error::invalid("profile grid must start at x >= 1"));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(error::invalid("profile grid must be strictly increasing"));
    }
    let rho = spec.rho();
    let mut hs = Vec::with_capacity(xs.len());
    for &x in xs {
        hs.push(x.powf(-rho) * kernel_eval(spec, 1.0, x)?);
    }

    let superpolynomial = matches!(spec, KernelSpec::StableSpectral { alpha } if alpha == 2.0);
    let x_lo = (xs.last().expect("nonempty") / 10.0).max(100.0);
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&hs)
        .filter(|&(&x, &h)| x >= x_lo && h > 0.0)
        .map(|(&x, &h)| {
            let abscissa = if matches!(spec, KernelSpec::StableSpectral { .. }) {
                x.ln().ln()
            } else {
                x.ln()
            };
            (abscissa, h.ln())
        })
        .collect();
    let fitted_exponent = if superpolynomial {
        None
    } else {
        least_squares_slope(&pts)
    };
    Ok(HProfile {
        xs: xs.to_vec(),
        hs,
        fitted_exponent,
        fit_points: pts.len(),
    })
}

/// Largest grid accepted by the dense factorization paths.
pub const MAX_GRID: usize = 1 << 12;

/// Dense covariance matrix of a kernel on an increasing positive grid.
#[derive(Clone, Debug)]
pub struct CovMatrix {
    grid: Vec<f64>,
    mat: DMatrix<f64>,
}

impl CovMatrix {
    pub fn new(spec: KernelSpec, grid: &[f64]) -> Result<Self> {
        if grid.is_empty() || grid[0] <= 0.0 {
            return Err(error::invalid("grid must be nonempty with positive times"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(error::invalid("grid must be strictly increasing"));
        }
        if grid.len() > MAX_GRID {
            return Err(error::invalid(format!(
                "grid length capped at {MAX_GRID} for dense factorization"
            )));
        }
        let n = grid.len();
        let mut mat = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = kernel_eval(spec, grid[i], grid[j])?;
                mat[(i, j)] = v;
                mat[(j, i)] = v;
            }
        }
        Ok(CovMatrix {
            grid: grid.to_vec(),
            mat,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// `(lambda_min, lambda_max)` by symmetric eigendecomposition.
    pub fn eigen_range(&self) -> (f64, f64) {
        let eig = self.mat.clone().symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &l in eig.eigenvalues.iter() {
            lo = lo.min(l);
            hi = hi.max(l);
        }
        (lo, hi)
    }
}

/// Lower-triangular factor with the diagonal jitter that was needed.
struct Factor {
    /// Row i holds the first i+1 entries of L's row i.
    rows: Vec<Vec<f64>>,
    jitter: f64,
}

/// Largest diagonal jitter ever added, as a multiple of `trace/dim`.
pub const MAX_JITTER_SCALE: f64 = 1e-10;

fn factorize(cov: &CovMatrix) -> Result<Factor> {
    let dim = cov.dim();
    let unit = cov.mat.trace() / dim as f64;
    for &scale in &[0.0, 1e-14, 1e-12, MAX_JITTER_SCALE] {
        let jitter = scale * unit;
        let mut m = cov.mat.clone();
        for i in 0..dim {
            m[(i, i)] += jitter;
        }
        if let Some(chol) = m.cholesky() {
            let l = chol.l();
            let rows = (0..dim)
                .map(|i| (0..=i).map(|j| l[(i, j)]).collect())
                .collect();
            return Ok(Factor { rows, jitter });
        }
    }
    Err(Error::FactorizationFailed {
        jitter_tried: MAX_JITTER_SCALE * unit,
    })
}

/// Exact Gaussian samples of a kernel on a grid.
#[derive(Clone, Debug)]
pub struct SamplePaths {
    pub grid: Vec<f64>,
    /// `values[r][i]` is replica r at `grid[i]`.
    pub values: Vec<Vec<f64>>,
    /// Diagonal jitter added to achieve factorization; 0 when none was needed.
    pub jitter: f64,
}

/// Stream exact Gaussian grid samples to a visitor without materializing the
/// replica matrix. Replica `r` draws its normals from
/// `key.with_replica(key.replica + r)`, so any replica subrange reproduces
/// the same paths. Returns the jitter used by the factorization.
pub fn for_each_path(
    spec: KernelSpec,
    grid: &[f64],
    replicas: u32,
    key: StreamKey,
    mut visit: impl FnMut(u32, &[f64]),
) -> Result<f64> {
    let cov = CovMatrix::new(spec, grid)?;
    let factor = factorize(&cov)?;
    let dim = cov.dim();
    let mut z = vec![0.0f64; dim];
    let mut x = vec![0.0f64; dim];
    for r in 0..replicas {
        let rk = key.with_replica(key.replica.wrapping_add(r));
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = standard_normal(rk, i as u64);
        }
        for i in 0..dim {
            let row = &factor.rows[i];
            let mut acc = 0.0;
            for (j, &lij) in row.iter().enumerate() {
                acc += lij * z[j];
            }
            x[i] = acc;
        }
        visit(r, &x);
    }
    Ok(factor.jitter)
}

/// Materialized form of [`for_each_path`].
pub fn sample_paths(
    spec: KernelSpec,
    grid: &[f64],
    replicas: u32,
    key: StreamKey,
) -> Result<SamplePaths> {
    let mut values = Vec::with_capacity(replicas as usize);
    let jitter = for_each_path(spec, grid, replicas, key, |_, x| values.push(x.to_vec()))?;
    Ok(SamplePaths {
        grid: grid.to_vec(),
        values,
        jitter,
    })
}

/// Lamperti transform of one path sampled on a geometric grid `t_n = a^n`:
/// `Y_n = t_n^(-rho) X(t_n)`. The result is a stationary sequence whose lag-j
/// covariance is `h(a^j)`.
pub fn lamperti(spec: KernelSpec, grid: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    if grid.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: grid.len(),
            right: values.len(),
        });
    }
    if grid.len() < 2 {
        return Err(error::invalid("Lamperti transform needs at least 2 grid points"));
    }
    if grid[0] <= 0.0 {
        return Err(error::invalid("grid times must be positive"));
    }
    let ratio = grid[1] / grid[0];
    for w in grid.windows(2) {
        if !(w[1] > w[0]) || ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9 {
            return Err(error::invalid("Lamperti transform requires a geometric grid"));
        }
    }
    let rho = spec.rho();
    Ok(grid
        .iter()
        .zip(values)
        .map(|(&t, &x)| t.powf(-rho) * x)
        .collect())
}

/// Evaluate the Gaussian coupling of a walk-distance process at time `t`
/// from two independent Brownian values:
///
/// ```text
/// X(t) = t^(2 p - 1) / sqrt(3 - 4 p)  * B (t^(3 - 4 p))
///      - t^(2 p'- 1) / sqrt(3 - 4 p') * B'(t^(3 - 4 p')),
/// ```
///
/// whose covariance is exactly the `ErwDiff` kernel. `bm_values` must be
/// `(B(t^(3-4p)), B'(t^(3-4p')))`.
pub fn coupling_process(pair: PairParams, t: f64, bm_values: (f64, f64)) -> Result<f64> {
    for p in [pair.first.p, pair.second.p] {
        if !(p > 0.0)
            || crate::erw::WalkParams::new(p, 0.5)?.regime() != RegimeLabel::Diffusive
        {
            return Err(error::invalid("coupling requires p, p' in (0, 3/4)"));
        }
    }
    if !(t > 0.0) {
        return Err(error::invalid("coupling requires t > 0"));
    }
    let (p1, p2) = (pair.first.p, pair.second.p);
    Ok(t.powf(2.0 * p1 - 1.0) / (3.0 - 4.0 * p1).sqrt() * bm_values.0
        - t.powf(2.0 * p2 - 1.0) / (3.0 - 4.0 * p2).sqrt() * bm_values.1)
}
