//! Bivariate standard normal quadrant probabilities.
//!
//! For correlation `delta`, the probability of the upper-right quadrant
//! `[a, inf) x [b, inf)` splits into the independent part plus a correction
//!
//! ```text
//! P = tail(a) * tail(b) + phi(delta, a, b),
//! phi(delta, a, b) = integral of psi(t, a, b) over t in [0, delta],
//! ```
//!
//! where `psi(t, x, y)` is the bivariate density with correlation `t`
//! evaluated at the corner. The identity holds because d/d delta of the
//! quadrant probability equals `psi(delta, a, b)`; the one-dimensional
//! integral is exact, cheap, and well behaved for |delta| up to 1.

use crate::{error, quad, stats, Result};
use serde::{Deserialize, Serialize};

/// Corner and correlation of one quadrant query.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BvnQuery {
    /// Correlation, strictly inside (-1, 1).
    pub delta: f64,
    pub a: f64,
    pub b: f64,
}

impl BvnQuery {
    pub fn new(delta: f64, a: f64, b: f64) -> Result<Self> {
        if !(delta.abs() < 1.0) {
            return Err(error::invalid("correlation must satisfy |delta| < 1"));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(error::invalid("corner coordinates must be finite"));
        }
        Ok(BvnQuery { delta, a, b })
    }
}

/// Bivariate standard normal density with correlation `delta` at `(x, y)`.
pub fn psi(delta: f64, x: f64, y: f64) -> Result<f64> {
    if !(delta.abs() < 1.0) {
        return Err(error::invalid("correlation must satisfy |delta| < 1"));
    }
    let om = 1.0 - delta * delta;
    let q = (x * x - 2.0 * delta * x * y + y * y) / (2.0 * om);
    Ok((-q).exp() / (std::f64::consts::TAU * om.sqrt()))
}

/// Correlation correction to the quadrant probability:
/// `P(corr = delta) - P(corr = 0)` for the quadrant at `(a, b)`.
///
/// Evaluated by adaptive quadrature of `psi(t, a, b)` over `[0, delta]` to
/// absolute error `1e-12`. Shares the sign of `delta`.
pub fn phi(q: BvnQuery) -> Result<f64> {
    const ABS_TOL: f64 = 1e-12;
    if q.delta == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| psi(t, q.a, q.b).expect("|t| < 1 inside integration range");
    let (lo, hi) = if q.delta > 0.0 {
        (0.0, q.delta)
    } else {
        (q.delta, 0.0)
    };
    let v = quad::adaptive_gk(&f, lo, hi, ABS_TOL, 20_000)?;
    Ok(if q.delta > 0.0 { v.value } else { -v.value })
}

/// Closed-form envelope for `|phi|` when both corner coordinates are
/// positive:
///
/// ```text
/// |phi(delta, a, b)| <= |delta| / (2 pi sqrt(1 - delta^2))
///                       * exp(-(a^2 + b^2)/2) * exp(|delta| a b / (1 - delta^2))
/// ```
///
/// Used to truncate long correlation sums: once the envelope is negligible
/// the quadrature can be skipped entirely.
pub fn phi_bound(q: BvnQuery) -> Result<f64> {
    if !(q.delta.abs() < 1.0) {
        return Err(error::invalid("correlation must satisfy |delta| < 1"));
    }
    if q.a <= 0.0 || q.b <= 0.0 {
        return Err(error::invalid("phi_bound requires a > 0 and b > 0"));
    }
    let om = 1.0 - q.delta * q.delta;
    let d = q.delta.abs();
    Ok(d / (std::f64::consts::TAU * om.sqrt())
        * (-(q.a * q.a + q.b * q.b) / 2.0 + d * q.a * q.b / om).exp())
}

/// Probability that a correlated standard normal pair lands in
/// `[a, inf) x [b, inf)`.
pub fn quadrant_prob(delta: f64, a: f64, b: f64) -> Result<f64> {
    let q = BvnQuery::new(delta, a, b)?;
    let p = stats::normal_tail(a) * stats::normal_tail(b) + phi(q)?;
    Ok(p.clamp(0.0, 1.0))
}
