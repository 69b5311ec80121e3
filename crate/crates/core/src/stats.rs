//! Small statistics toolbox shared by the test suites and the CLI report
//! command: normal tails, goodness-of-fit p-values, and sample summaries.

use crate::{error, Result};

/// Upper tail of the standard normal, `P(Z > x)`.
///
/// Computed as `erfc(x / sqrt(2)) / 2`, which stays accurate far into the
/// tail where `1 - cdf(x)` would cancel.
#[inline]
pub fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (std::f64::consts::TAU).sqrt()
}

/// Chi-square goodness-of-fit p-value for observed counts against expected
/// proportions. `expected` must sum to the total count's scale, i.e. it holds
/// expected counts, not probabilities.
pub fn chi_square_pvalue(observed: &[u64], expected: &[f64]) -> Result<f64> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    if observed.len() != expected.len() {
        return Err(crate::Error::LengthMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(error::invalid("chi-square needs at least 2 cells"));
    }
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            return Err(error::invalid("expected counts must be positive"));
        }
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let df = (observed.len() - 1) as f64;
    let dist = ChiSquared::new(df).map_err(|e| error::invalid(e.to_string()))?;
    Ok(1.0 - dist.cdf(stat))
}

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - F|` for samples against
/// the model CDF `cdf`. Sorts a copy of the input.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(error::invalid("KS statistic needs at least one sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction:
/// `Q(d * (sqrt(n) + 0.12 + 0.11 / sqrt(n)))` where
/// `Q(x) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2)`.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let x = d * (sn + 0.12 + 0.11 / sn);
    if x < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k as f64) * (k as f64) * x * x).exp();
        p += term;
        sign = -sign;
        if term.abs() < 1e-16 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Moment summary of a sample.
#[derive(Clone, Copy, Debug)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub var: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(error::invalid("summary of empty sample"));
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(Summary {
            n,
            mean,
            var,
            min,
            max,
        })
    }

    pub fn std_dev(&self) -> f64 {
        self.var.sqrt()
    }
}

/// Linear-interpolation quantile (R type 7). `q` in `[0, 1]`, input need not
/// be sorted; sorts a copy.
pub fn quantile(xs: &[f64], q: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(error::invalid("quantile of empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(error::invalid("quantile level outside [0, 1]"));
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
    let h = q * (v.len() as f64 - 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}
