//! Estimate bookkeeping and the statistical machinery shared by the
//! estimators: confidence intervals, Pearson chi-square against uniform,
//! scaling-law fits, and the quartic tail-sum bound check.

use crate::error::{Error, Result};
use crate::rng::SeedLineage;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

const Z95: f64 = 1.959_963_984_540_054;

/// A Monte Carlo result with its full seed lineage, so it can be reproduced
/// exactly regardless of how trials were scheduled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance of the per-trial values.
    pub variance: f64,
    pub ci95: (f64, f64),
    pub lineage: SeedLineage,
}

impl Estimate {
    /// Estimate of a real-valued statistic. Normal-approximation CI.
    pub fn from_samples(samples: &[f64], lineage: SeedLineage) -> Self {
        let n = samples.len() as u64;
        assert!(n > 0, "estimates need at least one trial");
        // Welford, accumulated in trial order for bit-stable results.
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        for (i, &x) in samples.iter().enumerate() {
            let delta = x - mean;
            mean += delta / (i as f64 + 1.0);
            m2 += delta * (x - mean);
        }
        let variance = if n > 1 { m2 / (n as f64 - 1.0) } else { 0.0 };
        let half = Z95 * (variance / n as f64).sqrt();
        Estimate {
            trials: n,
            mean,
            variance,
            ci95: (mean - half, mean + half),
            lineage,
        }
    }

    /// Estimate of an indicator statistic. Below 1000 trials the normal
    /// approximation is unusable for the tiny probabilities measured here,
    /// so the CI switches to exact binomial (Clopper-Pearson).
    pub fn from_indicator(successes: u64, trials: u64, lineage: SeedLineage) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let variance = if trials > 1 {
            p * (1.0 - p) * n / (n - 1.0)
        } else {
            0.0
        };
        let ci95 = if trials >= 1000 {
            let half = Z95 * (variance / n).sqrt();
            ((p - half).max(0.0), (p + half).min(1.0))
        } else {
            clopper_pearson(successes, trials, 0.95)
        };
        Estimate {
            trials,
            mean: p,
            variance,
            ci95,
            lineage,
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }

    pub fn ci_contains(&self, value: f64) -> bool {
        self.ci95.0 <= value && value <= self.ci95.1
    }
}

/// Exact binomial confidence interval at the given confidence level.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(successes <= trials && trials > 0);
    assert!(0.0 < confidence && confidence < 1.0);
    let alpha = 1.0 - confidence;
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).unwrap().inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).unwrap().inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Pearson chi-square of observed counts against the uniform distribution.
/// Returns (statistic, p-value); the p-value comes from the chi-square CDF,
/// i.e. the regularized incomplete gamma function, with c-1 degrees of
/// freedom.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    let c = counts.len();
    if c < 2 {
        return Err(Error::CellCountTooLow { expected: 0.0 });
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / c as f64;
    if expected < 5.0 {
        return Err(Error::CellCountTooLow { expected });
    }
    let stat: f64 = counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((c - 1) as f64).expect("df >= 1");
    let p = 1.0 - dist.cdf(stat);
    Ok((stat, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    /// mean = c * n^alpha
    Pow,
    /// mean = c * n * (log2 n)^beta
    NLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub model: ScalingModel,
    pub amplitude: f64,
    /// alpha for Pow, beta for NLog.
    pub exponent: f64,
    /// Root-mean-square residual in the transformed (log) coordinates.
    pub residual: f64,
    /// Per-point normalized values: mean / n^alpha for Pow (model check),
    /// mean / (n log2 n) for NLog (the trend the fit summarizes).
    pub normalized: Vec<(u64, f64)>,
}

/// Least-squares fit of a scaling law through (n, mean) points. Requires at
/// least 4 points spanning at least 3 doublings of n.
pub fn fit_scaling(points: &[(u64, f64)], model: ScalingModel) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientPoints);
    }
    let min_n = points.iter().map(|p| p.0).min().unwrap();
    let max_n = points.iter().map(|p| p.0).max().unwrap();
    if min_n == 0 || max_n < min_n * 8 {
        return Err(Error::InsufficientPoints);
    }
    if points.iter().any(|&(n, m)| n < 2 || m <= 0.0) {
        return Err(Error::InvalidPoints);
    }

    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, m)| match model {
            ScalingModel::Pow => ((n as f64).ln(), m.ln()),
            ScalingModel::NLog => ((n as f64).log2().ln(), (m / n as f64).ln()),
        })
        .collect();
    let (slope, intercept) = least_squares(&xy);
    let residual = (xy
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<f64>()
        / xy.len() as f64)
        .sqrt();
    let amplitude = intercept.exp();
    let normalized = points
        .iter()
        .map(|&(n, m)| {
            let v = match model {
                ScalingModel::Pow => m / (n as f64).powf(slope),
                ScalingModel::NLog => m / (n as f64 * (n as f64).log2()),
            };
            (n, v)
        })
        .collect();
    Ok(ScalingFit {
        model,
        amplitude,
        exponent: slope,
        residual,
        normalized,
    })
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let sx: f64 = xy.iter().map(|p| p.0).sum();
    let sy: f64 = xy.iter().map(|p| p.1).sum();
    let sxx: f64 = xy.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = xy.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Partial sum and bound for sum_{l>=1} 1/(r+l)^4 <= 1/r^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunkySum {
    pub partial_sum: f64,
    /// Integral bound on the truncated tail: 1 / (3 (r+terms)^3).
    pub tail_bound: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Evaluate both sides of the quartic tail-sum inequality. PASS means the
/// partial sum plus an analytic bound on the truncation error stays at or
/// below 1/r^3.
pub fn funkysum_check(r: f64, terms: u64) -> FunkySum {
    assert!(r > 0.0, "r must be positive");
    assert!(terms >= 10_000, "cutoff too small for the tail bound");
    // summed small-terms-first to limit rounding error
    let mut partial = 0.0f64;
    for l in (1..=terms).rev() {
        let d = r + l as f64;
        partial += 1.0 / (d * d * d * d);
    }
    let t = r + terms as f64;
    let tail_bound = 1.0 / (3.0 * t * t * t);
    let bound = 1.0 / (r * r * r);
    FunkySum {
        partial_sum: partial,
        tail_bound,
        bound,
        pass: partial + tail_bound <= bound,
    }
}
