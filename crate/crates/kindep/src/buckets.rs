//! Balls-into-buckets simulation and the falling-factorial moment behind
//! the max-load tail bound: sum_i B_i(B_i-1)...(B_i-k+1) counts the ordered
//! k-tuples of balls sharing a bucket, and its expectation under any
//! k-independent placement is exactly n^{underline k} / n^{k-1}.

use crate::error::{Error, Result};
use crate::families::IndexFamilySpec;
use crate::rng::{SeedLineage, SplitMix64};
use crate::runner::run_trials;
use crate::stats::Estimate;
use num::BigUint;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketLoads {
    counts: Vec<u64>,
    balls: u64,
}

impl BucketLoads {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let balls = counts.iter().sum();
        BucketLoads { counts, balls }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn balls(&self) -> u64 {
        self.balls
    }
}

/// Throw n_balls into n_buckets with one draw from the family.
pub fn throw(
    n_balls: u64,
    n_buckets: u64,
    family: &IndexFamilySpec,
    stream: &mut SplitMix64,
) -> Result<BucketLoads> {
    assert!(n_balls >= 1 && n_buckets >= 1);
    let draw = family.draw(n_balls, n_buckets, stream)?;
    let mut counts = vec![0u64; n_buckets as usize];
    for ball in 0..n_balls {
        counts[draw.index(ball) as usize] += 1;
    }
    Ok(BucketLoads {
        counts,
        balls: n_balls,
    })
}

pub fn max_load(loads: &BucketLoads) -> u64 {
    loads.counts.iter().copied().max().unwrap_or(0)
}

/// Exact k-th falling-factorial moment of the loads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentStat {
    pub k: u32,
    pub value: BigUint,
}

pub fn falling_factorial_moment(loads: &BucketLoads, k: u32) -> MomentStat {
    assert!(k >= 1);
    let mut total = BigUint::from(0u32);
    for &b in &loads.counts {
        if b >= u64::from(k) {
            let mut term = BigUint::from(1u32);
            for i in 0..u64::from(k) {
                term *= b - i;
            }
            total += term;
        }
    }
    MomentStat { k, value: total }
}

/// n^{underline k} / n^{k-1}, the exact mean of the k-th moment under any
/// k-independent placement of n balls into n buckets.
pub fn expected_moment(n: u64, k: u32) -> f64 {
    let mut falling = 1.0f64;
    for i in 0..u64::from(k) {
        falling *= (n - i) as f64;
    }
    falling / (n as f64).powi(k as i32 - 1)
}

#[derive(Debug, Clone)]
pub struct MomentIdentity {
    pub estimate: Estimate,
    pub expected: f64,
}

/// Monte Carlo mean of the k-th falling-factorial moment, against the
/// analytic value.
pub fn verify_moment_identity(
    n: u64,
    k: u32,
    family: &IndexFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<MomentIdentity> {
    assert!(trials >= 1);
    let samples: Vec<Result<f64>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let loads = throw(n, n, family, &mut stream)?;
        let m = falling_factorial_moment(&loads, k);
        Ok(biguint_to_f64(&m.value))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(MomentIdentity {
        estimate: Estimate::from_samples(&samples, lineage),
        expected: expected_moment(n, k),
    })
}

fn biguint_to_f64(v: &BigUint) -> f64 {
    let mut acc = 0.0f64;
    for d in v.to_u64_digits().iter().rev() {
        acc = acc * 1.844_674_407_370_955_2e19 + *d as f64;
    }
    acc
}

/// Per-trial max loads, the raw material for tail probabilities and
/// histograms.
pub fn max_load_samples(
    n_balls: u64,
    n_buckets: u64,
    family: &IndexFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<Vec<u64>> {
    assert!(trials >= 1);
    let samples: Vec<Result<u64>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        Ok(max_load(&throw(n_balls, n_buckets, family, &mut stream)?))
    });
    samples.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct TailBound {
    /// Pr(max load >= m + k), estimated.
    pub empirical: Estimate,
    /// The analytic ceiling n / m^k.
    pub bound: f64,
    pub threshold: u64,
    /// empirical <= bound + 3 sigma.
    pub pass: bool,
    /// Set when m is below log(n)/loglog(n), where the bound is not claimed.
    pub m_advisory: bool,
}

/// Compare the empirical exceedance frequency at threshold m + k with the
/// bound n/m^k. Requires k < n^{1/k}; small m is flagged, not rejected.
pub fn tail_bound_check(
    n: u64,
    m: u64,
    k: u32,
    family: &IndexFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<TailBound> {
    assert!(m >= 1 && k >= 1);
    let kk = u128::from(k).checked_pow(k);
    if kk.is_none_or(|v| v >= u128::from(n)) {
        return Err(Error::HypothesisViolated(format!(
            "k < n^(1/k) violated (k = {k}, n = {n})"
        )));
    }
    let threshold = m + u64::from(k);
    let samples = max_load_samples(n, n, family, trials, lineage)?;
    let hits = samples.iter().filter(|&&s| s >= threshold).count() as u64;
    let empirical = Estimate::from_indicator(hits, trials, lineage);
    let bound = n as f64 / (m as f64).powi(k as i32);
    let sigma = empirical.std_error();
    let lnn = (n as f64).ln();
    Ok(TailBound {
        pass: empirical.mean <= bound + 3.0 * sigma,
        empirical,
        bound,
        threshold,
        m_advisory: (m as f64) < lnn / lnn.ln(),
    })
}
