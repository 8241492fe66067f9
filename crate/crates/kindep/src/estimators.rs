//! The paper-facing Monte Carlo statistics: min-wise probability, the
//! pivots-before-first-B-hit count in both settings, and empirical central
//! moments of indicator sums.

use crate::error::{Error, Result};
use crate::families::{IndexFamilySpec, UnitFamilySpec};
use crate::rng::SeedLineage;
use crate::runner::run_trials;
use crate::stats::Estimate;

#[derive(Debug, Clone)]
pub struct MinwiseReport {
    /// Pr(the target key attains the strict minimum).
    pub estimate: Estimate,
    /// Trials in which two or more keys shared the minimum numerator; such
    /// Trials resolve in favor of the smallest key index.
    pub ties: u64,
}

/// Probability that h(target) is the minimum over keys 0..=n (n+1 keys).
pub fn estimate_minwise(
    n: u64,
    target: u64,
    family: &UnitFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<MinwiseReport> {
    assert!(target <= n && trials >= 1);
    let outcomes: Vec<Result<(bool, bool)>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let draw = family.draw(n + 1, &mut stream)?;
        let mut min_key = 0u64;
        let mut min_num = draw.unit(0).numerator();
        let mut tied = false;
        for key in 1..=n {
            let num = draw.unit(key).numerator();
            if num < min_num {
                min_num = num;
                min_key = key;
                tied = false;
            } else if num == min_num {
                tied = true;
            }
        }
        Ok((min_key == target, tied))
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let successes = outcomes.iter().filter(|o| o.0).count() as u64;
    let ties = outcomes.iter().filter(|o| o.1).count() as u64;
    Ok(MinwiseReport {
        estimate: Estimate::from_indicator(successes, trials, lineage),
        ties,
    })
}

fn validate_sets(a: &[u64], b: &[u64], domain: u64) -> Result<Vec<u8>> {
    if a.len() > b.len() {
        return Err(Error::InvalidSets(format!(
            "|A| = {} exceeds |B| = {}",
            a.len(),
            b.len()
        )));
    }
    let mut membership = vec![0u8; domain as usize];
    for &x in a {
        if x >= domain {
            return Err(Error::InvalidSets(format!("A contains {x} >= {domain}")));
        }
        if membership[x as usize] != 0 {
            return Err(Error::InvalidSets("A has duplicates".into()));
        }
        membership[x as usize] = 1;
    }
    for &x in b {
        if x >= domain {
            return Err(Error::InvalidSets(format!("B contains {x} >= {domain}")));
        }
        if membership[x as usize] != 0 {
            return Err(Error::InvalidSets("A and B must be disjoint".into()));
        }
        membership[x as usize] = 2;
    }
    Ok(membership)
}

/// E(C) where C counts indices i with h(i) in A before the first index
/// hashing into B, scanning i = 0..n-1 with h : [n] -> [n].
pub fn estimate_c_setting1(
    n: u64,
    a: &[u64],
    b: &[u64],
    family: &IndexFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<Estimate> {
    assert!(trials >= 1);
    let membership = validate_sets(a, b, n)?;
    let samples: Vec<Result<f64>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let draw = family.draw(n, n, &mut stream)?;
        let mut c = 0u64;
        for i in 0..n {
            match membership[draw.index(i) as usize] {
                2 => break,
                1 => c += 1,
                _ => {}
            }
        }
        Ok(c as f64)
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples, lineage))
}

/// E|{a in A : h(a) < min_{b in B} h(b)}| for a unit-valued family over
/// keys 0..n_keys-1.
pub fn estimate_c_setting2(
    n_keys: u64,
    a: &[u64],
    b: &[u64],
    family: &UnitFamilySpec,
    trials: u64,
    lineage: SeedLineage,
) -> Result<Estimate> {
    assert!(trials >= 1);
    validate_sets(a, b, n_keys)?;
    let a = a.to_vec();
    let b = b.to_vec();
    let samples: Vec<Result<f64>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let draw = family.draw(n_keys, &mut stream)?;
        let min_b = b
            .iter()
            .map(|&key| draw.unit(key).numerator())
            .min()
            .unwrap_or(u128::MAX);
        let count = a
            .iter()
            .filter(|&&key| draw.unit(key).numerator() < min_b)
            .count();
        Ok(count as f64)
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples, lineage))
}

/// The dyadic A/B pair at offset i and scale l: A = [i, i + 2^{l-1}),
/// B = [i + 2^{l-1}, i + 2^l), both clipped to [n].
pub fn dyadic_sets(i: u64, ell: u32, n: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(ell >= 1);
    let half = 1u64 << (ell - 1);
    let a = (i..(i + half).min(n)).collect();
    let b = ((i + half).min(n)..(i + 2 * half).min(n)).collect();
    (a, b)
}

#[derive(Debug, Clone)]
pub struct CentralMomentReport {
    /// Monte Carlo estimate of E(X - EX)^r for X the indicator sum.
    pub estimate: Estimate,
    /// EX + (EX)^{r/2}, the moment envelope for r-independent summands.
    pub envelope: f64,
    pub mean_sum: f64,
}

/// r-th empirical central moment of X = sum of n indicators [h(i) < mu].
pub fn empirical_central_moment(
    n_indicators: u64,
    mu: f64,
    family: &UnitFamilySpec,
    order: u32,
    trials: u64,
    lineage: SeedLineage,
) -> Result<CentralMomentReport> {
    assert!(order.is_multiple_of(2) && order >= 2, "order must be even");
    assert!((0.0..=1.0).contains(&mu));
    assert!(trials >= 2);
    let sums: Vec<Result<f64>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let draw = family.draw(n_indicators, &mut stream)?;
        let x = (0..n_indicators)
            .filter(|&i| draw.unit(i).to_f64() < mu)
            .count();
        Ok(x as f64)
    });
    let sums = sums.into_iter().collect::<Result<Vec<_>>>()?;
    let mean_sum = sums.iter().sum::<f64>() / sums.len() as f64;
    let centered: Vec<f64> = sums
        .iter()
        .map(|&x| (x - mean_sum).powi(order as i32))
        .collect();
    let ex = n_indicators as f64 * mu;
    Ok(CentralMomentReport {
        estimate: Estimate::from_samples(&centered, lineage),
        envelope: ex + ex.powf(order as f64 / 2.0),
        mean_sum,
    })
}
