//! Explicitly "bad" hash distributions.
//!
//! Two constructions live here. The first is a pairwise-independent
//! distribution over functions into the unit interval whose minimum is
//! captured by a distinguished key far more often than 1/(n+1): a mixture of
//! four assignment strategies tuned so every pair of keys still collides
//! with the uniform probability. The second is a k-independent way of
//! throwing n balls into n buckets that produces a bucket of size about m
//! with probability on the order of n/m^k: buckets are cut into blocks of a
//! prime size p and each block places its first arrivals with its own random
//! polynomial, so a constant polynomial stacks a whole block into one
//! bucket.

use crate::error::{Error, Result};
use crate::field::{find_prime_in, FieldPrime, PolyDraw, PolyHashFamily, UnitValue, MERSENNE61};
use crate::rng::SplitMix64;
use num::rational::Ratio;
use num::One;

type Rat = Ratio<u128>;

/// Parameters of the min-wise mixture over keys x_0..x_n.
///
/// n must be 100*s^2 so that l = 10*sqrt(n) is an integer dividing n
/// (n/l = s) and the shared-value set size sqrt(n)/5 = 2s is integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinwiseMixParams {
    n: u64,
    s: u64,
    ell: u64,
    p1: Rat,
    p2: Rat,
    q: Rat,
}

/// Solve the three collision-matching equations exactly.
///
/// p1 mixes S1/S2 and p2 mixes S3/S4 so that within each sub-mixture pairs
/// of ordinary keys collide with probability exactly 1/(l+1); q mixes the
/// two sub-mixtures so that pairs involving x_0 do too.
pub fn derive_mix_params(n: u64) -> Result<MinwiseMixParams> {
    let s = (0..).take_while(|&s| 100 * s * s <= n).last().unwrap_or(0);
    if s == 0 || 100 * s * s != n {
        return Err(Error::UnsupportedN { n });
    }
    let ell = 100 * s;
    let n_r = Rat::from(u128::from(n));
    let s_r = Rat::from(u128::from(s));
    let one = Rat::one();
    let target = one - Rat::new(1, u128::from(ell) + 1);

    // S1 pair collision: (n/l - 1)/(n - 1) = (s-1)/(n-1)
    let c1 = (s_r - one) / (n_r - one);
    let p1 = target / (one - c1);

    // S3 pair collision (the displayed upper-bound expression, used as the
    // matching target): (s-1)/(n-1) + 2s(2s-1)/(n(n-1))
    let two_s = Rat::from(2u128 * u128::from(s));
    let c3 = c1 + two_s * (two_s - one) / (n_r * (n_r - one));
    let p2 = target / (one - c3);

    // x_0 collision under the S3/S4 mixture: p2 * |Z|/n + (1 - p2), with
    // |Z|/n = 2s/n = 1/(5 sqrt n)
    let pr_t2_x0 = p2 * (two_s / n_r) + (one - p2);
    let q = one - Rat::new(1, u128::from(ell) + 1) / pr_t2_x0;

    // proof-side inequalities; equality for p1 occurs exactly at s = 1
    assert!(p1 >= target && p1 < one, "p1 out of range: {p1}");
    assert!(p2 > target && p2 < one, "p2 out of range: {p2}");
    assert!(q >= Rat::new(1, 2), "q below 1/2: {q}");

    Ok(MinwiseMixParams { n, s, ell, p1, p2, q })
}

impl MinwiseMixParams {
    /// Number of ordinary keys; the full key set is x_0..x_n (n+1 keys).
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Size of the set sharing g(x_0) under S3: sqrt(n)/5 = 2s.
    pub fn shared_set_size(&self) -> u64 {
        2 * self.s
    }

    pub fn p1(&self) -> Rat {
        self.p1
    }

    pub fn p2(&self) -> Rat {
        self.p2
    }

    pub fn q(&self) -> Rat {
        self.q
    }

    /// Marginal probabilities of executing S1..S4.
    pub fn strategy_probabilities(&self) -> [Rat; 4] {
        let one = Rat::one();
        [
            self.q * self.p1,
            self.q * (one - self.p1),
            (one - self.q) * self.p2,
            (one - self.q) * (one - self.p2),
        ]
    }

    /// Denominator of the unit grid the mixture hashes onto.
    pub fn unit_denominator(&self) -> u128 {
        (u128::from(self.ell) + 1) * u128::from(MERSENNE61)
    }

    fn coin(&self, r: &Rat, stream: &mut SplitMix64) -> bool {
        stream.bernoulli(*r.numer(), *r.denom())
    }

    fn sample_strategy(&self, stream: &mut SplitMix64) -> Strategy {
        if self.coin(&self.q, stream) {
            if self.coin(&self.p1, stream) {
                Strategy::S1
            } else {
                Strategy::S2
            }
        } else if self.coin(&self.p2, stream) {
            Strategy::S3
        } else {
            Strategy::S4
        }
    }

    /// i-th value of [l+1] \ {w}, ascending.
    #[inline]
    fn complement(w: u64, i: u64) -> u64 {
        if i < w {
            i
        } else {
            i + 1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    S1,
    S2,
    S3,
    S4,
}

/// One sampled instance of the mixture: h(x) = (g(x) + U_x) / (l+1), with
/// the offsets U_x realized as 61-bit numerators.
#[derive(Debug, Clone)]
pub struct StrategyMixDraw {
    params: MinwiseMixParams,
    strategy: Strategy,
    g: Vec<u32>,
    offsets: Vec<u64>,
}

/// Execute the mixture: pick a strategy, assign g over [l+1], then attach
/// independent uniform offsets to every key.
pub fn draw_minwise_adversary(params: &MinwiseMixParams, stream: &mut SplitMix64) -> StrategyMixDraw {
    let n = params.n as usize;
    let ell = params.ell;
    let strategy = params.sample_strategy(stream);
    let mut g = vec![0u32; n + 1];

    match strategy {
        Strategy::S1 => {
            let w = stream.below(ell + 1);
            g[0] = w as u32;
            let mut keys: Vec<u32> = (1..=params.n as u32).collect();
            stream.shuffle(&mut keys);
            // blocks of n/l = s keys per value, every value != w used exactly once
            for (i, &key) in keys.iter().enumerate() {
                let block = i as u64 / params.s;
                g[key as usize] = MinwiseMixParams::complement(w, block) as u32;
            }
        }
        Strategy::S2 => {
            let w = stream.below(ell + 1);
            g[0] = w as u32;
            let y1 = MinwiseMixParams::complement(w, stream.below(ell)) as u32;
            for slot in g.iter_mut().skip(1) {
                *slot = y1;
            }
        }
        Strategy::S3 => {
            let w = stream.below(ell + 1);
            g[0] = w as u32;
            let mut keys: Vec<u32> = (1..=params.n as u32).collect();
            stream.shuffle(&mut keys);
            let z = params.shared_set_size() as usize;
            for &key in &keys[..z] {
                g[key as usize] = w as u32;
            }
            // remaining keys fill capacity-s blocks over a randomly ordered
            // complement, so no value is systematically starved
            let mut values: Vec<u32> = (0..ell)
                .map(|i| MinwiseMixParams::complement(w, i) as u32)
                .collect();
            stream.shuffle(&mut values);
            for (j, &key) in keys[z..].iter().enumerate() {
                g[key as usize] = values[j / params.s as usize];
            }
        }
        Strategy::S4 => {
            let y = stream.below(ell + 1) as u32;
            for slot in g.iter_mut() {
                *slot = y;
            }
        }
    }

    let offsets = (0..=n).map(|_| stream.below(MERSENNE61)).collect();
    StrategyMixDraw {
        params: params.clone(),
        strategy,
        g,
        offsets,
    }
}

impl StrategyMixDraw {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn g(&self) -> &[u32] {
        &self.g
    }

    pub fn params(&self) -> &MinwiseMixParams {
        &self.params
    }

    /// h(x) = (g(x) + U_x) / (l+1) on the grid of denominator (l+1)*(2^61-1).
    pub fn hash_of(&self, key: usize) -> UnitValue {
        assert!(key < self.g.len(), "key index out of range");
        let num =
            u128::from(self.g[key]) * u128::from(MERSENNE61) + u128::from(self.offsets[key]);
        UnitValue::new(num, self.params.unit_denominator())
    }
}

/// Sample only (g(a), g(b)) with the marginal the full draw would produce.
///
/// Under a Fisher-Yates shuffle the positions of two fixed keys are a
/// uniform ordered pair of distinct slots, and the value permutations used
/// by S3 restrict to uniform distinct value pairs, so each strategy's pair
/// law can be sampled directly. This exists because chi-square tests at
/// full [l+1]^2 resolution need millions of draws, which is unaffordable
/// through the O(n) assignment path; `tests` cross-validate the two routes.
pub fn draw_g_pair(
    params: &MinwiseMixParams,
    key_a: u64,
    key_b: u64,
    stream: &mut SplitMix64,
) -> (u32, u32) {
    assert!(key_a != key_b && key_a <= params.n && key_b <= params.n);
    let ell = params.ell;
    let s = params.s;
    let n = params.n;
    let ordinary = usize::from(key_a != 0) + usize::from(key_b != 0);

    // positions of the ordinary keys in the shuffled key order: a uniform
    // ordered pair of distinct slots (or a single uniform slot)
    let draw_positions = |stream: &mut SplitMix64| -> (u64, u64) {
        let i = stream.below(n);
        if ordinary < 2 {
            return (i, i);
        }
        let mut j = stream.below(n - 1);
        if j >= i {
            j += 1;
        }
        (i, j)
    };

    let (va, vb) = match params.sample_strategy(stream) {
        Strategy::S4 => {
            let y = stream.below(ell + 1);
            (y, y)
        }
        Strategy::S1 => {
            let w = stream.below(ell + 1);
            let (i, j) = draw_positions(stream);
            let value = |pos: u64| MinwiseMixParams::complement(w, pos / s);
            match (key_a == 0, key_b == 0) {
                (true, _) => (w, value(i)),
                (_, true) => (value(i), w),
                _ => (value(i), value(j)),
            }
        }
        Strategy::S2 => {
            let w = stream.below(ell + 1);
            let y1 = MinwiseMixParams::complement(w, stream.below(ell));
            match (key_a == 0, key_b == 0) {
                (true, _) => (w, y1),
                (_, true) => (y1, w),
                _ => (y1, y1),
            }
        }
        Strategy::S3 => {
            let w = stream.below(ell + 1);
            let z = params.shared_set_size();
            let (i, j) = draw_positions(stream);
            // positions below z share w; the rest land in capacity-s blocks
            // whose values come from a random injection into the complement,
            // so one block is a uniform value and two distinct blocks are a
            // uniform distinct pair
            let block = |pos: u64| (pos >= z).then(|| (pos - z) / s);
            let one_value = |stream: &mut SplitMix64| {
                MinwiseMixParams::complement(w, stream.below(ell))
            };
            let pair = match (block(i), block(j), ordinary) {
                (None, _, 1) | (None, None, 2) => (w, w),
                (Some(_), _, 1) => {
                    let v = one_value(stream);
                    (v, v)
                }
                (Some(_), None, 2) => (one_value(stream), w),
                (None, Some(_), 2) => (w, one_value(stream)),
                (Some(x), Some(y), 2) if x == y => {
                    let v = one_value(stream);
                    (v, v)
                }
                (Some(_), Some(_), 2) => {
                    let v1 = stream.below(ell);
                    let mut v2 = stream.below(ell - 1);
                    if v2 >= v1 {
                        v2 += 1;
                    }
                    (
                        MinwiseMixParams::complement(w, v1),
                        MinwiseMixParams::complement(w, v2),
                    )
                }
                _ => unreachable!("ordinary is 1 or 2"),
            };
            match (key_a == 0, key_b == 0) {
                (true, _) => (w, pair.0),
                (_, true) => (pair.0, w),
                _ => pair,
            }
        }
    };
    (va as u32, vb as u32)
}

/// Parameters of the large-bucket adversary for n balls into n buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BucketAdversaryParams {
    n: u64,
    m: u64,
    k: u32,
    p: FieldPrime,
    t: u64,
}

/// Validate the theorem hypotheses (k < n^{1/k}, m^k >= n, m <= n), pick the
/// largest prime p in [m/4, m/2], and derive the block count t = floor(n/p).
pub fn derive_bucket_params(n: u64, m: u64, k: u32) -> Result<BucketAdversaryParams> {
    if k == 0 {
        return Err(Error::HypothesisViolated("k >= 1 required".into()));
    }
    if m > n {
        return Err(Error::HypothesisViolated(format!("m <= n violated (m={m}, n={n})")));
    }
    let kk = u128::from(k).checked_pow(k);
    if kk.is_none_or(|v| v >= u128::from(n)) {
        return Err(Error::HypothesisViolated(format!(
            "k < n^(1/k) violated (k^k = {} >= n = {n})",
            kk.map_or("overflow".to_string(), |v| v.to_string())
        )));
    }
    let mk = u128::from(m).checked_pow(k);
    if mk.is_some_and(|v| v < u128::from(n)) {
        return Err(Error::HypothesisViolated(format!(
            "m^k >= n violated (m^k = {} < n = {n})",
            mk.unwrap()
        )));
    }
    let lo = m.div_ceil(4).max(2);
    let hi = m / 2;
    let p = find_prime_in(lo, hi)?;
    Ok(BucketAdversaryParams {
        n,
        m,
        k,
        p,
        t: n / p.get(),
    })
}

impl BucketAdversaryParams {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn prime(&self) -> FieldPrime {
        self.p
    }

    pub fn block_count(&self) -> u64 {
        self.t
    }

    /// Bucket indices covered by block j: [j*p, j*p + size).
    pub fn block_size(&self, j: u64) -> u64 {
        let p = self.p.get();
        if j < self.t {
            p
        } else {
            self.n - self.t * p
        }
    }

    /// The load the scheme tries to force: ceil(p/2).
    pub fn half_p_threshold(&self) -> u64 {
        self.p.get().div_ceil(2)
    }

    /// The analytic scale n/m^k of the success probability.
    pub fn probability_scale(&self) -> f64 {
        self.n as f64 / (self.m as f64).powi(self.k as i32)
    }
}

/// One sampled adversarial placement.
#[derive(Debug, Clone)]
pub struct BucketAdversaryDraw {
    params: BucketAdversaryParams,
    block_of_ball: Vec<u32>,
    block_polys: Vec<PolyDraw>,
    /// Uniform placements for balls not covered by a block polynomial:
    /// overflow arrivals of full blocks and everything in the residual block.
    overflow: Vec<(u32, u64)>,
}

/// Run the four-step scheme: t random polynomials, independent block
/// membership with Pr(ball in block j) = |S_j|/n, polynomial placement for
/// the first p arrivals of each block (by ball index), uniform placement for
/// the rest.
pub fn draw_bucket_adversary(
    params: &BucketAdversaryParams,
    stream: &mut SplitMix64,
) -> BucketAdversaryDraw {
    let p = params.p.get();
    let n = params.n;
    let t = params.t;
    let family = PolyHashFamily::new(params.p, params.k).expect("k <= p by construction");
    let block_polys: Vec<PolyDraw> = (0..t).map(|_| family.draw(stream)).collect();

    // u uniform on [n]: u / p lands in block j with probability |S_j|/n
    let block_of_ball: Vec<u32> = (0..n).map(|_| (stream.below(n) / p) as u32).collect();

    let mut occupancy = vec![0u64; t as usize + 1];
    let mut overflow = Vec::new();
    for (ball, &b) in block_of_ball.iter().enumerate() {
        let b = u64::from(b);
        let seen = occupancy[b as usize];
        occupancy[b as usize] += 1;
        if b == t || seen >= p {
            let size = params.block_size(b);
            let bucket = b * p + stream.below(size);
            overflow.push((ball as u32, bucket));
        }
    }

    BucketAdversaryDraw {
        params: *params,
        block_of_ball,
        block_polys,
        overflow,
    }
}

impl BucketAdversaryDraw {
    pub fn params(&self) -> &BucketAdversaryParams {
        &self.params
    }

    pub fn block_of_ball(&self) -> &[u32] {
        &self.block_of_ball
    }

    pub fn block_polys(&self) -> &[PolyDraw] {
        &self.block_polys
    }

    #[cfg(test)]
    pub(crate) fn from_parts(
        params: BucketAdversaryParams,
        block_of_ball: Vec<u32>,
        block_polys: Vec<PolyDraw>,
        overflow: Vec<(u32, u64)>,
    ) -> Self {
        BucketAdversaryDraw {
            params,
            block_of_ball,
            block_polys,
            overflow,
        }
    }

    /// Materialize every ball's bucket.
    pub fn ball_positions(&self) -> Vec<u64> {
        let p = self.params.p.get();
        let t = self.params.t;
        let mut occupancy = vec![0u64; t as usize + 1];
        let mut overflow_iter = self.overflow.iter().peekable();
        self.block_of_ball
            .iter()
            .enumerate()
            .map(|(ball, &b)| {
                let b = u64::from(b);
                let seen = occupancy[b as usize];
                occupancy[b as usize] += 1;
                if b < t && seen < p {
                    // arrival number `seen` within the block's polynomial set
                    b * p + self.block_polys[b as usize].eval_unchecked(seen)
                } else {
                    let &&(ov_ball, bucket) = overflow_iter.peek().expect("overflow entry");
                    debug_assert_eq!(ov_ball as usize, ball);
                    overflow_iter.next();
                    bucket
                }
            })
            .collect()
    }
}
