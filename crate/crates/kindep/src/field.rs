//! Prime fields and k-wise independent polynomial hash families.
//!
//! A family is a prime p and an order k; a draw is a vector of k uniform
//! coefficients defining x -> a_{k-1} x^{k-1} + ... + a_0 mod p. Evaluating
//! a draw at k distinct points gives exactly k-independent values, which
//! `verify_exact_independence` checks by full enumeration on small fields.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use num::rational::Ratio;

/// 2^61 - 1, the Mersenne prime used for unit-interval and scaled-range work.
pub const MERSENNE61: u64 = (1 << 61) - 1;

/// Guard for full enumeration in `verify_exact_independence`.
const ENUMERATION_GUARD: u128 = 100_000_000;

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldPrime(u64);

impl FieldPrime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldPrime(p))
        } else {
            Err(Error::NoPrimeInInterval { lo: p, hi: p })
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

/// Deterministic Miller-Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    // This witness set decides primality for every n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Largest prime in [lo, hi], scanning down from hi.
pub fn find_prime_in(lo: u64, hi: u64) -> Result<FieldPrime> {
    if lo < 2 || lo > hi {
        return Err(Error::NoPrimeInInterval { lo, hi });
    }
    let mut c = hi;
    loop {
        if is_prime(c) {
            return Ok(FieldPrime(c));
        }
        if c == lo {
            return Err(Error::NoPrimeInInterval { lo, hi });
        }
        c -= 1;
    }
}

/// A k-independent family of polynomials over [p].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyHashFamily {
    prime: FieldPrime,
    k: u32,
}

impl PolyHashFamily {
    pub fn new(prime: FieldPrime, k: u32) -> Result<Self> {
        if k == 0 || u64::from(k) > prime.get() {
            return Err(Error::InvalidIndependence { k, p: prime.get() });
        }
        Ok(PolyHashFamily { prime, k })
    }

    pub fn prime(&self) -> FieldPrime {
        self.prime
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Sample k coefficients i.i.d. uniform on [p] from the stream.
    pub fn draw(&self, stream: &mut SplitMix64) -> PolyDraw {
        let p = self.prime.get();
        let coeffs = (0..self.k).map(|_| stream.below(p)).collect();
        PolyDraw {
            family: *self,
            coeffs,
        }
    }

    /// Identical (family, seed) pairs yield identical draws.
    pub fn draw_seeded(&self, seed: u64) -> PolyDraw {
        self.draw(&mut SplitMix64::new(seed))
    }
}

/// One sampled polynomial: coeffs[i] multiplies x^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDraw {
    family: PolyHashFamily,
    coeffs: Vec<u64>,
}

impl PolyDraw {
    pub fn from_coeffs(family: PolyHashFamily, coeffs: Vec<u64>) -> Result<Self> {
        let p = family.prime.get();
        if coeffs.len() != family.k as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(Error::InvalidIndependence {
                k: coeffs.len() as u32,
                p,
            });
        }
        Ok(PolyDraw { family, coeffs })
    }

    pub fn family(&self) -> PolyHashFamily {
        self.family
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Horner evaluation mod p; u128 intermediates, no overflow for p < 2^62.
    pub fn eval(&self, x: u64) -> Result<u64> {
        let p = self.family.prime.get();
        if x >= p {
            return Err(Error::DomainError { x, p });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: u64) -> u64 {
        let p = u128::from(self.family.prime.get());
        let x = u128::from(x);
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + u128::from(c)) % p;
        }
        acc as u64
    }

    /// The hash value as a point on the uniform grid {0/p, ..., (p-1)/p}.
    pub fn to_unit(&self, x: u64) -> Result<UnitValue> {
        let num = self.eval(x)?;
        Ok(UnitValue::new(
            u128::from(num),
            u128::from(self.family.prime.get()),
        ))
    }

    /// Map the hash value into [range] per the given mode.
    pub fn to_range(&self, x: u64, map: &RangeMap) -> Result<u64> {
        let p = self.family.prime.get();
        map.validate(p)?;
        let e = self.eval(x)?;
        Ok(map.apply(e, p))
    }
}

/// How field values are folded into a smaller range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeMode {
    /// floor(eval * range / p). Total variation distance from uniform is at
    /// most range/p <= 2^-40 per evaluation; the bias bound is enforced.
    Scaled,
    /// Identity map, requires range == p.
    ExactSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeMap {
    pub range: u64,
    pub mode: RangeMode,
}

impl RangeMap {
    pub fn scaled(range: u64) -> Self {
        RangeMap {
            range,
            mode: RangeMode::Scaled,
        }
    }

    pub fn exact_small(range: u64) -> Self {
        RangeMap {
            range,
            mode: RangeMode::ExactSmall,
        }
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        match self.mode {
            RangeMode::Scaled => {
                if u128::from(p) < (u128::from(self.range) << 40) {
                    return Err(Error::BiasBoundViolated {
                        p,
                        range: self.range,
                    });
                }
            }
            RangeMode::ExactSmall => {
                if self.range != p {
                    return Err(Error::RangeMismatch {
                        p,
                        range: self.range,
                    });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn apply(&self, eval: u64, p: u64) -> u64 {
        match self.mode {
            RangeMode::Scaled => {
                ((u128::from(eval) * u128::from(self.range)) / u128::from(p)) as u64
            }
            RangeMode::ExactSmall => eval,
        }
    }
}

/// A point of [0,1) represented as num/den. Denominators are arbitrary
/// positive integers: field draws use a prime p, the min-wise mixture uses
/// (l+1) * (2^61 - 1). Values are only comparable at equal denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitValue {
    num: u128,
    den: u128,
}

impl UnitValue {
    pub fn new(num: u128, den: u128) -> Self {
        debug_assert!(den > 0 && num < den);
        UnitValue { num, den }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for UnitValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UnitValue {
    /// Panics on denominator mismatch; a single draw always shares one grid.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        assert_eq!(self.den, other.den, "unit values from different grids");
        self.num.cmp(&other.num)
    }
}

/// Elementwise (h(x) - z) mod 1 on a shared grid. Preserves k-independence
/// when z is uniform and independent of the inputs.
pub fn rotate(values: &[UnitValue], z: UnitValue) -> Result<Vec<UnitValue>> {
    for v in values {
        if v.den != z.den {
            return Err(Error::DenominatorMismatch { a: v.den, b: z.den });
        }
    }
    Ok(values
        .iter()
        .map(|v| {
            let num = if v.num >= z.num {
                v.num - z.num
            } else {
                v.num + v.den - z.num
            };
            UnitValue::new(num, v.den)
        })
        .collect())
}

/// Enumerate all p^k coefficient vectors and return the maximum deviation of
/// the joint law of (h(u_1), ..., h(u_k)) from uniform on [p]^k, as an exact
/// rational. Zero for a polynomial family.
pub fn verify_exact_independence(
    family: &PolyHashFamily,
    probe_points: &[u64],
) -> Result<Ratio<u64>> {
    let p = family.prime.get();
    let k = family.k as usize;
    if probe_points.len() != k {
        return Err(Error::InvalidProbePoints {
            reason: format!("need exactly k={} points, got {}", k, probe_points.len()),
        });
    }
    let mut sorted = probe_points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k {
        return Err(Error::InvalidProbePoints {
            reason: "points must be distinct".into(),
        });
    }
    if let Some(&bad) = probe_points.iter().find(|&&x| x >= p) {
        return Err(Error::DomainError { x: bad, p });
    }

    let total = u128::from(p).pow(family.k);
    if total > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge {
            total,
            guard: ENUMERATION_GUARD,
        });
    }
    let total = total as u64;

    let mut counts = vec![0u32; total as usize];
    let mut coeffs = vec![0u64; k];
    let mut draw = PolyDraw {
        family: *family,
        coeffs: coeffs.clone(),
    };
    loop {
        draw.coeffs.copy_from_slice(&coeffs);
        let mut idx: u64 = 0;
        for &u in probe_points {
            idx = idx * p + draw.eval_unchecked(u);
        }
        counts[idx as usize] += 1;

        // odometer over [p]^k
        let mut pos = 0;
        loop {
            if pos == k {
                let max_dev = counts
                    .iter()
                    .map(|&c| {
                        let c = u64::from(c);
                        c.abs_diff(1)
                    })
                    .max()
                    .unwrap_or(0);
                // |count/p^k - 1/p^k| maximized over value tuples
                return Ok(Ratio::new(max_dev, total));
            }
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
        if coeffs.iter().all(|&c| c == 0) {
            unreachable!("odometer wrapped before exit");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use proptest::prelude::*;

    #[test]
    fn find_prime_basics() {
        // trial division over 10..20 gives 19 as the largest prime
        assert_eq!(find_prime_in(10, 20).unwrap().get(), 19);
        assert_eq!(find_prime_in(2, 2).unwrap().get(), 2);
        assert_eq!(
            find_prime_in(24, 25),
            Err(Error::NoPrimeInInterval { lo: 24, hi: 25 })
        );
        assert_eq!(find_prime_in(16, 32).unwrap().get(), 31);
        assert_eq!(find_prime_in(8, 16).unwrap().get(), 13);
        assert_eq!(find_prime_in(4, 8).unwrap().get(), 7);
    }

    #[test]
    fn mersenne61_is_prime() {
        assert!(is_prime(MERSENNE61));
        assert!(!is_prime(1 << 61));
    }

    #[test]
    fn primality_against_trial_division() {
        fn slow(n: u64) -> bool {
            n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
        }
        for n in 0..2_000 {
            assert_eq!(is_prime(n), slow(n), "n = {n}");
        }
    }

    #[test]
    fn eval_hand_examples() {
        let fam = PolyHashFamily::new(FieldPrime::new(5).unwrap(), 2).unwrap();
        // a1 = 2, a0 = 3: (2*4 + 3) mod 5 = 1
        let d = PolyDraw::from_coeffs(fam, vec![3, 2]).unwrap();
        assert_eq!(d.eval(4).unwrap(), 1);

        let fam7 = PolyHashFamily::new(FieldPrime::new(7).unwrap(), 3).unwrap();
        // x^2 at x = 3: 9 mod 7 = 2
        let d = PolyDraw::from_coeffs(fam7, vec![0, 0, 1]).unwrap();
        assert_eq!(d.eval(3).unwrap(), 2);

        assert_eq!(d.eval(9), Err(Error::DomainError { x: 9, p: 7 }));
    }

    #[test]
    fn draw_is_deterministic_and_in_range() {
        let fam = PolyHashFamily::new(FieldPrime::new(5).unwrap(), 2).unwrap();
        let a = fam.draw_seeded(123);
        let b = fam.draw_seeded(123);
        assert_eq!(a, b);
        assert!(a.coeffs().iter().all(|&c| c < 5));

        let fam2 = PolyHashFamily::new(FieldPrime::new(2).unwrap(), 1).unwrap();
        assert!(fam2.draw_seeded(9).coeffs()[0] < 2);
    }

    #[test]
    fn draw_coefficients_are_uniform() {
        // p=5, k=1: over 10^6 seeds each constant lands within 3 sigma of 1/5
        let fam = PolyHashFamily::new(FieldPrime::new(5).unwrap(), 1).unwrap();
        let n = 1_000_000u64;
        let mut counts = [0u64; 5];
        for seed in 0..n {
            counts[fam.draw_seeded(seed).coeffs()[0] as usize] += 1;
        }
        let sigma = (n as f64 * 0.2 * 0.8).sqrt();
        for &c in &counts {
            assert!((c as f64 - n as f64 / 5.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn to_range_examples() {
        let fam = PolyHashFamily::new(FieldPrime::new(MERSENNE61).unwrap(), 1).unwrap();
        // eval = p-1 scaled into 2^20 gives 2^20 - 1
        let d = PolyDraw::from_coeffs(fam, vec![MERSENNE61 - 1]).unwrap();
        let map = RangeMap::scaled(1 << 20);
        assert_eq!(d.to_range(0, &map).unwrap(), (1 << 20) - 1);

        // eval = 0 maps to 0 for any range
        let d0 = PolyDraw::from_coeffs(fam, vec![0]).unwrap();
        assert_eq!(d0.to_range(0, &map).unwrap(), 0);

        // bias bound rejected on a small prime
        let small = PolyHashFamily::new(FieldPrime::new(101).unwrap(), 1).unwrap();
        let ds = small.draw_seeded(4);
        assert!(matches!(
            ds.to_range(0, &RangeMap::scaled(64)),
            Err(Error::BiasBoundViolated { .. })
        ));

        // exact-small is the identity on eval output
        let es = RangeMap::exact_small(101);
        assert_eq!(ds.to_range(7, &es).unwrap(), ds.eval(7).unwrap());
        assert!(matches!(
            ds.to_range(7, &RangeMap::exact_small(100)),
            Err(Error::RangeMismatch { .. })
        ));
    }

    #[test]
    fn to_range_scaled_bias_is_within_1_over_p() {
        // count preimages of every output value exactly for p = 101, range = 10
        let p = 101u64;
        let range = 10u64;
        let mut counts = vec![0u64; range as usize];
        for e in 0..p {
            counts[((u128::from(e) * u128::from(range)) / u128::from(p)) as usize] += 1;
        }
        for &c in &counts {
            let pr = c as f64 / p as f64;
            assert!((pr - 1.0 / range as f64).abs() <= 1.0 / p as f64 + 1e-12);
        }
    }

    #[test]
    fn unit_order_matches_eval_order() {
        let fam = PolyHashFamily::new(FieldPrime::new(13).unwrap(), 2).unwrap();
        let d = fam.draw_seeded(77);
        for x in 0..13u64 {
            for y in 0..13u64 {
                let ord_unit = d.to_unit(x).unwrap().cmp(&d.to_unit(y).unwrap());
                let ord_eval = d.eval(x).unwrap().cmp(&d.eval(y).unwrap());
                assert_eq!(ord_unit, ord_eval);
            }
        }
    }

    #[test]
    fn rotate_examples() {
        let v = |n: u128| UnitValue::new(n, 4);
        let vals = vec![v(1), v(3)];
        // z = 0 is the identity
        assert_eq!(rotate(&vals, v(0)).unwrap(), vals);
        // 0.25, 0.75 rotated by 0.5 -> 0.75, 0.25
        assert_eq!(rotate(&vals, v(2)).unwrap(), vec![v(3), v(1)]);
        // mismatched grids are rejected
        assert!(matches!(
            rotate(&vals, UnitValue::new(1, 5)),
            Err(Error::DenominatorMismatch { .. })
        ));
    }

    #[test]
    fn rotate_minimum_is_first_value_cyclically_after_z() {
        let den = 997u128;
        let mut s = SplitMix64::new(41);
        for _ in 0..50 {
            let vals: Vec<UnitValue> = (0..10)
                .map(|_| UnitValue::new(u128::from(s.below(997)), den))
                .collect();
            let z = UnitValue::new(u128::from(s.below(997)), den);
            let rotated = rotate(&vals, z).unwrap();
            let argmin_rot = (0..vals.len())
                .min_by_key(|&i| rotated[i].numerator())
                .unwrap();
            // first key at or cyclically after z: smallest value >= z.num,
            // wrapping to the global minimum when none is
            let expected = (0..vals.len())
                .filter(|&i| vals[i].numerator() >= z.numerator())
                .min_by_key(|&i| vals[i].numerator())
                .unwrap_or_else(|| {
                    (0..vals.len())
                        .min_by_key(|&i| vals[i].numerator())
                        .unwrap()
                });
            assert_eq!(rotated[argmin_rot], rotated[expected]);
        }
    }

    #[test]
    fn unit_grid_properties() {
        let fam = PolyHashFamily::new(FieldPrime::new(MERSENNE61).unwrap(), 2).unwrap();
        // constant-0 draw maps every key to numerator 0
        let zero = PolyDraw::from_coeffs(fam, vec![0, 0]).unwrap();
        for x in [0u64, 1, 1 << 20, MERSENNE61 - 1] {
            assert_eq!(zero.to_unit(x).unwrap().numerator(), 0);
        }
        // discretization gap 1/p below 2^-60
        assert!(1.0 / (MERSENNE61 as f64) < 2.0f64.powi(-60));
    }

    #[test]
    fn exact_independence_is_zero_for_poly_families() {
        for (p, k, pts) in [
            (3u64, 2u32, vec![0u64, 1]),
            (5, 3, vec![0, 1, 2]),
            (3, 1, vec![2]),
        ] {
            let fam = PolyHashFamily::new(FieldPrime::new(p).unwrap(), k).unwrap();
            let dev = verify_exact_independence(&fam, &pts).unwrap();
            assert!(dev.is_zero(), "p={p} k={k}");
        }
    }

    #[test]
    fn exact_independence_guards() {
        let fam = PolyHashFamily::new(FieldPrime::new(5).unwrap(), 2).unwrap();
        assert!(matches!(
            verify_exact_independence(&fam, &[0]),
            Err(Error::InvalidProbePoints { .. })
        ));
        assert!(matches!(
            verify_exact_independence(&fam, &[1, 1]),
            Err(Error::InvalidProbePoints { .. })
        ));
        let big = PolyHashFamily::new(FieldPrime::new(MERSENNE61).unwrap(), 2).unwrap();
        assert!(matches!(
            verify_exact_independence(&big, &[0, 1]),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn independence_holds_over_all_probe_choices() {
        // every 2-subset of [5]
        let fam = PolyHashFamily::new(FieldPrime::new(5).unwrap(), 2).unwrap();
        for x in 0..5u64 {
            for y in (x + 1)..5 {
                assert!(verify_exact_independence(&fam, &[x, y]).unwrap().is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn constant_poly_is_constant(c in 0u64..13, x in 0u64..13) {
            let fam = PolyHashFamily::new(FieldPrime::new(13).unwrap(), 3).unwrap();
            let d = PolyDraw::from_coeffs(fam, vec![c, 0, 0]).unwrap();
            prop_assert_eq!(d.eval(x).unwrap(), c);
        }

        #[test]
        fn eval_is_a_function(seed in any::<u64>(), x in 0u64..31) {
            let fam = PolyHashFamily::new(FieldPrime::new(31).unwrap(), 4).unwrap();
            let d = fam.draw_seeded(seed);
            prop_assert_eq!(d.eval(x).unwrap(), d.eval(x).unwrap());
            prop_assert!(d.eval(x).unwrap() < 31);
        }

        #[test]
        fn rotate_roundtrips(nums in proptest::collection::vec(0u128..97, 1..20), z in 0u128..97) {
            let vals: Vec<UnitValue> = nums.iter().map(|&n| UnitValue::new(n, 97)).collect();
            let z = UnitValue::new(z, 97);
            let z_inv = UnitValue::new((97 - z.numerator()) % 97, 97);
            let back = rotate(&rotate(&vals, z).unwrap(), z_inv).unwrap();
            prop_assert_eq!(back, vals);
        }
    }
}
