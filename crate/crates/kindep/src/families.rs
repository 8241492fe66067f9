//! Family handles shared by the experiments.
//!
//! A spec describes a distribution over hash functions; a draw is one
//! sampled function. Unit families map keys onto a totally ordered grid in
//! [0,1), index families map keys into [range]. The full-random oracle is
//! the calibration baseline: i.i.d. uniform outputs realized as a
//! counter-based PRF of (draw key, input), so repeated evaluation at the
//! same input is stable and trials never share state.

use crate::adversary::{
    draw_bucket_adversary, draw_minwise_adversary, BucketAdversaryParams, MinwiseMixParams,
    StrategyMixDraw,
};
use crate::error::{Error, Result};
use crate::field::{FieldPrime, PolyDraw, PolyHashFamily, RangeMap, UnitValue, MERSENNE61};
use crate::rng::{mix64, SplitMix64};

#[derive(Debug, Clone)]
pub enum UnitFamilySpec {
    /// k-independent polynomial over the Mersenne prime 2^61 - 1, read as a
    /// point on the grid {0/p, ..., (p-1)/p}.
    Poly { k: u32 },
    FullRandom,
    /// The pairwise-independent min-wise mixture.
    MinwiseMix(MinwiseMixParams),
}

impl UnitFamilySpec {
    /// Draw one function usable on keys 0..n_keys.
    pub fn draw(&self, n_keys: u64, stream: &mut SplitMix64) -> Result<UnitDraw> {
        match self {
            UnitFamilySpec::Poly { k } => {
                let prime = FieldPrime::new(MERSENNE61).expect("2^61-1 is prime");
                let family = PolyHashFamily::new(prime, *k)?;
                if n_keys > MERSENNE61 {
                    return Err(Error::DomainError {
                        x: n_keys,
                        p: MERSENNE61,
                    });
                }
                Ok(UnitDraw::Poly(family.draw(stream)))
            }
            UnitFamilySpec::FullRandom => Ok(UnitDraw::FullRandom(FullRandomDraw {
                key: stream.next_u64(),
            })),
            UnitFamilySpec::MinwiseMix(params) => {
                if n_keys > params.n() + 1 {
                    return Err(Error::DomainError {
                        x: n_keys,
                        p: params.n() + 1,
                    });
                }
                Ok(UnitDraw::Mix(Box::new(draw_minwise_adversary(
                    params, stream,
                ))))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum UnitDraw {
    Poly(PolyDraw),
    FullRandom(FullRandomDraw),
    Mix(Box<StrategyMixDraw>),
}

impl UnitDraw {
    pub fn unit(&self, key: u64) -> UnitValue {
        match self {
            UnitDraw::Poly(d) => d.to_unit(key).expect("key below 2^61-1"),
            UnitDraw::FullRandom(d) => UnitValue::new(
                u128::from(d.value_below(key, MERSENNE61)),
                u128::from(MERSENNE61),
            ),
            UnitDraw::Mix(d) => d.hash_of(key as usize),
        }
    }
}

#[derive(Debug, Clone)]
pub enum IndexFamilySpec {
    /// k-independent polynomial over 2^61 - 1, folded by floor(eval*range/p).
    Poly { k: u32 },
    FullRandom,
    /// The large-bucket adversary; domain and range are both params.n.
    BucketAdversary(BucketAdversaryParams),
}

impl IndexFamilySpec {
    /// Draw one function from [domain] to [range].
    pub fn draw(&self, domain: u64, range: u64, stream: &mut SplitMix64) -> Result<IndexDraw> {
        match self {
            IndexFamilySpec::Poly { k } => {
                let prime = FieldPrime::new(MERSENNE61).expect("2^61-1 is prime");
                let family = PolyHashFamily::new(prime, *k)?;
                if domain > MERSENNE61 {
                    return Err(Error::DomainError {
                        x: domain,
                        p: MERSENNE61,
                    });
                }
                let map = RangeMap::scaled(range);
                map.validate(MERSENNE61)?;
                Ok(IndexDraw::Poly {
                    draw: family.draw(stream),
                    map,
                })
            }
            IndexFamilySpec::FullRandom => Ok(IndexDraw::FullRandom {
                draw: FullRandomDraw {
                    key: stream.next_u64(),
                },
                range,
            }),
            IndexFamilySpec::BucketAdversary(params) => {
                if domain != params.n() || range != params.n() {
                    return Err(Error::HypothesisViolated(format!(
                        "bucket adversary is defined on [{}] only (asked {} -> {})",
                        params.n(),
                        domain,
                        range
                    )));
                }
                let draw = draw_bucket_adversary(params, stream);
                Ok(IndexDraw::Adversary {
                    positions: draw.ball_positions(),
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum IndexDraw {
    Poly { draw: PolyDraw, map: RangeMap },
    FullRandom { draw: FullRandomDraw, range: u64 },
    Adversary { positions: Vec<u64> },
}

impl IndexDraw {
    #[inline]
    pub fn index(&self, x: u64) -> u64 {
        match self {
            IndexDraw::Poly { draw, map } => {
                map.apply(draw.eval(x).expect("x below 2^61-1"), MERSENNE61)
            }
            IndexDraw::FullRandom { draw, range } => draw.value_below(x, *range),
            IndexDraw::Adversary { positions } => positions[x as usize],
        }
    }
}

/// The full-random oracle: an idealized hash with i.i.d. uniform outputs.
#[derive(Debug, Clone, Copy)]
pub struct FullRandomDraw {
    key: u64,
}

impl FullRandomDraw {
    /// Uniform on [n], a pure function of (draw key, x).
    #[inline]
    fn value_below(&self, x: u64, n: u64) -> u64 {
        let threshold = n.wrapping_neg() % n;
        let base = mix64(self.key ^ x.wrapping_mul(0xa076_1d64_78bd_642f));
        let mut ctr = 0u64;
        loop {
            let r = mix64(base ^ ctr.wrapping_mul(0xe703_7ed1_a0b4_28db));
            if r >= threshold {
                return r % n;
            }
            ctr += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedLineage;

    #[test]
    fn full_random_is_a_function_and_uniform() {
        let spec = UnitFamilySpec::FullRandom;
        let mut stream = SeedLineage::new(7, "families").stream(0);
        let d = spec.draw(100, &mut stream).unwrap();
        assert_eq!(d.unit(13), d.unit(13));

        let idx = IndexFamilySpec::FullRandom;
        let d = idx.draw(1000, 10, &mut stream).unwrap();
        let mut counts = [0u64; 10];
        for x in 0..100_000u64 {
            counts[d.index(x) as usize] += 1;
        }
        let sigma = (100_000.0f64 * 0.1 * 0.9).sqrt();
        for &c in &counts {
            assert!((c as f64 - 10_000.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn poly_unit_and_index_agree_with_field_ops() {
        let spec = IndexFamilySpec::Poly { k: 3 };
        let mut stream = SeedLineage::new(9, "families").stream(1);
        let d = spec.draw(1 << 12, 1 << 12, &mut stream).unwrap();
        for x in 0..64u64 {
            assert!(d.index(x) < (1 << 12));
        }
        // scaled mode refuses ranges that break the bias bound
        let wide = IndexFamilySpec::Poly { k: 2 };
        assert!(matches!(
            wide.draw(8, 1 << 40, &mut stream),
            Err(Error::BiasBoundViolated { .. })
        ));
    }

    #[test]
    fn mix_draw_respects_key_budget() {
        let params = crate::adversary::derive_mix_params(100).unwrap();
        let spec = UnitFamilySpec::MinwiseMix(params);
        let mut stream = SeedLineage::new(3, "families").stream(2);
        assert!(spec.draw(101, &mut stream).is_ok());
        assert!(spec.draw(102, &mut stream).is_err());
    }
}
