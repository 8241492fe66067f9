//! A laboratory for randomized algorithms under limited independence.
//!
//! The crate provides:
//!
//! - polynomial hash families over prime fields with exact independence
//!   verification ([`field`]);
//! - explicit adversarial distributions: a pairwise-independent min-wise
//!   mixture and a k-independent large-bucket scheme ([`adversary`]);
//! - instrumented randomized quicksort in two pivot models plus a treap
//!   depth probe ([`quicksort`]);
//! - balls-into-buckets simulation with exact falling-factorial moments
//!   ([`buckets`]);
//! - a reproducible Monte Carlo engine and the statistics the experiments
//!   report ([`estimators`], [`stats`]).
//!
//! Randomness is counter-based: every trial derives its stream from
//! (master seed, experiment id, trial index), so results are identical
//! under any parallel schedule. The `parallel` feature (default on) runs
//! trials on rayon; disabling it falls back to a sequential loop with
//! byte-identical output.

pub mod adversary;
pub mod buckets;
pub mod error;
pub mod estimators;
pub mod families;
pub mod field;
pub mod quicksort;
pub mod rng;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use rng::{SeedLineage, SplitMix64};
