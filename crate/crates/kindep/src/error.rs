use thiserror::Error;

/// Errors surfaced by the hash families, adversaries, and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no prime in [{lo}, {hi}]")]
    NoPrimeInInterval { lo: u64, hi: u64 },

    #[error("evaluation point {x} outside field of size {p}")]
    DomainError { x: u64, p: u64 },

    #[error("independence order k={k} invalid for prime p={p} (need 1 <= k <= p)")]
    InvalidIndependence { k: u32, p: u64 },

    #[error("scaled range map needs p >= range * 2^40 (p={p}, range={range})")]
    BiasBoundViolated { p: u64, range: u64 },

    #[error("exact-small range map needs range == p (p={p}, range={range})")]
    RangeMismatch { p: u64, range: u64 },

    #[error("enumeration of p^k = {total} coefficient vectors exceeds guard {guard}")]
    EnumerationTooLarge { total: u128, guard: u128 },

    #[error("probe points invalid: {reason}")]
    InvalidProbePoints { reason: String },

    #[error("n = {n} is not of the form 100*s^2")]
    UnsupportedN { n: u64 },

    #[error("unit values have mismatched denominators ({a} vs {b})")]
    DenominatorMismatch { a: u128, b: u128 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("{redraws} consecutive redraws without a collision-free label vector")]
    RedrawLimitExceeded { redraws: u32 },

    #[error("invalid A/B sets: {0}")]
    InvalidSets(String),

    #[error("expected count per cell {expected:.3} below 5")]
    CellCountTooLow { expected: f64 },

    #[error("scaling fit needs >= 4 points spanning >= 3 doublings of n")]
    InsufficientPoints,

    #[error("scaling fit needs strictly positive n and mean values")]
    InvalidPoints,
}

pub type Result<T> = std::result::Result<T, Error>;
