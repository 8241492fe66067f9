//! Trial execution. Results come back indexed by trial, so aggregation
//! walks them in a fixed order and output is identical no matter how many
//! workers ran the trials (or whether the parallel feature is enabled).

/// Run trials 0..trials, data-parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    run_trials_sequential(trials, f)
}

/// Sequential fallback; always available for benchmarking against the
/// parallel path.
pub fn run_trials_sequential<T, F>(trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..trials).map(f).collect()
}
