//! Self-contained experiment documentation for `kindep describe`.

pub fn describe(experiment: &str) -> Result<String, String> {
    let text = match experiment {
        "minwise" => {
            "experiment: minwise\n\
             purpose: estimate Pr(min h(X) = x_target) over keys x_0..x_n for a hash\n\
             family into (0,1). Under full randomness the probability is 1/(n+1).\n\
             Pairwise-independent families can inflate it to Theta(1/sqrt(n)) -- the\n\
             adv-minwise2 mixture realizes that worst case -- while 3- and\n\
             4-independent families sit at Theta(log n / n) and 5-independent\n\
             polynomials already achieve O(1/n).\n\
             families: full-random | poly (k-independent polynomial over 2^61-1) |\n\
             adv-minwise2 (pairwise-independent strategy mixture)\n\
             constraints: --target <= --n; adv-minwise2 requires n = 100*s^2 for an\n\
             integer s, so that l = 10*sqrt(n) is an integer dividing n\n\
             flags and defaults: --n 100, --k 5, --family full-random, --target 0,\n\
             --trials 10000, --seed 1 (KINDEP_SEED fallback), --format csv,\n\
             --parallel 0 (all cores), --timing off\n\
             statistics: pr_min (with 95% CI; exact binomial below 1000 trials),\n\
             tie_rate, full_random_reference = 1/(n+1)"
        }
        "quicksort" => {
            "experiment: quicksort\n\
             purpose: count comparisons of instrumented quicksort when pivots come\n\
             from a limited-independence stream. Setting 1 pre-computes n pivot\n\
             indices Y_1..Y_n (duplicates skipped, surviving segments finished by an\n\
             insertion-sort cleanup); Setting 2 orders pivots by the ranks of n\n\
             unit-interval labels (exact label collisions redraw the vector). With\n\
             4-independent pivots the expected total is O(n log n); pairwise\n\
             independence still guarantees O(n log^2 n), and the cleanup phase costs\n\
             O(n log n) under pairwise independence.\n\
             families: setting 1: poly | full-random | adv-bucket; setting 2: poly |\n\
             full-random | adv-minwise2\n\
             constraints: --setting 1 or 2; adv-bucket needs --m and the hypotheses\n\
             k < n^(1/k), m^k >= n, m <= n; adv-minwise2 needs n = 100*s^2\n\
             flags and defaults: --setting 1, --n 1024, --k 4, --family poly,\n\
             --trials 10000, --seed 1, --format csv, --parallel 0, --timing off\n\
             statistics: total_comparisons, partition_comparisons,\n\
             cleanup_comparisons, max_per_element, pivots_skipped, redraws,\n\
             n_log2_n (normalization constant)"
        }
        "buckets" => {
            "experiment: buckets\n\
             purpose: throw n balls into n buckets and study the largest bucket.\n\
             Full randomness concentrates the maximum at Theta(log n / log log n).\n\
             For k-independent placements the tail obeys\n\
             Pr(max >= m + k) <= n/m^k whenever k < n^(1/k), and the adv-bucket\n\
             scheme shows the bound is tight: under the hypotheses k < n^(1/k),\n\
             m^k >= n, m <= n it forces a bucket of size >= ceil(p/2) = Omega(m)\n\
             with probability Omega(n/m^k), where p is the largest prime in\n\
             [m/4, m/2].\n\
             families: full-random | poly | adv-bucket\n\
             constraints: adv-bucket requires --m and the hypotheses above; --m also\n\
             enables the tail rows for the other families\n\
             flags and defaults: --n 1024, --k 2, --family full-random, --m unset,\n\
             --trials 10000, --seed 1, --format csv, --parallel 0, --timing off\n\
             statistics: mean_max_load, pr_max_ge_<m+k>, tail_bound_n_over_mk,\n\
             pr_max_ge_half_p_<t> and prob_scale_n_over_mk (adv-bucket),\n\
             max_load_hist_<v> (full distribution)"
        }
        "verify-independence" => {
            "experiment: verify-independence\n\
             purpose: enumerate every coefficient vector of the polynomial family\n\
             h(x) = a_{k-1} x^{k-1} + ... + a_0 mod p and measure the joint law of\n\
             (h(u_1),...,h(u_k)) at k distinct probe points against uniform on\n\
             [p]^k. A family is k-independent exactly when the deviation is 0, and\n\
             polynomial families achieve that for every probe choice.\n\
             constraints: --p prime; 1 <= --k <= p; exactly k distinct points below\n\
             p; p^k <= 10^8 (enumeration guard)\n\
             flags and defaults: --p 5, --k 2, --points 0..k-1, --format csv\n\
             statistics: max_deviation (exactly 0 for polynomial families),\n\
             enumerated_draws = p^k"
        }
        "moments" => {
            "experiment: moments\n\
             purpose: Monte Carlo mean of the k-th falling-factorial moment\n\
             sum_i B_i (B_i - 1) ... (B_i - k + 1) of the bucket loads, which\n\
             counts ordered k-tuples of balls sharing a bucket. For any\n\
             k-independent placement of n balls into n buckets its expectation is\n\
             exactly n(n-1)...(n-k+1) / n^(k-1); the z_score row measures the\n\
             distance of the empirical mean from that value.\n\
             families: full-random | poly\n\
             flags and defaults: --n 64, --k 2, --family full-random,\n\
             --trials 10000, --seed 1, --format csv, --parallel 0, --timing off\n\
             statistics: falling_factorial_moment, expected_moment, z_score"
        }
        "scaling" => {
            "experiment: scaling\n\
             purpose: run minwise, quicksort, or buckets at each n of --n-list and\n\
             fit a scaling law through the primary statistic (pr_min,\n\
             total_comparisons, or mean_max_load): pow fits c*n^alpha by log-log\n\
             least squares, nlog fits c*n*(log2 n)^beta and reports the trend of\n\
             mean/(n log2 n).\n\
             constraints: at least 4 n-values spanning at least 3 doublings;\n\
             sweeps inherit the swept experiment's constraints at every n\n\
             flags and defaults: --model pow, --k 2, --family full-random,\n\
             --setting 1, --target 0, --trials 10000, --seed 1, --format csv\n\
             statistics: per-point rows of the underlying experiment, then\n\
             fit_amplitude, fit_exponent, fit_residual, normalized_<n>"
        }
        other => return Err(format!("unknown experiment: {other}")),
    };
    Ok(text.to_string())
}
