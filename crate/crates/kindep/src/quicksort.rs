//! Instrumented quicksort with pre-computed pivot streams.
//!
//! Setting 1: a stream of n k-independent indices Y_1..Y_n names the pivots.
//! The engine keeps the live partition of the array into segments; each Y_i
//! either partitions the segment currently holding that element (counting
//! one comparison per other element of the segment) or is skipped if the
//! element already pivoted. Since the stream need not be a permutation, a
//! cleanup pass insertion-sorts every surviving segment.
//!
//! Setting 2: n k-independent unit labels Z_1..Z_n; pivot j is the element
//! with the j-th smallest label. Exact label collisions redraw the whole
//! vector. Processing labels in rank order against the live partition picks,
//! inside every segment, exactly its minimum-label element, so both settings
//! share one audited engine; the rank order is a permutation, so no cleanup
//! phase exists.

use crate::error::{Error, Result};
use crate::families::{IndexFamilySpec, UnitFamilySpec};
use crate::rng::{SeedLineage, SplitMix64};
use crate::runner::run_trials;
use crate::stats::Estimate;
use std::collections::BTreeMap;

const REDRAW_LIMIT: u32 = 64;

/// Distinct keys to sort; the canonical input is the identity permutation.
#[derive(Debug, Clone)]
pub struct SortInput {
    values: Vec<u64>,
}

impl SortInput {
    pub fn identity(n: usize) -> Self {
        SortInput {
            values: (0..n as u64).collect(),
        }
    }

    pub fn from_values(values: Vec<u64>) -> Result<Self> {
        let mut sorted = values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != values.len() {
            return Err(Error::InvalidSets("sort input must be distinct".into()));
        }
        Ok(SortInput { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Comparison accounting for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PivotTrace {
    pub comparisons_partition: u64,
    pub comparisons_cleanup: u64,
    pub pivots_executed: u64,
    pub pivots_skipped: u64,
    /// Lengths of the segments surviving into the cleanup phase.
    pub cleanup_segments: Vec<usize>,
    /// Whole-vector redraws forced by label collisions (Setting 2 only).
    pub redraws: u64,
}

impl PivotTrace {
    pub fn total_comparisons(&self) -> u64 {
        self.comparisons_partition + self.comparisons_cleanup
    }
}

/// Times each element was compared against a pivot during partitioning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerElementComparisons(pub Vec<u64>);

impl PerElementComparisons {
    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

struct SegmentEngine<'a> {
    values: &'a [u64],
    /// labels by position
    arr: Vec<usize>,
    /// label -> position
    pos: Vec<usize>,
    /// start -> end of every live segment
    segments: BTreeMap<usize, usize>,
    pivoted: Vec<bool>,
    per_label: Vec<u64>,
    trace: PivotTrace,
    scratch_less: Vec<usize>,
    scratch_greater: Vec<usize>,
}

impl<'a> SegmentEngine<'a> {
    fn new(input: &'a SortInput) -> Self {
        let n = input.values.len();
        let mut segments = BTreeMap::new();
        if n > 0 {
            segments.insert(0, n);
        }
        SegmentEngine {
            values: &input.values,
            arr: (0..n).collect(),
            pos: (0..n).collect(),
            segments,
            pivoted: vec![false; n],
            per_label: vec![0; n],
            trace: PivotTrace::default(),
            scratch_less: Vec::with_capacity(n),
            scratch_greater: Vec::with_capacity(n),
        }
    }

    fn apply_pivot(&mut self, label: usize) {
        if self.pivoted[label] {
            self.trace.pivots_skipped += 1;
            return;
        }
        let p = self.pos[label];
        let (&lo, &hi) = self
            .segments
            .range(..=p)
            .next_back()
            .expect("unpivoted label lies in a live segment");
        debug_assert!(p < hi);

        let pivot_value = self.values[label];
        self.scratch_less.clear();
        self.scratch_greater.clear();
        for i in lo..hi {
            let other = self.arr[i];
            if other == label {
                continue;
            }
            self.trace.comparisons_partition += 1;
            self.per_label[other] += 1;
            if self.values[other] < pivot_value {
                self.scratch_less.push(other);
            } else {
                self.scratch_greater.push(other);
            }
        }

        let mut idx = lo;
        for s in 0..self.scratch_less.len() {
            let l = self.scratch_less[s];
            self.arr[idx] = l;
            self.pos[l] = idx;
            idx += 1;
        }
        let mid = idx;
        self.arr[mid] = label;
        self.pos[label] = mid;
        idx += 1;
        for s in 0..self.scratch_greater.len() {
            let g = self.scratch_greater[s];
            self.arr[idx] = g;
            self.pos[g] = idx;
            idx += 1;
        }
        debug_assert_eq!(idx, hi);

        self.segments.remove(&lo);
        if mid > lo {
            self.segments.insert(lo, mid);
        }
        if hi > mid + 1 {
            self.segments.insert(mid + 1, hi);
        }
        self.pivoted[label] = true;
        self.trace.pivots_executed += 1;
    }

    /// Insertion-sort every surviving segment, counting its comparisons.
    fn cleanup(&mut self) {
        let segments: Vec<(usize, usize)> = self.segments.iter().map(|(&a, &b)| (a, b)).collect();
        for (lo, hi) in segments {
            self.trace.cleanup_segments.push(hi - lo);
            for i in lo + 1..hi {
                let moving = self.arr[i];
                let mv = self.values[moving];
                let mut j = i;
                while j > lo {
                    self.trace.comparisons_cleanup += 1;
                    if self.values[self.arr[j - 1]] > mv {
                        self.arr[j] = self.arr[j - 1];
                        self.pos[self.arr[j]] = j;
                        j -= 1;
                    } else {
                        break;
                    }
                }
                self.arr[j] = moving;
                self.pos[moving] = j;
            }
        }
        self.segments.clear();
    }

    fn finish(mut self) -> (PivotTrace, PerElementComparisons) {
        assert!(
            self.arr.windows(2).all(|w| self.values[w[0]] < self.values[w[1]]),
            "output not sorted"
        );
        self.trace.cleanup_segments.sort_unstable();
        (self.trace, PerElementComparisons(self.per_label))
    }
}

/// Run Setting 1 on an explicit pivot-index stream.
pub fn run_setting1_stream(
    input: &SortInput,
    ys: &[usize],
) -> (PivotTrace, PerElementComparisons) {
    let mut engine = SegmentEngine::new(input);
    for &y in ys {
        assert!(y < input.len(), "pivot index out of range");
        engine.apply_pivot(y);
    }
    engine.cleanup();
    engine.finish()
}

/// Setting 1 with Y_i drawn from the family at points 0..n.
pub fn run_setting1(
    input: &SortInput,
    family: &IndexFamilySpec,
    stream: &mut SplitMix64,
) -> Result<(PivotTrace, PerElementComparisons)> {
    let n = input.len() as u64;
    if n == 0 {
        return Ok((PivotTrace::default(), PerElementComparisons(Vec::new())));
    }
    let draw = family.draw(n, n, stream)?;
    let ys: Vec<usize> = (0..n).map(|i| draw.index(i) as usize).collect();
    Ok(run_setting1_stream(input, &ys))
}

/// Run Setting 2 on explicit, collision-free label numerators.
pub fn run_setting2_ranks(
    input: &SortInput,
    labels: &[u128],
) -> (PivotTrace, PerElementComparisons) {
    debug_assert_eq!(labels.len(), input.len());
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_unstable_by_key(|&i| (labels[i], i));
    let mut engine = SegmentEngine::new(input);
    for &y in &order {
        engine.apply_pivot(y);
    }
    // every label pivots exactly once, so no segment survives
    debug_assert!(engine.segments.is_empty());
    engine.finish()
}

/// Setting 2 with Z_i drawn from the family; exact numerator collisions
/// redraw the whole vector, up to 64 times.
pub fn run_setting2(
    input: &SortInput,
    family: &UnitFamilySpec,
    stream: &mut SplitMix64,
) -> Result<(PivotTrace, PerElementComparisons)> {
    let n = input.len() as u64;
    if n == 0 {
        return Ok((PivotTrace::default(), PerElementComparisons(Vec::new())));
    }
    let mut redraws = 0u32;
    loop {
        let draw = family.draw(n, stream)?;
        let labels: Vec<u128> = (0..n).map(|i| draw.unit(i).numerator()).collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            redraws += 1;
            if redraws >= REDRAW_LIMIT {
                return Err(Error::RedrawLimitExceeded { redraws });
            }
            continue;
        }
        let (mut trace, per) = run_setting2_ranks(input, &labels);
        trace.redraws = u64::from(redraws);
        return Ok((trace, per));
    }
}

/// Where pivots come from: the setting fixes both the pivot semantics and
/// the kind of family feeding them.
#[derive(Debug, Clone)]
pub enum PivotSource {
    Setting1(IndexFamilySpec),
    Setting2(UnitFamilySpec),
}

#[derive(Debug, Clone)]
pub struct QuicksortEstimates {
    pub total_comparisons: Estimate,
    pub partition_comparisons: Estimate,
    pub cleanup_comparisons: Estimate,
    pub max_per_element: Estimate,
    pub pivots_skipped: Estimate,
    pub mean_redraws: Estimate,
}

/// Monte Carlo comparison counts over independent trials on the identity
/// input of size n.
pub fn estimate_comparisons(
    n: usize,
    source: &PivotSource,
    trials: u64,
    lineage: SeedLineage,
) -> Result<QuicksortEstimates> {
    assert!(trials >= 1);
    let input = SortInput::identity(n);
    let rows: Vec<Result<[f64; 6]>> = run_trials(trials, |t| {
        let mut stream = lineage.stream(t);
        let (trace, per) = match source {
            PivotSource::Setting1(f) => run_setting1(&input, f, &mut stream)?,
            PivotSource::Setting2(f) => run_setting2(&input, f, &mut stream)?,
        };
        Ok([
            trace.total_comparisons() as f64,
            trace.comparisons_partition as f64,
            trace.comparisons_cleanup as f64,
            per.max() as f64,
            trace.pivots_skipped as f64,
            trace.redraws as f64,
        ])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let column = |i: usize| -> Vec<f64> { rows.iter().map(|r| r[i]).collect() };
    Ok(QuicksortEstimates {
        total_comparisons: Estimate::from_samples(&column(0), lineage),
        partition_comparisons: Estimate::from_samples(&column(1), lineage),
        cleanup_comparisons: Estimate::from_samples(&column(2), lineage),
        max_per_element: Estimate::from_samples(&column(3), lineage),
        pivots_skipped: Estimate::from_samples(&column(4), lineage),
        mean_redraws: Estimate::from_samples(&column(5), lineage),
    })
}

/// Maximum node depth (root = 1) of the treap over keys 0..n-1 whose
/// priorities are the family's unit values, ties broken by key.
pub fn treap_max_depth(
    n: usize,
    family: &UnitFamilySpec,
    stream: &mut SplitMix64,
) -> Result<usize> {
    assert!(n >= 1);
    let draw = family.draw(n as u64, stream)?;
    let prio: Vec<u128> = (0..n as u64).map(|i| draw.unit(i).numerator()).collect();
    Ok(cartesian_tree_max_depth(&prio))
}

/// Min-at-root Cartesian tree over key order; iterative, since adversarial
/// priorities produce depth n.
fn cartesian_tree_max_depth(prio: &[u128]) -> usize {
    let n = prio.len();
    if n == 0 {
        return 0;
    }
    let none = usize::MAX;
    let mut left = vec![none; n];
    let mut right = vec![none; n];
    let mut stack: Vec<usize> = Vec::new();
    for k in 0..n {
        let mut last = none;
        while let Some(&top) = stack.last() {
            // ties go right: earlier key keeps the higher position
            if (prio[top], top) > (prio[k], k) {
                last = top;
                stack.pop();
            } else {
                break;
            }
        }
        if last != none {
            left[k] = last;
        }
        if let Some(&top) = stack.last() {
            right[top] = k;
        }
        stack.push(k);
    }
    let root = stack[0];
    let mut max_depth = 0usize;
    let mut work = vec![(root, 1usize)];
    while let Some((node, depth)) = work.pop() {
        max_depth = max_depth.max(depth);
        if left[node] != none {
            work.push((left[node], depth + 1));
        }
        if right[node] != none {
            work.push((right[node], depth + 1));
        }
    }
    max_depth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setting1_hand_traces() {
        // n = 1: nothing to compare
        let (t, per) = run_setting1_stream(&SortInput::identity(1), &[0]);
        assert_eq!(t.total_comparisons(), 0);
        assert_eq!(t.pivots_executed, 1);
        assert_eq!(per.0, vec![0]);

        // n = 2, Y = (0, 1): one comparison, second pivot trivial
        let (t, per) = run_setting1_stream(&SortInput::identity(2), &[0, 1]);
        assert_eq!(t.comparisons_partition, 1);
        assert_eq!(t.comparisons_cleanup, 0);
        assert_eq!(t.pivots_executed, 2);
        assert_eq!(per.0, vec![0, 1]);

        // repeated pivot indices are skipped
        let (t, _) = run_setting1_stream(&SortInput::identity(4), &[2, 2, 2, 2]);
        assert_eq!(t.pivots_executed, 1);
        assert_eq!(t.pivots_skipped, 3);
    }

    #[test]
    fn constant_stream_on_reversed_input_is_quadratic() {
        // pivot x_0 holds the largest value of the reversed input, so one
        // partition pass leaves a descending segment of n-1 elements and the
        // cleanup insertion sort pays (n-1)(n-2)/2
        let n = 64u64;
        let input = SortInput::from_values((0..n).rev().collect()).unwrap();
        let (t, _) = run_setting1_stream(&input, &[0]);
        assert_eq!(t.comparisons_partition, n - 1);
        assert_eq!(t.comparisons_cleanup, (n - 1) * (n - 2) / 2);
        assert_eq!(t.cleanup_segments, vec![(n - 1) as usize]);
    }

    #[test]
    fn permutation_stream_needs_no_cleanup() {
        let n = 128usize;
        let mut ys: Vec<usize> = (0..n).collect();
        // a fixed scrambled permutation
        let mut s = SplitMix64::new(99);
        s.shuffle(&mut ys);
        let (t, per) = run_setting1_stream(&SortInput::identity(n), &ys);
        assert_eq!(t.comparisons_cleanup, 0);
        assert_eq!(t.pivots_executed, n as u64);
        assert_eq!(per.0.iter().sum::<u64>(), t.comparisons_partition);
    }

    #[test]
    fn accounting_invariants_on_random_streams() {
        let mut s = SplitMix64::new(7);
        for _ in 0..20 {
            let n = 200usize;
            let ys: Vec<usize> = (0..n).map(|_| s.below(n as u64) as usize).collect();
            let (t, per) = run_setting1_stream(&SortInput::identity(n), &ys);
            assert_eq!(per.0.iter().sum::<u64>(), t.comparisons_partition);
            assert_eq!(t.total_comparisons(), t.comparisons_partition + t.comparisons_cleanup);
            assert_eq!(t.pivots_executed + t.pivots_skipped, n as u64);
        }
    }

    #[test]
    fn setting2_increasing_labels_match_first_element_quicksort() {
        // reference count: deterministic quicksort always picking the first
        // element of the segment, on the same input
        fn reference(values: &[u64]) -> u64 {
            fn go(v: &[u64]) -> u64 {
                if v.len() <= 1 {
                    return 0;
                }
                let pivot = v[0];
                let less: Vec<u64> = v[1..].iter().copied().filter(|&x| x < pivot).collect();
                let greater: Vec<u64> = v[1..].iter().copied().filter(|&x| x > pivot).collect();
                (v.len() as u64 - 1) + go(&less) + go(&greater)
            }
            go(values)
        }
        let mut s = SplitMix64::new(13);
        for _ in 0..10 {
            let mut values: Vec<u64> = (0..100).collect();
            s.shuffle(&mut values);
            let input = SortInput::from_values(values.clone()).unwrap();
            let labels: Vec<u128> = (0..100).collect();
            let (t, _) = run_setting2_ranks(&input, &labels);
            assert_eq!(t.comparisons_partition, reference(&values));
            assert_eq!(t.comparisons_cleanup, 0);
        }
    }

    #[test]
    fn setting2_collision_free_run_counts_zero_redraws() {
        let input = SortInput::identity(64);
        let fam = UnitFamilySpec::FullRandom;
        let mut stream = SplitMix64::new(3);
        let (t, _) = run_setting2(&input, &fam, &mut stream).unwrap();
        assert_eq!(t.redraws, 0);
        assert_eq!(t.comparisons_cleanup, 0);
    }

    #[test]
    fn setting2_degenerate_family_exhausts_redraws() {
        // a 1-independent poly over 2^61-1 is a constant function, so every
        // label collides and the redraw limit must trip
        let input = SortInput::identity(8);
        let fam = UnitFamilySpec::Poly { k: 1 };
        let mut stream = SplitMix64::new(3);
        assert!(matches!(
            run_setting2(&input, &fam, &mut stream),
            Err(Error::RedrawLimitExceeded { .. })
        ));
    }

    #[test]
    fn setting2_full_random_matches_classic_quicksort() {
        // exact mean for classic randomized quicksort: 2(n+1)H_n - 4n
        let n = 1usize << 12;
        let h_n: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
        let exact = 2.0 * (n as f64 + 1.0) * h_n - 4.0 * n as f64;
        let lineage = SeedLineage::new(2024, "qs-classic");
        let est = estimate_comparisons(
            n,
            &PivotSource::Setting2(UnitFamilySpec::FullRandom),
            100,
            lineage,
        )
        .unwrap();
        let z = (est.total_comparisons.mean - exact).abs() / est.total_comparisons.std_error();
        assert!(z < 3.0, "mean {} vs exact {exact} (z = {z})", est.total_comparisons.mean);
        // and the coarse n ln n normalization stays near 2
        let norm = est.total_comparisons.mean / (n as f64 * (n as f64).ln());
        assert!((1.5..=2.3).contains(&norm), "norm = {norm}");
    }

    #[test]
    fn treap_depth_cases() {
        let mut s = SplitMix64::new(5);
        assert_eq!(treap_max_depth(1, &UnitFamilySpec::FullRandom, &mut s).unwrap(), 1);

        // strictly increasing priorities by key: a right path of depth n
        assert_eq!(cartesian_tree_max_depth(&[1, 2, 3, 4, 5, 6, 7]), 7);
        // balanced priorities
        assert_eq!(cartesian_tree_max_depth(&[2, 1, 3]), 2);

        // full-random priorities, n = 2^14, 100 trials: mean max depth over
        // log2 n lands in [2, 5]
        let n = 1 << 14;
        let mut total = 0usize;
        for t in 0..100u64 {
            let mut stream = SeedLineage::new(7, "treap").stream(t);
            total += treap_max_depth(n, &UnitFamilySpec::FullRandom, &mut stream).unwrap();
        }
        let mean = total as f64 / 100.0;
        let norm = mean / (n as f64).log2();
        assert!((2.0..=5.0).contains(&norm), "norm = {norm}");
    }

    #[test]
    fn single_element_runs_are_empty() {
        let input = SortInput::identity(1);
        let mut s = SplitMix64::new(8);
        let (t, _) = run_setting2(&input, &UnitFamilySpec::FullRandom, &mut s).unwrap();
        assert_eq!(t.total_comparisons(), 0);

        let est = estimate_comparisons(
            1,
            &PivotSource::Setting1(IndexFamilySpec::FullRandom),
            20,
            SeedLineage::new(1, "qs-n1"),
        )
        .unwrap();
        assert_eq!(est.total_comparisons.mean, 0.0);
        assert_eq!(est.max_per_element.mean, 0.0);
    }

    #[test]
    fn five_independent_matches_full_random_within_ci() {
        let n = 1 << 13;
        let trials = 60;
        let poly = estimate_comparisons(
            n,
            &PivotSource::Setting2(UnitFamilySpec::Poly { k: 5 }),
            trials,
            SeedLineage::new(5, "qs-k5"),
        )
        .unwrap()
        .total_comparisons;
        let fr = estimate_comparisons(
            n,
            &PivotSource::Setting2(UnitFamilySpec::FullRandom),
            trials,
            SeedLineage::new(5, "qs-fr"),
        )
        .unwrap()
        .total_comparisons;
        assert!(
            poly.ci95.0 <= fr.ci95.1 && fr.ci95.0 <= poly.ci95.1,
            "CIs disjoint: {:?} vs {:?}",
            poly.ci95,
            fr.ci95
        );
    }

    #[test]
    fn mean_comparisons_grow_with_n() {
        let lineage = SeedLineage::new(3, "qs-mono");
        let src = PivotSource::Setting1(IndexFamilySpec::Poly { k: 4 });
        let mut prev = -1.0;
        for n in [256usize, 512, 1024] {
            let est = estimate_comparisons(n, &src, 50, lineage).unwrap();
            assert!(est.total_comparisons.mean > prev);
            prev = est.total_comparisons.mean;
        }
    }

    #[test]
    fn estimates_are_reproducible() {
        let lineage = SeedLineage::new(11, "qs-repro");
        let src = PivotSource::Setting1(IndexFamilySpec::Poly { k: 4 });
        let a = estimate_comparisons(256, &src, 50, lineage).unwrap();
        let b = estimate_comparisons(256, &src, 50, lineage).unwrap();
        assert_eq!(a.total_comparisons.mean, b.total_comparisons.mean);
        assert_eq!(a.max_per_element.mean, b.max_per_element.mean);
    }
}
