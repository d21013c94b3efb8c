//! Sorting networks as the parallel merge stage of an arbitrary sort.
//!
//! [`hybrid_sort`] cuts the input into contiguous blocks, sorts every block
//! with an [`InnerSorter`] and merges the blocks with a block network.
//! [`parallel_mergesort_baseline`] and [`psrs_baseline`] are the usual
//! divide-and-conquer and sample-sort alternatives, kept for comparison.

mod psrs;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::comparators::{merge_sorted, Block, Key, MergeSplit};
use crate::executor::{run_parallel, BlockFrame, ExecError, RunMetrics, RunOptions};
use crate::inner::InnerSorter;
use crate::network::{bitonic_network, odd_even_merge_network, Network};
use crate::par;

pub use psrs::{psrs_baseline, PsrsRun};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NetworkKind {
    #[default]
    Bitonic,
    OddEven,
}

impl NetworkKind {
    pub fn build(self, order: u32) -> Network {
        match self {
            NetworkKind::Bitonic => bitonic_network(order),
            NetworkKind::OddEven => odd_even_merge_network(order),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::Bitonic => "bitonic",
            NetworkKind::OddEven => "oddeven",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bitonic" => Ok(NetworkKind::Bitonic),
            "oddeven" | "odd-even" => Ok(NetworkKind::OddEven),
            other => Err(format!("unknown network {other:?} (expected bitonic or oddeven)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridPlan {
    /// Number of blocks; a power of two.
    pub lanes: usize,
    pub inner: InnerSorter,
    pub network: NetworkKind,
    pub workers: usize,
}

impl Default for HybridPlan {
    fn default() -> Self {
        HybridPlan {
            lanes: 4,
            inner: InnerSorter::Std,
            network: NetworkKind::Bitonic,
            workers: par::default_workers(),
        }
    }
}

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("lane count {0} is not a power of two")]
    LanesNotPowerOfTwo(usize),
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("at least one lane is required")]
    NoLanes,
    #[error(transparent)]
    Exec(#[from] ExecError),
}

impl HybridPlan {
    pub fn validate(&self) -> Result<(), HybridError> {
        if !self.lanes.is_power_of_two() {
            return Err(HybridError::LanesNotPowerOfTwo(self.lanes));
        }
        if self.workers == 0 {
            return Err(HybridError::ZeroWorkers);
        }
        Ok(())
    }

    pub fn order(&self) -> u32 {
        self.lanes.trailing_zeros()
    }

    pub fn network(&self) -> Network {
        self.network.build(self.order())
    }
}

/// Output and phase timings of one [`hybrid_sort_timed`] call.
#[derive(Debug)]
pub struct HybridRun<K> {
    pub keys: Vec<K>,
    pub local_sort_ns: u64,
    pub merge_ns: u64,
    pub total_ns: u64,
    pub metrics: RunMetrics,
}

/// Contiguous blocks whose sizes differ by at most one, larger ones first.
pub fn split_blockwise<K>(mut keys: Vec<K>, parts: usize) -> Vec<Vec<K>> {
    let n = keys.len();
    let (base, extra) = (n / parts, n % parts);
    let mut blocks = Vec::with_capacity(parts);
    for i in (0..parts).rev() {
        let len = base + usize::from(i < extra);
        blocks.push(keys.split_off(keys.len() - len));
    }
    blocks.reverse();
    blocks
}

pub fn hybrid_sort<K: Key>(keys: Vec<K>, plan: &HybridPlan) -> Result<Vec<K>, HybridError> {
    hybrid_sort_timed(keys, plan, &RunOptions::default()).map(|run| run.keys)
}

/// Splits, sorts blocks in parallel, merges them with `plan`'s network and
/// concatenates the lanes.
pub fn hybrid_sort_timed<K: Key>(
    keys: Vec<K>,
    plan: &HybridPlan,
    options: &RunOptions,
) -> Result<HybridRun<K>, HybridError> {
    plan.validate()?;
    let network = plan.network();
    let started = Instant::now();

    let blocks = split_blockwise(keys, plan.lanes);
    let sort_started = Instant::now();
    let inner = plan.inner;
    let sorted = par::install(plan.workers, || par::map(blocks, |b| Block::from_sorted(inner.sort(b))));
    let frame = BlockFrame::new(
        sorted
            .into_iter()
            .map(|b| b.expect("inner sorter returned unsorted keys"))
            .collect(),
    );
    let local_sort_ns = sort_started.elapsed().as_nanos() as u64;

    let merge_started = Instant::now();
    let (frame, metrics) = run_parallel(&network, &MergeSplit, frame, plan.workers, options)?;
    let merge_ns = merge_started.elapsed().as_nanos() as u64;

    let mut keys = Vec::with_capacity(frame.total_keys());
    for block in frame.into_lanes() {
        keys.extend(block.into_vec());
    }
    Ok(HybridRun {
        keys,
        local_sort_ns,
        merge_ns,
        total_ns: started.elapsed().as_nanos() as u64,
        metrics,
    })
}

/// Divide-and-conquer mergesort: `2^depth` leaves sorted with `inner`,
/// sibling subtrees run in parallel, each merge is sequential.
pub fn parallel_mergesort_baseline<K: Key>(keys: Vec<K>, depth: u32, inner: InnerSorter, workers: usize) -> Vec<K> {
    fn go<K: Key>(keys: Vec<K>, depth: u32, inner: InnerSorter) -> Vec<K> {
        if depth == 0 || keys.len() < 2 {
            return inner.sort(keys);
        }
        let mut left = keys;
        let right = left.split_off(left.len() / 2);
        let (left, right) = par::join(|| go(left, depth - 1, inner), || go(right, depth - 1, inner));
        merge_sorted(&left, &right)
    }
    par::install(workers.max(1), || go(keys, depth, inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(lanes: usize, inner: InnerSorter) -> HybridPlan {
        HybridPlan {
            lanes,
            inner,
            network: NetworkKind::Bitonic,
            workers: 2,
        }
    }

    #[test]
    fn example_input() {
        for inner in InnerSorter::ALL {
            let out = hybrid_sort(vec![5, 3, 8, 1, 9, 2, 7, 4], &plan(4, inner)).unwrap();
            assert_eq!(out, vec![1, 2, 3, 4, 5, 7, 8, 9]);
        }
    }

    #[test]
    fn sorted_and_constant_inputs_are_fixed_points() {
        for lanes in [1, 2, 4, 8] {
            let sorted: Vec<i32> = (0..37).collect();
            assert_eq!(
                hybrid_sort(sorted.clone(), &plan(lanes, InnerSorter::Std)).unwrap(),
                sorted
            );
            let same = vec![7u8; 13];
            assert_eq!(
                hybrid_sort(same.clone(), &plan(lanes, InnerSorter::MergeSort)).unwrap(),
                same
            );
        }
    }

    #[test]
    fn tiny_inputs_with_many_lanes() {
        for n in 0..20 {
            let keys: Vec<i32> = (0..n).rev().collect();
            let mut expected = keys.clone();
            expected.sort();
            for network in [NetworkKind::Bitonic, NetworkKind::OddEven] {
                let p = HybridPlan {
                    lanes: 16,
                    network,
                    ..plan(16, InnerSorter::Insertion)
                };
                assert_eq!(hybrid_sort(keys.clone(), &p).unwrap(), expected, "n={n} {network}");
            }
        }
    }

    #[test]
    fn one_lane_is_the_inner_sort() {
        let run = hybrid_sort_timed(vec![3, 1, 2], &plan(1, InnerSorter::MergeSort), &RunOptions::default()).unwrap();
        assert_eq!(run.keys, vec![1, 2, 3]);
        assert_eq!(run.metrics.comparator_applications, 0);
    }

    #[test]
    fn plan_validation() {
        assert!(matches!(
            hybrid_sort(vec![1], &plan(3, InnerSorter::Std)),
            Err(HybridError::LanesNotPowerOfTwo(3))
        ));
        assert!(matches!(
            hybrid_sort(vec![1], &plan(0, InnerSorter::Std)),
            Err(HybridError::LanesNotPowerOfTwo(0))
        ));
        let p = HybridPlan {
            workers: 0,
            ..plan(2, InnerSorter::Std)
        };
        assert!(matches!(hybrid_sort(vec![1], &p), Err(HybridError::ZeroWorkers)));
    }

    #[test]
    fn blockwise_split_sizes() {
        let blocks = split_blockwise((0..10).collect::<Vec<_>>(), 4);
        assert_eq!(blocks, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7], vec![8, 9]]);
        let blocks = split_blockwise(vec![1, 2], 4);
        assert_eq!(blocks, vec![vec![1], vec![2], vec![], vec![]]);
    }

    #[test]
    fn mergesort_baseline() {
        let keys: Vec<i64> = (0..1000).map(|i| (i * 7919) % 1009).collect();
        let mut expected = keys.clone();
        expected.sort();
        assert_eq!(
            parallel_mergesort_baseline(keys.clone(), 0, InnerSorter::Insertion, 1),
            InnerSorter::Insertion.sort(keys.clone())
        );
        for depth in [1, 3, 6] {
            assert_eq!(
                parallel_mergesort_baseline(keys.clone(), depth, InnerSorter::MergeSort, 4),
                expected
            );
        }
    }

    #[test]
    fn network_kind_names() {
        assert_eq!("oddeven".parse::<NetworkKind>().unwrap(), NetworkKind::OddEven);
        assert_eq!(NetworkKind::Bitonic.to_string(), "bitonic");
        assert!("heap".parse::<NetworkKind>().is_err());
    }
}
