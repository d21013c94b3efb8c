//! Parallel Sorting by Regular Sampling.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::HybridError;
use crate::comparators::Key;
use crate::inner::InnerSorter;
use crate::par;

#[derive(Debug)]
pub struct PsrsRun<K> {
    /// One run per lane; their concatenation is sorted.
    pub lanes: Vec<Vec<K>>,
    /// Keys sent to a lane other than the one they started on.
    pub keys_exchanged: u64,
    pub local_sort_ns: u64,
    /// Sampling, partitioning, exchange and the final merges.
    pub merge_ns: u64,
}

/// Samples at positions `i * len / p` of one sorted lane.
fn regular_samples<K: Clone>(lane: &[K], p: usize) -> impl Iterator<Item = K> + '_ {
    let len = lane.len();
    (0..p).filter(move |_| len > 0).map(move |i| lane[i * len / p].clone())
}

/// `p - 1` pivots at positions `i * p + p/2 - 1` of the sorted samples
/// (scaled when some lanes contributed fewer samples).
fn choose_pivots<K: Clone>(samples: &[K], p: usize) -> Vec<K> {
    if samples.is_empty() || p < 2 {
        return Vec::new();
    }
    let offset = p / 2 - 1;
    (1..p)
        .map(|i| samples[(i * samples.len() / p + offset).min(samples.len() - 1)].clone())
        .collect()
}

/// Cuts a sorted lane into `pivots.len() + 1` runs; run `j` holds the keys in
/// `(pivot[j-1], pivot[j]]`.
fn partition<K: Ord + Clone>(lane: &[K], pivots: &[K]) -> Vec<Vec<K>> {
    let mut runs = Vec::with_capacity(pivots.len() + 1);
    let mut start = 0;
    for pivot in pivots {
        let end = start + lane[start..].partition_point(|k| k <= pivot);
        runs.push(lane[start..end].to_vec());
        start = end;
    }
    runs.push(lane[start..].to_vec());
    runs
}

fn merge_runs<K: Ord + Clone>(runs: Vec<Vec<K>>) -> Vec<K> {
    let total = runs.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(total);
    let mut heap: BinaryHeap<Reverse<(K, usize, usize)>> = runs
        .iter()
        .enumerate()
        .filter_map(|(r, run)| run.first().map(|k| Reverse((k.clone(), r, 0))))
        .collect();
    while let Some(Reverse((key, r, i))) = heap.pop() {
        out.push(key);
        if let Some(next) = runs[r].get(i + 1) {
            heap.push(Reverse((next.clone(), r, i + 1)));
        }
    }
    out
}

/// Classic PSRS over `lanes.len()` lanes: local sort, regular sampling,
/// pivot selection, partition, all-to-all exchange, local multiway merge.
pub fn psrs_baseline<K: Key>(
    lanes: Vec<Vec<K>>,
    inner: InnerSorter,
    workers: usize,
) -> Result<PsrsRun<K>, HybridError> {
    let p = lanes.len();
    if p == 0 {
        return Err(HybridError::NoLanes);
    }
    if workers == 0 {
        return Err(HybridError::ZeroWorkers);
    }
    par::install(workers, || {
        let started = Instant::now();
        let sorted = par::map(lanes, |lane| inner.sort(lane));
        let local_sort_ns = started.elapsed().as_nanos() as u64;

        let started = Instant::now();
        let mut samples: Vec<K> = sorted.iter().flat_map(|lane| regular_samples(lane, p)).collect();
        samples.sort();
        let pivots = choose_pivots(&samples, p);
        let parts: Vec<Vec<Vec<K>>> = par::map(sorted, |lane| partition(&lane, &pivots));

        let mut incoming: Vec<Vec<Vec<K>>> = (0..p).map(|_| Vec::with_capacity(p)).collect();
        let mut keys_exchanged = 0u64;
        for (src, runs) in parts.into_iter().enumerate() {
            for (dst, run) in runs.into_iter().enumerate() {
                if src != dst {
                    keys_exchanged += run.len() as u64;
                }
                incoming[dst].push(run);
            }
        }
        let lanes = par::map(incoming, merge_runs);
        Ok(PsrsRun {
            lanes,
            keys_exchanged,
            local_sort_ns,
            merge_ns: started.elapsed().as_nanos() as u64,
        })
    })
}
