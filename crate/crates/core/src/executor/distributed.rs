//! Sorting data that is already spread over one source per lane.
//!
//! Every lane is loaded and sorted on its own thread, then the lanes are
//! merged by the network with one worker per wire. Keys are never gathered
//! into one buffer: each worker only ever holds its own lane plus one
//! incoming operand.

use std::thread;
use std::time::Instant;

use super::{run_parallel, BlockFrame, ExecError, RunMetrics, RunOptions};
use crate::comparators::{Block, BlockComparator, Key};
use crate::inner::InnerSorter;
use crate::keyfile::KeyFileError;
use crate::network::Network;

/// Where one lane's keys come from.
pub trait LaneSource<K>: Send {
    fn load(self: Box<Self>) -> Result<Vec<K>, KeyFileError>;

    /// Already sorted; the inner sorter is skipped.
    fn is_sorted(&self) -> bool {
        false
    }
}

impl<K: Key> LaneSource<K> for Block<K> {
    fn load(self: Box<Self>) -> Result<Vec<K>, KeyFileError> {
        Ok(self.into_vec())
    }

    fn is_sorted(&self) -> bool {
        true
    }
}

impl<K: Key> LaneSource<K> for Vec<K> {
    fn load(self: Box<Self>) -> Result<Vec<K>, KeyFileError> {
        Ok(*self)
    }
}

#[derive(Debug)]
pub struct DistributedRun<K> {
    /// Output lanes in wire order; their concatenation is sorted.
    pub lanes: Vec<Block<K>>,
    pub metrics: RunMetrics,
    /// Wall time of the load phase (all lanes concurrently).
    pub io_ns: u64,
    /// Wall time of the local sort phase.
    pub local_sort_ns: u64,
    /// Wall time of the network merge.
    pub merge_ns: u64,
}

/// Loads, locally sorts and network-merges one lane per source.
///
/// `workers` threads run the network; pass the lane count to keep a single
/// wire per worker.
pub fn run_distributed<K: Key, C: BlockComparator<K> + ?Sized>(
    network: &Network,
    ce: &C,
    sources: Vec<Box<dyn LaneSource<K>>>,
    inner: InnerSorter,
    workers: usize,
    options: &RunOptions,
) -> Result<DistributedRun<K>, ExecError> {
    network.validate()?;
    if sources.len() != network.width {
        return Err(ExecError::WidthMismatch {
            network: network.width,
            lanes: sources.len(),
        });
    }
    if workers == 0 {
        return Err(ExecError::ZeroWorkers);
    }

    let started = Instant::now();
    let loaded: Vec<(bool, Result<Vec<K>, KeyFileError>)> = thread::scope(|scope| {
        let handles: Vec<_> = sources
            .into_iter()
            .map(|source| {
                scope.spawn(move || {
                    let sorted = source.is_sorted();
                    (sorted, source.load())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("lane loader panicked"))
            .collect()
    });
    let io_ns = started.elapsed().as_nanos() as u64;

    let mut raw = Vec::with_capacity(loaded.len());
    for (lane, (sorted, keys)) in loaded.into_iter().enumerate() {
        let keys = keys.map_err(|source| ExecError::Lane { lane, source })?;
        raw.push((sorted, keys));
    }

    let started = Instant::now();
    let blocks: Vec<Result<Block<K>, ExecError>> = thread::scope(|scope| {
        let handles: Vec<_> = raw
            .into_iter()
            .enumerate()
            .map(|(lane, (sorted, keys))| {
                scope.spawn(move || {
                    if sorted {
                        Block::from_sorted(keys).map_err(|e| ExecError::Lane {
                            lane,
                            source: KeyFileError::NotSorted(e),
                        })
                    } else {
                        Ok(Block::from_sorted(inner.sort(keys)).expect("inner sorter returned unsorted keys"))
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("lane sorter panicked"))
            .collect()
    });
    let local_sort_ns = started.elapsed().as_nanos() as u64;
    let frame = BlockFrame::new(blocks.into_iter().collect::<Result<_, _>>()?);

    let started = Instant::now();
    let (frame, metrics) = run_parallel(network, ce, frame, workers, options)?;
    let merge_ns = started.elapsed().as_nanos() as u64;

    Ok(DistributedRun {
        lanes: frame.into_lanes(),
        metrics,
        io_ns,
        local_sort_ns,
        merge_ns,
    })
}
