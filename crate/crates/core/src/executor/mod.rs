//! Running a network over a frame of blocks.
//!
//! [`run_sequential`] is the reference engine. [`run_parallel`] assigns wires
//! to workers that exchange blocks over point-to-point channels and must
//! produce the same frame bit for bit. [`run_distributed`] loads and sorts
//! one lane per source and then merges the lanes through the network.
//!
//! Scalar networks are run the same way, with singleton blocks.

mod distributed;
mod metrics;
mod parallel;

use std::time::Instant;

use thiserror::Error;

use crate::comparators::{merge_sorted, Block, BlockComparator, Key};
use crate::keyfile::KeyFileError;
use crate::network::{Comparator, Network, NetworkError};

pub use distributed::{run_distributed, DistributedRun, LaneSource};
pub use metrics::{Application, RunMetrics, StageMetrics};
pub use parallel::run_parallel;

/// Environment variable that turns on per-comparator conservation checks.
pub const DEBUG_CHECKS_ENV: &str = "BLOCKNET_DEBUG_CHECKS";

/// The blocks on every wire at one point of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BlockFrame<K> {
    lanes: Vec<Block<K>>,
}

impl<K: Key> BlockFrame<K> {
    pub fn new(lanes: Vec<Block<K>>) -> Self {
        BlockFrame { lanes }
    }

    /// Sorts each lane and wraps it as a block.
    pub fn from_unsorted(lanes: Vec<Vec<K>>) -> Self {
        BlockFrame::new(lanes.into_iter().map(Block::from_unsorted).collect())
    }

    /// One singleton block per key.
    pub fn from_scalars(keys: impl IntoIterator<Item = K>) -> Self {
        BlockFrame::new(keys.into_iter().map(Block::singleton).collect())
    }

    pub fn lanes(&self) -> &[Block<K>] {
        &self.lanes
    }

    pub fn into_lanes(self) -> Vec<Block<K>> {
        self.lanes
    }

    pub fn width(&self) -> usize {
        self.lanes.len()
    }

    pub fn total_keys(&self) -> usize {
        self.lanes.iter().map(Block::len).sum()
    }

    pub fn max_block(&self) -> usize {
        self.lanes.iter().map(Block::len).max().unwrap_or(0)
    }

    /// All keys in wire order.
    pub fn concat(&self) -> Vec<K> {
        self.lanes.iter().flat_map(|b| b.keys().iter().cloned()).collect()
    }

    /// `lane[i] ⪯ lane[i+1]` for every adjacent pair of wires.
    pub fn is_ordered(&self) -> bool {
        self.lanes
            .windows(2)
            .all(|w| crate::comparators::precedes(w[0].keys(), w[1].keys()))
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Verify conservation and sortedness after every comparator.
    pub debug_checks: bool,
    /// Count keys that leave their lane at each stage.
    pub track_transfers: bool,
    /// Keep the list of comparator applications in the metrics.
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            debug_checks: false,
            track_transfers: true,
            record_trace: false,
        }
    }
}

impl RunOptions {
    /// Defaults, with debug checks enabled when `BLOCKNET_DEBUG_CHECKS=1`.
    pub fn from_env() -> Self {
        RunOptions {
            debug_checks: std::env::var(DEBUG_CHECKS_ENV).is_ok_and(|v| v == "1"),
            ..RunOptions::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("invalid network: {0}")]
    InvalidNetwork(#[from] NetworkError),
    #[error("network has {network} wires but the frame has {lanes} lanes")]
    WidthMismatch { network: usize, lanes: usize },
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("stage {stage}: comparator {comparator} did not conserve its keys")]
    ConservationViolated { stage: usize, comparator: Comparator },
    #[error("stage {stage}: comparator {comparator} produced an unsorted block")]
    UnsortedOutput { stage: usize, comparator: Comparator },
    #[error("worker failed: {0}")]
    WorkerFailed(String),
    #[error("lane {lane}: {source}")]
    Lane {
        lane: usize,
        #[source]
        source: KeyFileError,
    },
}

fn check_shape(network: &Network, lanes: usize) -> Result<(), ExecError> {
    network.validate()?;
    if network.width != lanes {
        return Err(ExecError::WidthMismatch {
            network: network.width,
            lanes,
        });
    }
    Ok(())
}

/// Size of the multiset intersection of two key runs.
fn common_keys<K: Ord + Clone>(a: &[K], b: &[K]) -> usize {
    fn sorted<K: Ord + Clone>(x: &[K]) -> std::borrow::Cow<'_, [K]> {
        if x.windows(2).all(|w| w[0] <= w[1]) {
            x.into()
        } else {
            let mut v = x.to_vec();
            v.sort();
            v.into()
        }
    }
    let (a, b) = (sorted(a), sorted(b));
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Applies one comparator and records what happened.
fn apply_comparator<K: Key, C: BlockComparator<K> + ?Sized>(
    ce: &C,
    stage: usize,
    comparator: Comparator,
    lo: &Block<K>,
    hi: &Block<K>,
    options: &RunOptions,
    clock: Instant,
) -> Result<(Block<K>, Block<K>, Application), ExecError> {
    let start_ns = clock.elapsed().as_nanos() as u64;
    let (out_lo, out_hi) = ce.apply(lo, hi, comparator.dir);
    let end_ns = clock.elapsed().as_nanos() as u64;

    if options.debug_checks {
        if !out_lo.is_sorted() || !out_hi.is_sorted() {
            return Err(ExecError::UnsortedOutput { stage, comparator });
        }
        if merge_sorted(lo.keys(), hi.keys()) != merge_sorted(out_lo.keys(), out_hi.keys()) {
            return Err(ExecError::ConservationViolated { stage, comparator });
        }
    }
    let keys_crossed = if options.track_transfers {
        (lo.len() - common_keys(lo.keys(), out_lo.keys()) + hi.len() - common_keys(hi.keys(), out_hi.keys())) as u64
    } else {
        0
    };
    let record = Application {
        stage,
        comparator,
        start_ns,
        end_ns,
        keys_crossed,
        operand_keys: lo.len() + hi.len(),
        out_lo: out_lo.len(),
        out_hi: out_hi.len(),
    };
    Ok((out_lo, out_hi, record))
}

/// Applies every stage in order on the calling thread.
pub fn run_sequential<K: Key, C: BlockComparator<K> + ?Sized>(
    network: &Network,
    ce: &C,
    frame: BlockFrame<K>,
    options: &RunOptions,
) -> Result<(BlockFrame<K>, RunMetrics), ExecError> {
    check_shape(network, frame.width())?;
    let clock = Instant::now();
    let initial: Vec<usize> = frame.lanes.iter().map(Block::len).collect();
    let total_keys = frame.total_keys();
    let mut lanes = frame.lanes;
    let mut applied = Vec::with_capacity(network.comparator_count());
    let mut stage_wall = Vec::with_capacity(network.depth());

    for (s, stage) in network.stages.iter().enumerate() {
        let started = Instant::now();
        for &c in &stage.comparators {
            let (out_lo, out_hi, record) = apply_comparator(ce, s, c, &lanes[c.lo], &lanes[c.hi], options, clock)?;
            lanes[c.lo] = out_lo;
            lanes[c.hi] = out_hi;
            applied.push(record);
        }
        stage_wall.push(started.elapsed().as_nanos() as u64);
    }

    let mut metrics = RunMetrics::from_applications(network, &initial, applied, Some(stage_wall), options);
    metrics.peak_worker_residency = total_keys;
    metrics.wall_ns = clock.elapsed().as_nanos() as u64;
    Ok((BlockFrame::new(lanes), metrics))
}
