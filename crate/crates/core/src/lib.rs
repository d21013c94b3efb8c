//! Sorting networks over blocks of keys.
//!
//! A comparator network of width `k` merges `k` sorted blocks when each
//! comparator is replaced by [`merge_split`](comparators::merge_split): the
//! two blocks are merged and cut into a lower and an upper half. This crate
//! builds the networks, runs them sequentially or with one thread per group
//! of wires, checks them empirically and wraps them into a hybrid sort.

pub mod bench;
pub mod comparators;
pub mod executor;
pub mod hybrid;
pub mod inner;
pub mod keyfile;
pub mod network;
pub mod par;
pub mod verification;

pub use comparators::{
    merge_split, naive_swap, Block, BlockComparator, FiniteF64, Key, MergeSplit, NaiveSwap, ScalarCompare,
};
pub use executor::{run_distributed, run_parallel, run_sequential, BlockFrame, ExecError, RunMetrics, RunOptions};
pub use hybrid::{hybrid_sort, HybridPlan, NetworkKind};
pub use inner::InnerSorter;
pub use network::{bitonic_network, four_wire_network, odd_even_merge_network, Comparator, Direction, Network, Stage};
