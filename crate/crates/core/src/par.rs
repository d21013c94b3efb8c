//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these run on rayon; without it they are
//! plain loops with identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of threads the data-parallel helpers use by default.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// Runs `op` on a pool of `workers` threads; nested [`map`] and [`join`]
/// calls use that pool.
#[cfg(feature = "parallel")]
pub fn install<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(op),
        // Thread spawning failed; the work is still correct on this thread.
        Err(_) => op(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn install<R: Send>(_workers: usize, op: impl FnOnce() -> R + Send) -> R {
    op()
}

#[cfg(feature = "parallel")]
pub fn map<T: Send, U: Send>(items: Vec<T>, f: impl Fn(T) -> U + Sync + Send) -> Vec<U> {
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T: Send, U: Send>(items: Vec<T>, f: impl Fn(T) -> U + Sync + Send) -> Vec<U> {
    items.into_iter().map(f).collect()
}

/// Maps `0..n` and collects in index order.
#[cfg(feature = "parallel")]
pub fn map_range<U: Send>(n: u64, f: impl Fn(u64) -> U + Sync + Send) -> Vec<U> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U: Send>(n: u64, f: impl Fn(u64) -> U + Sync + Send) -> Vec<U> {
    (0..n).map(f).collect()
}

/// First element (in slice order) for which `f` returns `Some`.
#[cfg(feature = "parallel")]
pub fn find_map_first<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Option<U> + Sync + Send) -> Option<U> {
    items.par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub fn find_map_first<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Option<U> + Sync + Send) -> Option<U> {
    items.iter().find_map(f)
}

#[cfg(feature = "parallel")]
pub fn join<A: Send, B: Send>(a: impl FnOnce() -> A + Send, b: impl FnOnce() -> B + Send) -> (A, B) {
    rayon::join(a, b)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A: Send, B: Send>(a: impl FnOnce() -> A + Send, b: impl FnOnce() -> B + Send) -> (A, B) {
    (a(), b())
}
