//! Benchmark matrix: every algorithm on the same seeded data, per-phase
//! timings, minimum-of-repetitions summaries and absolute speedups.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::comparators::MergeSplit;
use crate::executor::{run_distributed, LaneSource, RunOptions};
use crate::hybrid::{
    hybrid_sort_timed, parallel_mergesort_baseline, psrs_baseline, split_blockwise, HybridError, HybridPlan,
    NetworkKind,
};
use crate::inner::InnerSorter;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    HybridBitonic,
    HybridOddEven,
    ParMergesort,
    Psrs,
    Sequential,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::HybridBitonic,
        Algorithm::HybridOddEven,
        Algorithm::ParMergesort,
        Algorithm::Psrs,
        Algorithm::Sequential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::HybridBitonic => "hybrid-bitonic",
            Algorithm::HybridOddEven => "hybrid-oddeven",
            Algorithm::ParMergesort => "par-mergesort",
            Algorithm::Psrs => "psrs",
            Algorithm::Sequential => "sequential",
        }
    }

    fn network(self) -> Option<NetworkKind> {
        match self {
            Algorithm::HybridBitonic => Some(NetworkKind::Bitonic),
            Algorithm::HybridOddEven => Some(NetworkKind::OddEven),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub sizes: Vec<usize>,
    pub lanes: Vec<usize>,
    pub workers: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    /// Run the network algorithms through the per-lane distributed path.
    pub distributed: bool,
    pub inner: InnerSorter,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let mut workers = vec![1, 2, 4];
        let cores = par::default_workers();
        if !workers.contains(&cores) {
            workers.push(cores);
        }
        BenchConfig {
            algorithms: Algorithm::ALL.to_vec(),
            sizes: vec![1 << 18, 1 << 20, 1 << 22],
            lanes: vec![4, 8],
            workers,
            repetitions: 5,
            seed: 0,
            distributed: false,
            inner: InnerSorter::Std,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("the {0} list is empty")]
    EmptyAxis(&'static str),
    #[error("lane count {0} is not a power of two")]
    LanesNotPowerOfTwo(usize),
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("{algorithm} produced a wrong result for n={n}, lanes={lanes}, workers={workers}")]
    WrongResult {
        algorithm: Algorithm,
        n: usize,
        lanes: usize,
        workers: usize,
    },
    #[error(transparent)]
    Hybrid(#[from] HybridError),
    #[error(transparent)]
    Exec(#[from] crate::executor::ExecError),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::NoRepetitions);
        }
        for (name, empty) in [
            ("algorithm", self.algorithms.is_empty()),
            ("size", self.sizes.is_empty()),
            ("lane", self.lanes.is_empty()),
            ("worker", self.workers.is_empty()),
        ] {
            if empty {
                return Err(BenchError::EmptyAxis(name));
            }
        }
        if let Some(&l) = self.lanes.iter().find(|l| !l.is_power_of_two()) {
            return Err(BenchError::LanesNotPowerOfTwo(l));
        }
        if self.workers.contains(&0) {
            return Err(BenchError::ZeroWorkers);
        }
        Ok(())
    }
}

/// One timed repetition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub lanes: usize,
    pub workers: usize,
    pub repetition: usize,
    pub local_sort_ns: u64,
    pub merge_ns: u64,
    pub total_ns: u64,
    pub keys_exchanged: u64,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str =
        "algorithm,n,lanes,workers,repetition,local_sort_ns,merge_ns,total_ns,keys_exchanged";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.n,
            self.lanes,
            self.workers,
            self.repetition,
            self.local_sort_ns,
            self.merge_ns,
            self.total_ns,
            self.keys_exchanged
        )
    }
}

/// Statistics over the repetitions of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub algorithm: Algorithm,
    pub n: usize,
    pub lanes: usize,
    pub workers: usize,
    pub min_ns: u64,
    pub mean_ns: f64,
    pub stddev_ns: f64,
    /// Best sequential time at this `n` divided by `min_ns`.
    pub speedup: f64,
    pub keys_exchanged: u64,
}

impl BenchSummary {
    pub const CSV_HEADER: &'static str = "algorithm,n,lanes,workers,min_ns,mean_ns,stddev_ns,speedup,keys_exchanged";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.0},{:.0},{:.3},{}",
            self.algorithm,
            self.n,
            self.lanes,
            self.workers,
            self.min_ns,
            self.mean_ns,
            self.stddev_ns,
            self.speedup,
            self.keys_exchanged
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<BenchSummary>,
}

impl BenchReport {
    pub fn records_csv(&self) -> String {
        let mut out = format!("{}\n", BenchRecord::CSV_HEADER);
        for r in &self.records {
            out.push_str(&r.to_csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{}\n", BenchSummary::CSV_HEADER);
        for s in &self.summaries {
            out.push_str(&s.to_csv_row());
            out.push('\n');
        }
        out
    }

    pub fn summary(&self, algorithm: Algorithm, n: usize, lanes: usize, workers: usize) -> Option<&BenchSummary> {
        self.summaries
            .iter()
            .find(|s| s.algorithm == algorithm && s.n == n && s.lanes == lanes && s.workers == workers)
    }

    /// One table per input size: a row per (algorithm, lanes), a speedup
    /// column per worker count.
    pub fn speedup_table(&self) -> String {
        let mut by_n: BTreeMap<usize, Vec<&BenchSummary>> = BTreeMap::new();
        for s in &self.summaries {
            by_n.entry(s.n).or_default().push(s);
        }
        let mut out = String::new();
        for (n, rows) in by_n {
            let mut workers: Vec<usize> = rows.iter().map(|s| s.workers).collect();
            workers.sort_unstable();
            workers.dedup();
            let _ = writeln!(out, "n = {n}");
            let _ = write!(out, "{:<16} {:>5}", "algorithm", "lanes");
            for w in &workers {
                let _ = write!(out, " {:>8}", format!("w={w}"));
            }
            out.push('\n');
            let mut keys: Vec<(Algorithm, usize)> = rows.iter().map(|s| (s.algorithm, s.lanes)).collect();
            keys.sort_unstable();
            keys.dedup();
            for (algorithm, lanes) in keys {
                let _ = write!(out, "{:<16} {:>5}", algorithm.name(), lanes);
                for &w in &workers {
                    match rows
                        .iter()
                        .find(|s| s.algorithm == algorithm && s.lanes == lanes && s.workers == w)
                    {
                        Some(s) => {
                            let _ = write!(out, " {:>8.2}", s.speedup);
                        }
                        None => {
                            let _ = write!(out, " {:>8}", "-");
                        }
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

/// The benchmark input for size `n`; identical for every algorithm.
pub fn bench_input(seed: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    (0..n).map(|_| rng.gen()).collect()
}

struct Timed {
    keys: Vec<i64>,
    local_sort_ns: u64,
    merge_ns: u64,
    keys_exchanged: u64,
}

fn run_once(
    algorithm: Algorithm,
    input: Vec<i64>,
    lanes: usize,
    workers: usize,
    config: &BenchConfig,
) -> Result<Timed, BenchError> {
    let inner = config.inner;
    let options = RunOptions::default();
    Ok(match algorithm {
        Algorithm::Sequential => {
            let started = Instant::now();
            let keys = inner.sort(input);
            Timed {
                keys,
                local_sort_ns: started.elapsed().as_nanos() as u64,
                merge_ns: 0,
                keys_exchanged: 0,
            }
        }
        Algorithm::HybridBitonic | Algorithm::HybridOddEven if config.distributed => {
            let network = algorithm
                .network()
                .expect("network algorithm")
                .build(lanes.trailing_zeros());
            let sources = split_blockwise(input, lanes)
                .into_iter()
                .map(|lane| Box::new(lane) as Box<dyn LaneSource<i64>>)
                .collect();
            let run = run_distributed(&network, &MergeSplit, sources, inner, workers, &options)?;
            Timed {
                keys: run.lanes.into_iter().flat_map(|b| b.into_vec()).collect(),
                local_sort_ns: run.local_sort_ns,
                merge_ns: run.merge_ns,
                keys_exchanged: run.metrics.keys_crossed(),
            }
        }
        Algorithm::HybridBitonic | Algorithm::HybridOddEven => {
            let plan = HybridPlan {
                lanes,
                inner,
                network: algorithm.network().expect("network algorithm"),
                workers,
            };
            let run = hybrid_sort_timed(input, &plan, &options)?;
            Timed {
                keys: run.keys,
                local_sort_ns: run.local_sort_ns,
                merge_ns: run.merge_ns,
                keys_exchanged: run.metrics.keys_crossed(),
            }
        }
        Algorithm::ParMergesort => {
            let n = input.len() as u64;
            let depth = lanes.trailing_zeros();
            let started = Instant::now();
            let keys = parallel_mergesort_baseline(input, depth, inner, workers);
            Timed {
                keys,
                local_sort_ns: 0,
                merge_ns: started.elapsed().as_nanos() as u64,
                // Every merge level moves every key once.
                keys_exchanged: n * depth as u64,
            }
        }
        Algorithm::Psrs => {
            let run = psrs_baseline(split_blockwise(input, lanes), inner, workers)?;
            Timed {
                keys: run.lanes.concat(),
                local_sort_ns: run.local_sort_ns,
                merge_ns: run.merge_ns,
                keys_exchanged: run.keys_exchanged,
            }
        }
    })
}

fn mean_stddev(samples: &[u64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&s| s as f64).sum::<f64>() / n;
    let var = samples.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the grid. Each output is compared with the reference sort before its
/// timing is recorded; a mismatch aborts the run.
///
/// `progress` is called after every grid point.
pub fn run_bench(config: &BenchConfig, mut progress: impl FnMut(&BenchSummary)) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let mut report = BenchReport::default();

    for &n in &config.sizes {
        let input = bench_input(config.seed, n);
        let mut reference = input.clone();
        reference.sort_unstable();

        // (algorithm, lanes, workers); the sequential sort ignores both axes.
        let mut points = Vec::new();
        for &algorithm in &config.algorithms {
            if algorithm == Algorithm::Sequential {
                points.push((algorithm, 1, 1));
                continue;
            }
            for &lanes in &config.lanes {
                for &workers in &config.workers {
                    points.push((algorithm, lanes, workers));
                }
            }
        }

        let mut pending = Vec::new();
        for (algorithm, lanes, workers) in points {
            let mut totals = Vec::with_capacity(config.repetitions);
            let mut exchanged = 0;
            for repetition in 0..config.repetitions {
                let data = input.clone();
                let started = Instant::now();
                let timed = run_once(algorithm, data, lanes, workers, config)?;
                let total_ns = started.elapsed().as_nanos() as u64;
                if timed.keys != reference {
                    return Err(BenchError::WrongResult {
                        algorithm,
                        n,
                        lanes,
                        workers,
                    });
                }
                totals.push(total_ns);
                exchanged = timed.keys_exchanged;
                report.records.push(BenchRecord {
                    algorithm,
                    n,
                    lanes,
                    workers,
                    repetition,
                    local_sort_ns: timed.local_sort_ns,
                    merge_ns: timed.merge_ns,
                    total_ns,
                    keys_exchanged: timed.keys_exchanged,
                });
            }
            let (mean_ns, stddev_ns) = mean_stddev(&totals);
            pending.push(BenchSummary {
                algorithm,
                n,
                lanes,
                workers,
                min_ns: totals.iter().copied().min().unwrap_or(0),
                mean_ns,
                stddev_ns,
                speedup: f64::NAN,
                keys_exchanged: exchanged,
            });
        }

        // Best sequential time: the sequential sort when it ran, otherwise the
        // fastest single-worker run.
        let baseline = pending
            .iter()
            .filter(|s| s.algorithm == Algorithm::Sequential)
            .map(|s| s.min_ns)
            .min()
            .or_else(|| pending.iter().filter(|s| s.workers == 1).map(|s| s.min_ns).min());
        for mut s in pending {
            if let Some(best) = baseline {
                s.speedup = best as f64 / s.min_ns.max(1) as f64;
            }
            progress(&s);
            report.summaries.push(s);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(algorithms: Vec<Algorithm>) -> BenchConfig {
        BenchConfig {
            algorithms,
            sizes: vec![0, 1, 1000],
            lanes: vec![1, 4],
            workers: vec![1, 2],
            repetitions: 2,
            seed: 3,
            distributed: false,
            inner: InnerSorter::Std,
        }
    }

    #[test]
    fn every_algorithm_runs_and_records() {
        let config = small(Algorithm::ALL.to_vec());
        let report = run_bench(&config, |_| {}).unwrap();
        // 4 parallel algorithms x 2 lanes x 2 workers + sequential, per size, x reps.
        assert_eq!(report.records.len(), 3 * (4 * 2 * 2 + 1) * 2);
        assert_eq!(report.summaries.len(), 3 * (4 * 2 * 2 + 1));
        let csv = report.records_csv();
        assert!(csv.starts_with(BenchRecord::CSV_HEADER));
        assert_eq!(csv.lines().count(), report.records.len() + 1);
        let seq = report.summary(Algorithm::Sequential, 1000, 1, 1).unwrap();
        assert!((seq.speedup - 1.0).abs() < 1e-9);
        assert!(report.speedup_table().contains("hybrid-bitonic"));
    }

    #[test]
    fn distributed_flag_uses_lane_sources() {
        let mut config = small(vec![Algorithm::HybridBitonic, Algorithm::HybridOddEven]);
        config.distributed = true;
        let report = run_bench(&config, |_| {}).unwrap();
        assert!(report.records.iter().all(|r| r.keys_exchanged <= (r.n as u64) * 20));
    }

    #[test]
    fn same_seed_same_input() {
        assert_eq!(bench_input(1, 100), bench_input(1, 100));
        assert_ne!(bench_input(1, 100), bench_input(2, 100));
        assert_eq!(bench_input(1, 0), Vec::<i64>::new());
    }

    #[test]
    fn psrs_exchange_grows_with_lanes() {
        let mut config = small(vec![Algorithm::Psrs]);
        config.sizes = vec![20_000];
        config.lanes = vec![2, 4, 8, 16];
        config.workers = vec![1];
        config.repetitions = 1;
        let report = run_bench(&config, |_| {}).unwrap();
        let exchanged: Vec<u64> = report.summaries.iter().map(|s| s.keys_exchanged).collect();
        assert!(exchanged.windows(2).all(|w| w[0] < w[1]), "{exchanged:?}");
    }

    #[test]
    fn config_validation() {
        let ok = small(vec![Algorithm::Psrs]);
        assert!(ok.validate().is_ok());
        assert!(matches!(
            BenchConfig {
                repetitions: 0,
                ..ok.clone()
            }
            .validate(),
            Err(BenchError::NoRepetitions)
        ));
        assert!(matches!(
            BenchConfig {
                lanes: vec![3],
                ..ok.clone()
            }
            .validate(),
            Err(BenchError::LanesNotPowerOfTwo(3))
        ));
        assert!(matches!(
            BenchConfig {
                workers: vec![0],
                ..ok.clone()
            }
            .validate(),
            Err(BenchError::ZeroWorkers)
        ));
        assert!(matches!(
            BenchConfig { sizes: vec![], ..ok }.validate(),
            Err(BenchError::EmptyAxis("size"))
        ));
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("quick".parse::<Algorithm>().is_err());
    }
}
