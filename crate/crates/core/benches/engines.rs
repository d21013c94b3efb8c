//! Sequential against threaded execution of the same work.
//!
//! Build with `--no-default-features` to time the sequential fallback of the
//! data-parallel loops; the executor comparison runs in both builds.

use criterion::{black_box, criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blocknet::bench::bench_input;
use blocknet::executor::{run_parallel, run_sequential, BlockFrame, RunOptions};
use blocknet::hybrid::{
    hybrid_sort, parallel_mergesort_baseline, psrs_baseline, split_blockwise, HybridPlan, NetworkKind,
};
use blocknet::inner::InnerSorter;
use blocknet::network::bitonic_network;
use blocknet::par;
use blocknet::MergeSplit;

fn sorted_frame(lanes: usize, per_lane: usize) -> BlockFrame<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    BlockFrame::from_unsorted((0..lanes).map(|_| (0..per_lane).map(|_| rng.gen()).collect()).collect())
}

fn executors(c: &mut Criterion) {
    let mut group = c.benchmark_group("executor");
    let options = RunOptions {
        track_transfers: false,
        ..RunOptions::default()
    };
    for order in [2u32, 3] {
        let network = bitonic_network(order);
        let frame = sorted_frame(network.width, 1 << 15);
        group.throughput(Throughput::Elements(frame.total_keys() as u64));
        group.bench_with_input(BenchmarkId::new("sequential", network.width), &frame, |b, frame| {
            b.iter_batched(
                || frame.clone(),
                |f| run_sequential(&network, &MergeSplit, f, &options).unwrap(),
                BatchSize::LargeInput,
            )
        });
        for workers in [1, network.width] {
            let id = BenchmarkId::new(format!("threads-{workers}"), network.width);
            group.bench_with_input(id, &frame, |b, frame| {
                b.iter_batched(
                    || frame.clone(),
                    |f| run_parallel(&network, &MergeSplit, f, workers, &options).unwrap(),
                    BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn local_sorts(c: &mut Criterion) {
    let mut group = c.benchmark_group("local-sort");
    let lanes = split_blockwise(bench_input(0, 1 << 18), 8);
    group.throughput(Throughput::Elements(1 << 18));
    for inner in [InnerSorter::Std, InnerSorter::MergeSort] {
        group.bench_with_input(BenchmarkId::new("lanes-in-turn", inner), &lanes, |b, lanes| {
            b.iter_batched(
                || lanes.clone(),
                |ls| ls.into_iter().map(|l| inner.sort(l)).collect::<Vec<_>>(),
                BatchSize::LargeInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("par-map", inner), &lanes, |b, lanes| {
            b.iter_batched(
                || lanes.clone(),
                |ls| par::map(ls, |l| inner.sort(l)),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn sorts(c: &mut Criterion) {
    let mut group = c.benchmark_group("sort");
    group.sample_size(10);
    let n = 1 << 18;
    let input = bench_input(0, n);
    let workers = par::default_workers();
    group.throughput(Throughput::Elements(n as u64));
    group.bench_function("std", |b| {
        b.iter_batched(|| input.clone(), |mut v| v.sort_unstable(), BatchSize::LargeInput)
    });
    for network in [NetworkKind::Bitonic, NetworkKind::OddEven] {
        let plan = HybridPlan {
            lanes: 8,
            inner: InnerSorter::Std,
            network,
            workers,
        };
        group.bench_function(format!("hybrid-{network}"), |b| {
            b.iter_batched(
                || input.clone(),
                |v| hybrid_sort(v, &plan).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.bench_function("par-mergesort", |b| {
        b.iter_batched(
            || input.clone(),
            |v| parallel_mergesort_baseline(v, 3, InnerSorter::Std, workers),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("psrs", |b| {
        b.iter_batched(
            || split_blockwise(input.clone(), 8),
            |lanes| black_box(psrs_baseline(lanes, InnerSorter::Std, workers).unwrap()),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, executors, local_sorts, sorts);
criterion_main!(benches);
