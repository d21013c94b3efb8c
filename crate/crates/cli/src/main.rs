use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use blocknet::bench::{run_bench, Algorithm, BenchConfig};
use blocknet::comparators::{BlockComparator, FiniteF64, MergeSplit, NaiveSwap};
use blocknet::executor::{run_distributed, LaneSource, RunOptions};
use blocknet::hybrid::{hybrid_sort_timed, HybridPlan, NetworkKind};
use blocknet::inner::InnerSorter;
use blocknet::keyfile::{read_keys, write_keys, FileKey, KeyFile, KeyFormat};
use blocknet::network::{four_wire_network, Network};
use blocknet::par;
use blocknet::verification::{
    check_direct_relations, check_frames, find_counterexample, verify_zero_one, CheckReport, FrameSpace,
    MAX_ZERO_ONE_WIDTH,
};

#[derive(Parser)]
#[command(name = "blocknet", version, about = "Block sorting networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a network in text form.
    DumpNetwork(DumpArgs),
    /// Check a network and a block comparison element.
    Verify(VerifyArgs),
    /// Sort key files.
    Sort(SortArgs),
    /// Run the benchmark grid.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NetworkName {
    Bitonic,
    Oddeven,
    FourWire,
}

#[derive(Args)]
struct NetworkSource {
    /// Generated network.
    #[arg(long, value_enum, default_value = "bitonic", conflicts_with = "network_file")]
    network: NetworkName,
    /// log2 of the width; ignored for four-wire.
    #[arg(long, default_value_t = 3)]
    order: u32,
    /// Network in text form instead of a generated one.
    #[arg(long)]
    network_file: Option<PathBuf>,
}

impl NetworkSource {
    fn load(&self) -> Result<Network> {
        let network = match &self.network_file {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                text.parse::<Network>()
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => {
                ensure!(self.order <= 20, "order {} is too large", self.order);
                match self.network {
                    NetworkName::Bitonic => NetworkKind::Bitonic.build(self.order),
                    NetworkName::Oddeven => NetworkKind::OddEven.build(self.order),
                    NetworkName::FourWire => four_wire_network(),
                }
            }
        };
        network.validate()?;
        Ok(network)
    }
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    source: NetworkSource,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ComparatorName {
    MergeSplit,
    NaiveSwap,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: NetworkSource,
    #[arg(long, value_enum, default_value = "merge-split")]
    comparator: ComparatorName,
    /// Keys of the block frames are drawn from 0..domain.
    #[arg(long, default_value_t = 3)]
    domain: u32,
    #[arg(long, default_value_t = 2)]
    max_block: usize,
    /// Largest frame space enumerated exhaustively; random frames beyond it.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the relation suite with this many samples per relation.
    #[arg(long, value_name = "SAMPLES")]
    relations: Option<u64>,
    /// Write the reports as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatName {
    Bin,
    Txt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KeyType {
    I64,
    F64,
}

#[derive(Args)]
struct SortArgs {
    /// Input key files; with --distributed, one per lane.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output key files; with --distributed, one per lane.
    #[arg(long, short, required = true, num_args = 1..)]
    output: Vec<PathBuf>,
    /// Number of blocks; a power of two. Defaults to the input count with --distributed.
    #[arg(long)]
    lanes: Option<usize>,
    #[arg(long, default_value_t = par::default_workers())]
    workers: usize,
    #[arg(long, default_value = "bitonic")]
    network: NetworkKind,
    #[arg(long, default_value = "std")]
    inner: InnerSorter,
    /// Key file format; guessed from the extension (.bin is binary) when absent.
    #[arg(long, value_enum)]
    format: Option<FormatName>,
    #[arg(long, value_enum, default_value = "i64")]
    keys: KeyType,
    /// Keep one file per lane from input to output.
    #[arg(long)]
    distributed: bool,
    /// Write per-stage metrics of the merge.
    #[arg(long)]
    metrics_csv: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let parsed = match s.split_once('^') {
        Some((base, exp)) => {
            let base: usize = base.parse().map_err(|e| format!("{s:?}: {e}"))?;
            let exp: u32 = exp.parse().map_err(|e| format!("{s:?}: {e}"))?;
            base.checked_pow(exp).ok_or_else(|| format!("{s:?} overflows"))
        }
        None => s.parse().map_err(|e| format!("{s:?}: {e}")),
    }?;
    Ok(parsed)
}

#[derive(Args)]
struct BenchArgs {
    /// Input sizes; `2^20` style is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_values = ["2^18", "2^20", "2^22"])]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8])]
    lanes: Vec<usize>,
    /// Worker counts; defaults to 1, 2, 4 and the core count.
    #[arg(long, value_delimiter = ',')]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value = "std")]
    inner: InnerSorter,
    /// Run the network algorithms with one key source per lane.
    #[arg(long)]
    distributed: bool,
    /// Per-repetition records.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-grid-point statistics.
    #[arg(long)]
    summary_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::DumpNetwork(args) => dump(args).map(|()| true),
        Command::Verify(args) => verify(args),
        Command::Sort(args) => sort(args).map(|()| true),
        Command::Bench(args) => bench(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dump(args: DumpArgs) -> Result<()> {
    let text = args.source.load()?.to_text();
    match args.output {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let network = args.source.load()?;
    let mut reports: Vec<CheckReport> = Vec::new();

    if network.width <= MAX_ZERO_ONE_WIDTH {
        reports.push(verify_zero_one(&network)?);
    } else {
        eprintln!(
            "skipping 0/1 check: width {} exceeds {MAX_ZERO_ONE_WIDTH}",
            network.width
        );
    }

    let space = FrameSpace {
        domain: args.domain,
        max_block: args.max_block,
        budget: args.budget,
        seed: args.seed,
    };
    let ce: &dyn BlockComparator<u32> = match args.comparator {
        ComparatorName::MergeSplit => &MergeSplit,
        ComparatorName::NaiveSwap => &NaiveSwap,
    };
    let blocks = check_frames(&network, ce, space)?;
    let block_failed = !blocks.passed();
    reports.push(blocks);

    if let Some(samples) = args.relations {
        reports.push(check_direct_relations(samples, args.seed));
    }

    for report in &reports {
        print!("{report}");
    }
    if block_failed {
        if let Some(w) = find_counterexample(&network, ce, space)? {
            println!("smallest witness: {w}");
        }
    }
    if let Some(path) = &args.csv {
        let mut csv = String::new();
        for report in &reports {
            csv.push_str(&format!("# {}\n", report.subject));
            csv.push_str(&report.to_csv());
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(reports.iter().all(CheckReport::passed))
}

fn key_format(explicit: Option<FormatName>, path: &Path) -> KeyFormat {
    match explicit {
        Some(FormatName::Bin) => KeyFormat::Binary,
        Some(FormatName::Txt) => KeyFormat::Text,
        None => KeyFormat::from_path(path),
    }
}

fn sort(args: SortArgs) -> Result<()> {
    match args.keys {
        KeyType::I64 => sort_keys::<i64>(&args),
        KeyType::F64 => sort_keys::<FiniteF64>(&args),
    }
}

fn sort_keys<K: FileKey>(args: &SortArgs) -> Result<()> {
    ensure!(args.workers > 0, "--workers must be at least 1");
    let options = RunOptions::from_env();

    let metrics = if args.distributed {
        let lanes = args.lanes.unwrap_or(args.inputs.len());
        ensure!(
            args.inputs.len() == lanes && args.output.len() == lanes,
            "--distributed needs one input and one output per lane ({lanes} lanes, {} inputs, {} outputs)",
            args.inputs.len(),
            args.output.len()
        );
        ensure!(lanes.is_power_of_two(), "lane count {lanes} is not a power of two");
        let network = args.network.build(lanes.trailing_zeros());
        let sources: Vec<Box<dyn LaneSource<K>>> = args
            .inputs
            .iter()
            .map(|p| Box::new(KeyFile::<K>::new(p, key_format(args.format, p))) as Box<dyn LaneSource<K>>)
            .collect();
        let run = run_distributed(&network, &MergeSplit, sources, args.inner, args.workers, &options)?;
        for (block, path) in run.lanes.into_iter().zip(&args.output) {
            write_keys(path, key_format(args.format, path), block.keys())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        run.metrics
    } else {
        ensure!(
            args.output.len() == 1,
            "expected a single output file without --distributed"
        );
        let mut keys: Vec<K> = Vec::new();
        for path in &args.inputs {
            keys.extend(
                read_keys::<K>(path, key_format(args.format, path))
                    .with_context(|| format!("reading {}", path.display()))?,
            );
        }
        let plan = HybridPlan {
            lanes: args.lanes.unwrap_or(4),
            inner: args.inner,
            network: args.network,
            workers: args.workers,
        };
        let run = hybrid_sort_timed(keys, &plan, &options)?;
        let path = &args.output[0];
        write_keys(path, key_format(args.format, path), &run.keys)
            .with_context(|| format!("writing {}", path.display()))?;
        run.metrics
    };

    if let Some(path) = &args.metrics_csv {
        fs::write(path, metrics.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        algorithms: if args.algorithms.is_empty() {
            defaults.algorithms
        } else {
            args.algorithms
        },
        sizes: args.sizes,
        lanes: args.lanes,
        workers: if args.workers.is_empty() {
            defaults.workers
        } else {
            args.workers
        },
        repetitions: args.reps,
        seed: args.seed,
        distributed: args.distributed,
        inner: args.inner,
    };
    if let Err(e) = config.validate() {
        bail!(e);
    }
    let report = run_bench(&config, |s| {
        eprintln!(
            "{:<15} n={:<9} lanes={:<3} workers={:<3} min={:>8.3} ms  speedup={:.2}",
            s.algorithm.name(),
            s.n,
            s.lanes,
            s.workers,
            s.min_ns as f64 / 1e6,
            s.speedup
        );
    })?;
    print!("{}", report.speedup_table());
    if let Some(path) = &args.csv {
        fs::write(path, report.records_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.summary_csv {
        fs::write(path, report.summary_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
