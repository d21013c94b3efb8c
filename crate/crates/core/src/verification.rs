//! Empirical checks for networks and block comparison elements.
//!
//! * [`verify_zero_one`]: a network sorts every input iff it sorts every 0/1
//!   input, so `2^width` scalar runs certify it.
//! * [`verify_agglomeration`]: no zero-one style reduction is assumed for
//!   blocks, so block behaviour is checked directly over small key domains,
//!   exhaustively when the frame space fits the budget and with seeded
//!   random frames otherwise.
//! * [`find_counterexample`]: the same frame space searched smallest frame
//!   first, for exhibiting invalid comparison elements.
//! * [`check_direct_relations`]: the order relations a comparator is known to
//!   preserve, asserted on `merge_split` with constructed premises.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::comparators::{merge_split, precedes, Block, BlockComparator, MergeSplit, ScalarCompare};
use crate::executor::{run_sequential, BlockFrame, RunOptions};
use crate::network::{Direction, Network};
use crate::par;

/// Largest width [`verify_zero_one`] enumerates.
pub const MAX_ZERO_ONE_WIDTH: usize = 24;

/// Failures kept verbatim in a report; the rest are only counted.
const KEPT_FAILURES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Randomized { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub case_id: u64,
    pub input: String,
    pub output: String,
    pub clause: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub subject: String,
    pub cases_run: u64,
    pub coverage: Coverage,
    pub failure_count: u64,
    /// The first failures by case id, at most 64.
    pub failures: Vec<Failure>,
}

impl CheckReport {
    fn from_outcomes(subject: String, coverage: Coverage, outcomes: Vec<(u64, Vec<Failure>)>, cases_run: u64) -> Self {
        let mut failure_count = 0;
        let mut failures = Vec::new();
        for (count, mut kept) in outcomes {
            failure_count += count;
            if failures.len() < KEPT_FAILURES {
                kept.truncate(KEPT_FAILURES - failures.len());
                failures.append(&mut kept);
            }
        }
        CheckReport {
            subject,
            cases_run,
            coverage,
            failure_count,
            failures,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub const CSV_HEADER: &'static str = "case_id,verdict,clause,witness";

    /// One row per kept failure, then a summary row with case id `*`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for f in &self.failures {
            let _ = writeln!(out, "{},fail,{},\"{} -> {}\"", f.case_id, f.clause, f.input, f.output);
        }
        let verdict = if self.passed() { "pass" } else { "fail" };
        let _ = writeln!(
            out,
            "*,{verdict},,\"{} cases, {} failures\"",
            self.cases_run, self.failure_count
        );
        out
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let coverage = match self.coverage {
            Coverage::Exhaustive => "exhaustive".to_string(),
            Coverage::Randomized { seed } => format!("randomized, seed {seed}"),
        };
        writeln!(
            f,
            "{verdict} {}: {} cases ({coverage}), {} failures",
            self.subject, self.cases_run, self.failure_count
        )?;
        for fail in self.failures.iter().take(5) {
            writeln!(
                f,
                "  case {}: {} violated: {} -> {}",
                fail.case_id, fail.clause, fail.input, fail.output
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("width {width} is too large for exhaustive 0/1 verification (max {max})")]
    WidthTooLarge { width: usize, max: usize },
    #[error("invalid network: {0}")]
    InvalidNetwork(#[from] crate::network::NetworkError),
}

fn render<K: fmt::Display>(lanes: &[Block<K>]) -> String {
    let parts: Vec<String> = lanes.iter().map(|b| b.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Runs `cases` checks in parallel chunks and keeps the earliest failures.
fn run_cases(cases: u64, check: impl Fn(u64) -> Option<Failure> + Sync + Send) -> Vec<(u64, Vec<Failure>)> {
    const CHUNK: u64 = 1024;
    par::map_range(cases.div_ceil(CHUNK), |chunk| {
        let mut count = 0;
        let mut kept = Vec::new();
        for case in chunk * CHUNK..((chunk + 1) * CHUNK).min(cases) {
            if let Some(f) = check(case) {
                count += 1;
                if kept.len() < KEPT_FAILURES {
                    kept.push(f);
                }
            }
        }
        (count, kept)
    })
}

/// Runs the network with the scalar comparator on all `2^width` binary inputs.
pub fn verify_zero_one(network: &Network) -> Result<CheckReport, VerifyError> {
    network.validate()?;
    let width = network.width;
    if width > MAX_ZERO_ONE_WIDTH {
        return Err(VerifyError::WidthTooLarge {
            width,
            max: MAX_ZERO_ONE_WIDTH,
        });
    }
    let cases = 1u64 << width;
    let options = RunOptions {
        track_transfers: false,
        ..RunOptions::default()
    };
    let outcomes = run_cases(cases, |mask| {
        let input = BlockFrame::from_scalars((0..width).map(|bit| ((mask >> bit) & 1) as u8));
        let (output, _) = run_sequential(network, &ScalarCompare, input.clone(), &options).expect("validated network");
        (!output.is_ordered()).then(|| Failure {
            case_id: mask,
            input: render(input.lanes()),
            output: render(output.lanes()),
            clause: "sorted".into(),
        })
    });
    Ok(CheckReport::from_outcomes(
        format!("0/1 width {width}"),
        Coverage::Exhaustive,
        outcomes,
        cases,
    ))
}

/// The frame space of the block checks: lanes hold sorted blocks of
/// `0..=max_block` keys drawn from `0..domain`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameSpace {
    pub domain: u32,
    pub max_block: usize,
    /// Largest frame count enumerated exhaustively; beyond it, this many
    /// random frames are drawn instead.
    pub budget: u64,
    pub seed: u64,
}

impl FrameSpace {
    pub fn new(domain: u32, max_block: usize) -> Self {
        FrameSpace {
            domain,
            max_block,
            budget: 1 << 20,
            seed: 0,
        }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        FrameSpace { budget, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        FrameSpace { seed, ..self }
    }

    /// Every sorted block, shortest first, then lexicographic.
    pub fn blocks(&self) -> Vec<Block<u32>> {
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..self.max_block {
            let mut next = Vec::new();
            for block in &frontier {
                let from = block.last().copied().unwrap_or(0);
                for k in from..self.domain {
                    let mut b = block.clone();
                    b.push(k);
                    next.push(b);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.into_iter()
            .map(|b| Block::from_sorted(b).expect("built sorted"))
            .collect()
    }

    /// Number of frames for `width` lanes, or `None` on overflow.
    pub fn frame_count(&self, width: usize) -> Option<u64> {
        (self.blocks().len() as u64).checked_pow(width as u32)
    }

    fn random_frame(&self, width: usize, case: u64) -> Vec<Block<u32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(case);
        (0..width)
            .map(|_| {
                let len = rng.gen_range(0..=self.max_block);
                Block::from_unsorted((0..len).map(|_| rng.gen_range(0..self.domain.max(1))).collect())
            })
            .collect()
    }
}

fn nth_frame(blocks: &[Block<u32>], width: usize, mut index: u64) -> Vec<Block<u32>> {
    let radix = blocks.len() as u64;
    (0..width)
        .map(|_| {
            let b = blocks[(index % radix) as usize].clone();
            index /= radix;
            b
        })
        .collect()
}

/// What can go wrong with the output frame of a block network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameClause {
    /// (a) some adjacent pair of lanes is not ⪯-ordered.
    LaneOrder,
    /// (b) the concatenated output is not a permutation of the input.
    Permutation,
    /// (c) some output block is not internally sorted.
    UnsortedBlock,
}

impl fmt::Display for FrameClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClause::LaneOrder => "lane-order",
            FrameClause::Permutation => "permutation",
            FrameClause::UnsortedBlock => "unsorted-block",
        })
    }
}

pub fn check_output_frame<K: Ord + Clone>(input: &[Block<K>], output: &[Block<K>]) -> Option<FrameClause> {
    if output.windows(2).any(|w| !precedes(w[0].keys(), w[1].keys())) {
        return Some(FrameClause::LaneOrder);
    }
    let mut a: Vec<K> = input.iter().flat_map(|b| b.keys().iter().cloned()).collect();
    let mut b: Vec<K> = output.iter().flat_map(|b| b.keys().iter().cloned()).collect();
    a.sort();
    b.sort();
    if a != b {
        return Some(FrameClause::Permutation);
    }
    if output.iter().any(|b| !b.is_sorted()) {
        return Some(FrameClause::UnsortedBlock);
    }
    None
}

/// A frame on which a block network misbehaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub input: Vec<Block<u32>>,
    pub output: Vec<Block<u32>>,
    pub clause: FrameClause,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} ({} violated)",
            render(&self.input),
            render(&self.output),
            self.clause
        )
    }
}

fn run_frame<C: BlockComparator<u32> + ?Sized>(network: &Network, ce: &C, input: Vec<Block<u32>>) -> Witness {
    let options = RunOptions {
        track_transfers: false,
        ..RunOptions::default()
    };
    let (output, _) = run_sequential(network, ce, BlockFrame::new(input.clone()), &options).expect("validated network");
    let output = output.into_lanes();
    let clause = check_output_frame(&input, &output).unwrap_or(FrameClause::LaneOrder);
    Witness { input, output, clause }
}

fn check_frame<C: BlockComparator<u32> + ?Sized>(network: &Network, ce: &C, input: Vec<Block<u32>>) -> Option<Witness> {
    let w = run_frame(network, ce, input);
    check_output_frame(&w.input, &w.output).map(|_| w)
}

/// Runs `network` with `ce` over the frame space and checks every output.
pub fn check_frames<C: BlockComparator<u32> + ?Sized>(
    network: &Network,
    ce: &C,
    space: FrameSpace,
) -> Result<CheckReport, VerifyError> {
    network.validate()?;
    let width = network.width;
    let blocks = space.blocks();
    let exhaustive = space.frame_count(width).filter(|&n| n <= space.budget);
    let (cases, coverage) = match exhaustive {
        Some(n) => (n, Coverage::Exhaustive),
        None => (space.budget, Coverage::Randomized { seed: space.seed }),
    };
    let outcomes = run_cases(cases, |case| {
        let input = match exhaustive {
            Some(_) => nth_frame(&blocks, width, case),
            None => space.random_frame(width, case),
        };
        check_frame(network, ce, input).map(|w| Failure {
            case_id: case,
            input: render(&w.input),
            output: render(&w.output),
            clause: w.clause.to_string(),
        })
    });
    Ok(CheckReport::from_outcomes(
        format!(
            "{} on width {width}, keys 0..{}, blocks <= {}",
            ce.name(),
            space.domain,
            space.max_block
        ),
        coverage,
        outcomes,
        cases,
    ))
}

/// [`check_frames`] with `merge_split`.
pub fn verify_agglomeration(network: &Network, space: FrameSpace) -> Result<CheckReport, VerifyError> {
    check_frames(network, &MergeSplit, space)
}

/// Smallest frame (by total key count, then enumeration order) on which
/// `network` run with `ce` violates a frame clause.
pub fn find_counterexample<C: BlockComparator<u32> + ?Sized>(
    network: &Network,
    ce: &C,
    space: FrameSpace,
) -> Result<Option<Witness>, VerifyError> {
    network.validate()?;
    let width = network.width;
    match space.frame_count(width).filter(|&n| n <= space.budget) {
        Some(count) => {
            let blocks = space.blocks();
            let radix = blocks.len() as u64;
            let mut order: Vec<(usize, u64)> = (0..count)
                .map(|i| {
                    let mut rest = i;
                    let mut size = 0;
                    for _ in 0..width {
                        size += blocks[(rest % radix) as usize].len();
                        rest /= radix;
                    }
                    (size, i)
                })
                .collect();
            order.sort_unstable();
            Ok(par::find_map_first(&order, |&(_, i)| {
                check_frame(network, ce, nth_frame(&blocks, width, i))
            }))
        }
        None => {
            let hits = par::map_range(space.budget, |case| {
                let input = space.random_frame(width, case);
                let size: usize = input.iter().map(Block::len).sum();
                check_frame(network, ce, input).map(|w| (size, case, w))
            });
            Ok(hits
                .into_iter()
                .flatten()
                .min_by_key(|(size, case, _)| (*size, *case))
                .map(|(_, _, w)| w))
        }
    }
}

/// The order relations a comparator preserves, as block statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectRelation {
    /// `A1' ⪯ A2'`.
    Ordered = 1,
    /// `A_i ⪯ U  ⇒  A1' ⪯ U`.
    LowerBelowUpperBound = 2,
    /// `L ⪯ A_i  ⇒  L ⪯ A2'`.
    LowerBoundBelowUpper = 3,
    /// `L ⪯ A1 ∧ L ⪯ A2  ⇒  L ⪯ A1'`.
    CommonLowerBound = 4,
    /// `A1 ⪯ U ∧ A2 ⪯ U  ⇒  A2' ⪯ U`.
    CommonUpperBound = 5,
    /// `L ⪯ A_i ⪯ A_j ⪯ U  ⇒  L ⪯ A1' ∧ A2' ⪯ U`.
    Chain = 6,
}

impl DirectRelation {
    pub const ALL: [DirectRelation; 6] = [
        DirectRelation::Ordered,
        DirectRelation::LowerBelowUpperBound,
        DirectRelation::LowerBoundBelowUpper,
        DirectRelation::CommonLowerBound,
        DirectRelation::CommonUpperBound,
        DirectRelation::Chain,
    ];
}

/// Keys of sampled blocks live in `1..=9`; bounds may reach `0` and `10`.
const KEY_MIN: u32 = 1;
const KEY_MAX: u32 = 9;

fn random_block(rng: &mut ChaCha8Rng, lo: u32, hi: u32, max_len: usize) -> Block<u32> {
    let len = rng.gen_range(1..=max_len);
    Block::from_unsorted((0..len).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// One sampled configuration for `clause`: `(premise blocks, conclusion holds)`.
fn sample_clause(clause: DirectRelation, rng: &mut ChaCha8Rng) -> (String, bool) {
    let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..2usize);
    let (a1, a2) = if clause == DirectRelation::Chain {
        // A_i ⪯ A_j around a random split key.
        let split = rng.gen_range(KEY_MIN..=KEY_MAX);
        let low = random_block(rng, KEY_MIN, split, 6);
        let high = random_block(rng, split, KEY_MAX, 6);
        if pick(rng) == 0 {
            (low, high)
        } else {
            (high, low)
        }
    } else {
        (
            random_block(rng, KEY_MIN, KEY_MAX, 6),
            random_block(rng, KEY_MIN, KEY_MAX, 6),
        )
    };
    let (o1, o2) = merge_split(&a1, &a2, Direction::Ascending);
    let inputs = [&a1, &a2];
    let min_of = |b: &Block<u32>| *b.min().unwrap();
    let max_of = |b: &Block<u32>| *b.max().unwrap();

    let (bound, holds) = match clause {
        DirectRelation::Ordered => (None, precedes(o1.keys(), o2.keys())),
        DirectRelation::LowerBelowUpperBound => {
            let a = inputs[pick(rng)];
            let upper = random_block(rng, max_of(a), KEY_MAX + 1, 3);
            let holds = precedes(o1.keys(), upper.keys());
            (Some(upper), holds)
        }
        DirectRelation::LowerBoundBelowUpper => {
            let a = inputs[pick(rng)];
            let lower = random_block(rng, KEY_MIN - 1, min_of(a), 3);
            let holds = precedes(lower.keys(), o2.keys());
            (Some(lower), holds)
        }
        DirectRelation::CommonLowerBound => {
            let lower = random_block(rng, KEY_MIN - 1, min_of(&a1).min(min_of(&a2)), 3);
            let holds = precedes(lower.keys(), o1.keys());
            (Some(lower), holds)
        }
        DirectRelation::CommonUpperBound => {
            let upper = random_block(rng, max_of(&a1).max(max_of(&a2)), KEY_MAX + 1, 3);
            let holds = precedes(o2.keys(), upper.keys());
            (Some(upper), holds)
        }
        DirectRelation::Chain => {
            let (ai, aj) = if precedes(a1.keys(), a2.keys()) {
                (&a1, &a2)
            } else {
                (&a2, &a1)
            };
            let lower = random_block(rng, KEY_MIN - 1, min_of(ai), 3);
            let upper = random_block(rng, max_of(aj), KEY_MAX + 1, 3);
            let holds = precedes(lower.keys(), o1.keys()) && precedes(o2.keys(), upper.keys());
            (
                Some(Block::from_unsorted([lower.into_vec(), upper.into_vec()].concat())),
                holds,
            )
        }
    };
    let mut desc = format!("A1={a1} A2={a2} -> A1'={o1} A2'={o2}");
    if let Some(b) = bound {
        let _ = write!(desc, " bound={b}");
    }
    (desc, holds)
}

/// Samples `samples` configurations per clause whose premise holds by
/// construction and checks the conclusion on `merge_split`'s outputs.
pub fn check_direct_relations(samples: u64, seed: u64) -> CheckReport {
    let clauses = DirectRelation::ALL;
    let cases = samples * clauses.len() as u64;
    let outcomes = run_cases(cases, |case| {
        let clause = clauses[(case / samples.max(1)) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(case);
        let (desc, holds) = sample_clause(clause, &mut rng);
        (!holds).then(|| Failure {
            case_id: case,
            input: desc,
            output: String::new(),
            clause: format!("relation-{}", clause as u8),
        })
    });
    CheckReport::from_outcomes(
        "merge-split direct relations".into(),
        Coverage::Randomized { seed },
        outcomes,
        cases,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparators::NaiveSwap;
    use crate::network::{bitonic_network, four_wire_network, odd_even_merge_network, Stage};

    #[test]
    fn zero_one_passes_for_generators() {
        for l in 0..=4 {
            for n in [bitonic_network(l), odd_even_merge_network(l)] {
                let report = verify_zero_one(&n).unwrap();
                assert!(report.passed(), "{report}");
                assert_eq!(report.cases_run, 1 << n.width);
            }
        }
        let report = verify_zero_one(&four_wire_network()).unwrap();
        assert!(report.passed());
        assert_eq!(report.cases_run, 16);
    }

    #[test]
    fn zero_one_catches_missing_comparator() {
        let mut n = four_wire_network();
        n.stages.pop();
        let report = verify_zero_one(&n).unwrap();
        assert!(!report.passed());
        assert!(!report.failures.is_empty());
        // 0/1 inputs 0101 (wire order) -> after two stages wires 1 and 2 are out of order.
        let f = &report.failures[0];
        assert_eq!(f.clause, "sorted");
        assert!(report.to_csv().contains(",fail,sorted,"));
    }

    #[test]
    fn zero_one_width_limit() {
        let n = Network::new(25, vec![Stage::default()]);
        assert_eq!(
            verify_zero_one(&n),
            Err(VerifyError::WidthTooLarge {
                width: 25,
                max: MAX_ZERO_ONE_WIDTH
            })
        );
    }

    #[test]
    fn block_enumeration() {
        let blocks = FrameSpace::new(2, 2).blocks();
        let rendered: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
        assert_eq!(rendered, vec!["[]", "[0]", "[1]", "[0,0]", "[0,1]", "[1,1]"]);
        assert_eq!(FrameSpace::new(3, 2).blocks().len(), 10);
        assert_eq!(FrameSpace::new(4, 2).blocks().len(), 15);
        assert_eq!(FrameSpace::new(2, 2).frame_count(2), Some(36));
    }

    #[test]
    fn agglomeration_small_cases() {
        let report = verify_agglomeration(&bitonic_network(1), FrameSpace::new(2, 2)).unwrap();
        assert!(report.passed());
        assert_eq!(report.cases_run, 36);
        assert_eq!(report.coverage, Coverage::Exhaustive);

        let report = verify_agglomeration(&bitonic_network(2), FrameSpace::new(3, 2)).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.cases_run, 10_000);
    }

    #[test]
    fn agglomeration_falls_back_to_random_frames() {
        let space = FrameSpace::new(3, 3).with_budget(500).with_seed(9);
        let report = verify_agglomeration(&bitonic_network(3), space).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.coverage, Coverage::Randomized { seed: 9 });
        assert_eq!(report.cases_run, 500);
        assert_eq!(report, verify_agglomeration(&bitonic_network(3), space).unwrap());
    }

    #[test]
    fn naive_swap_has_a_small_witness() {
        let w = find_counterexample(&bitonic_network(2), &NaiveSwap, FrameSpace::new(4, 2))
            .unwrap()
            .expect("naive swap must fail");
        assert!(check_output_frame(&w.input, &w.output).is_some());
        // An empty block is never swapped, so two singletons around it stay unordered.
        let total: usize = w.input.iter().map(Block::len).sum();
        assert_eq!(total, 2, "{w}");
        assert_eq!(w.clause, FrameClause::LaneOrder);
        assert!(
            find_counterexample(&bitonic_network(2), &MergeSplit, FrameSpace::new(4, 2))
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn random_search_also_finds_witnesses() {
        let space = FrameSpace::new(4, 3).with_budget(2000);
        let w = find_counterexample(&bitonic_network(3), &NaiveSwap, space).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn singleton_frames_never_fail() {
        struct SingletonMergeSplit;
        impl BlockComparator<u32> for SingletonMergeSplit {
            fn name(&self) -> &str {
                "merge-split-singletons"
            }
            fn apply(&self, lo: &Block<u32>, hi: &Block<u32>, dir: Direction) -> (Block<u32>, Block<u32>) {
                merge_split(lo, hi, dir)
            }
        }
        for n in [bitonic_network(3), odd_even_merge_network(3), four_wire_network()] {
            let space = FrameSpace::new(2, 1);
            assert!(find_counterexample(&n, &SingletonMergeSplit, space).unwrap().is_none());
        }
    }

    #[test]
    fn relation_suite_passes() {
        let report = check_direct_relations(2000, 1);
        assert!(report.passed(), "{report}");
        assert_eq!(report.cases_run, 12_000);
    }

    #[test]
    fn relation_suite_catches_an_unbalanced_split() {
        // A ceil split that ignores the limits breaks relation 2 quickly.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut broken = 0;
        for _ in 0..2000 {
            let a1 = random_block(&mut rng, KEY_MIN, KEY_MAX, 6);
            let a2 = random_block(&mut rng, KEY_MIN, KEY_MAX, 6);
            let mut merged = crate::comparators::merge_sorted(a1.keys(), a2.keys());
            let upper = merged.split_off(merged.len().div_ceil(2));
            if !crate::comparators::is_valid_block_step(
                &a1,
                &a2,
                &Block::from_vec_unchecked(merged),
                &Block::from_vec_unchecked(upper),
            ) {
                broken += 1;
            }
        }
        assert!(broken > 0);
    }
}
