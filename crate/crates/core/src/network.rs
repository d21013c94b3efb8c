//! Comparator networks as plain data.
//!
//! A [`Network`] is a wire count plus an ordered list of [`Stage`]s. Each
//! stage holds comparators on pairwise-disjoint wires, so everything inside a
//! stage may run concurrently. The structure depends on the width alone,
//! never on the data flowing through it.
//!
//! Generators build Batcher's bitonic sorter and odd-even mergesort for
//! widths `2^l`. Networks round-trip through a small line-oriented text
//! format (see [`Network::to_text`]).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Orientation of a comparator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Minimum on the low wire, maximum on the high wire.
    Ascending,
    /// Maximum on the low wire, minimum on the high wire.
    Descending,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Ascending => Direction::Descending,
            Direction::Descending => Direction::Ascending,
        }
    }

    fn symbol(self) -> char {
        match self {
            Direction::Ascending => 'A',
            Direction::Descending => 'D',
        }
    }
}

/// A comparison element between wires `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparator {
    pub lo: usize,
    pub hi: usize,
    pub dir: Direction,
}

impl Comparator {
    pub fn new(lo: usize, hi: usize, dir: Direction) -> Self {
        Comparator { lo, hi, dir }
    }

    pub fn asc(lo: usize, hi: usize) -> Self {
        Comparator::new(lo, hi, Direction::Ascending)
    }

    pub fn desc(lo: usize, hi: usize) -> Self {
        Comparator::new(lo, hi, Direction::Descending)
    }

    /// The other wire of this comparator, if `wire` is one of its two.
    pub fn partner(&self, wire: usize) -> Option<usize> {
        if wire == self.lo {
            Some(self.hi)
        } else if wire == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.dir.symbol())
    }
}

/// Comparators that touch disjoint wires and can be applied in any order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Stage {
    pub comparators: Vec<Comparator>,
}

impl Stage {
    pub fn new(mut comparators: Vec<Comparator>) -> Self {
        comparators.sort();
        Stage { comparators }
    }

    pub fn len(&self) -> usize {
        self.comparators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comparators.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Network {
    pub width: usize,
    pub stages: Vec<Stage>,
}

/// First invariant violation found by [`Network::validate`].
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network has width 0")]
    ZeroWidth,
    #[error("stage {stage}: comparator {comparator} has lo >= hi")]
    Degenerate { stage: usize, comparator: Comparator },
    #[error("stage {stage}: comparator {comparator} exceeds width {width}")]
    WireOutOfRange {
        stage: usize,
        comparator: Comparator,
        width: usize,
    },
    #[error("stage {stage}: wire {wire} used by more than one comparator")]
    DuplicateWire { stage: usize, wire: usize },
}

impl Network {
    pub fn new(width: usize, stages: Vec<Stage>) -> Self {
        Network { width, stages }
    }

    /// A width-`width` network with no comparators.
    pub fn empty(width: usize) -> Self {
        Network::new(width, Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn comparator_count(&self) -> usize {
        self.stages.iter().map(Stage::len).sum()
    }

    pub fn comparators(&self) -> impl Iterator<Item = (usize, &Comparator)> {
        self.stages
            .iter()
            .enumerate()
            .flat_map(|(s, stage)| stage.comparators.iter().map(move |c| (s, c)))
    }

    /// Checks width, wire ranges, `lo < hi` and per-stage disjointness.
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.width == 0 {
            return Err(NetworkError::ZeroWidth);
        }
        let mut seen = vec![usize::MAX; self.width];
        for (s, stage) in self.stages.iter().enumerate() {
            for c in &stage.comparators {
                if c.lo >= c.hi {
                    return Err(NetworkError::Degenerate {
                        stage: s,
                        comparator: *c,
                    });
                }
                if c.hi >= self.width {
                    return Err(NetworkError::WireOutOfRange {
                        stage: s,
                        comparator: *c,
                        width: self.width,
                    });
                }
                for wire in [c.lo, c.hi] {
                    if seen[wire] == s {
                        return Err(NetworkError::DuplicateWire { stage: s, wire });
                    }
                    seen[wire] = s;
                }
            }
        }
        Ok(())
    }

    /// Serializes to the text format: a `width=<w> stages=<s>` header, then
    /// one line per stage of space-separated `lo:hi:A|D` triples.
    pub fn to_text(&self) -> String {
        let mut out = format!("width={} stages={}\n", self.width, self.stages.len());
        for stage in &self.stages {
            let line: Vec<String> = stage.comparators.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. Lines starting with `#` are comments. The
    /// result is not validated; call [`Network::validate`] separately.
    pub fn from_text(text: &str) -> Result<Self, ParseNetworkError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'));
        let (header_no, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or(ParseNetworkError::MissingHeader)?;
        let (width, count) = parse_header(header.trim()).ok_or_else(|| ParseNetworkError::BadHeader {
            line: header_no + 1,
            text: header.to_string(),
        })?;

        let mut stages = Vec::with_capacity(count);
        for (no, line) in lines {
            if stages.len() == count {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(ParseNetworkError::TrailingData { line: no + 1 });
            }
            let mut comparators = Vec::new();
            for token in line.split_whitespace() {
                comparators.push(parse_comparator(token).ok_or_else(|| ParseNetworkError::BadComparator {
                    line: no + 1,
                    token: token.to_string(),
                })?);
            }
            stages.push(Stage::new(comparators));
        }
        if stages.len() != count {
            return Err(ParseNetworkError::StageCount {
                declared: count,
                found: stages.len(),
            });
        }
        Ok(Network::new(width, stages))
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Network {
    type Err = ParseNetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Network::from_text(s)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseNetworkError {
    #[error("missing `width=<w> stages=<s>` header")]
    MissingHeader,
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: malformed comparator {token:?}, expected lo:hi:A|D")]
    BadComparator { line: usize, token: String },
    #[error("header declares {declared} stages, found {found}")]
    StageCount { declared: usize, found: usize },
    #[error("line {line}: data after the last declared stage")]
    TrailingData { line: usize },
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_whitespace();
    let width = parts.next()?.strip_prefix("width=")?.parse().ok()?;
    let stages = parts.next()?.strip_prefix("stages=")?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((width, stages))
}

fn parse_comparator(token: &str) -> Option<Comparator> {
    let mut parts = token.split(':');
    let lo = parts.next()?.parse().ok()?;
    let hi = parts.next()?.parse().ok()?;
    let dir = match parts.next()? {
        "A" => Direction::Ascending,
        "D" => Direction::Descending,
        _ => return None,
    };
    if parts.next().is_some() {
        return None;
    }
    Some(Comparator::new(lo, hi, dir))
}

/// Runs two stage lists side by side (they must touch disjoint wires).
fn zip_stages(a: Vec<Vec<Comparator>>, b: Vec<Vec<Comparator>>) -> Vec<Vec<Comparator>> {
    let depth = a.len().max(b.len());
    let mut a = a.into_iter();
    let mut b = b.into_iter();
    (0..depth)
        .map(|_| {
            let mut stage = a.next().unwrap_or_default();
            stage.extend(b.next().unwrap_or_default());
            stage
        })
        .collect()
}

fn finish(width: usize, stages: Vec<Vec<Comparator>>) -> Network {
    Network::new(width, stages.into_iter().map(Stage::new).collect())
}

/// Batcher's bitonic sorter on `2^order` wires, ascending overall.
///
/// A width-`p` sorter is two half-width sorters of opposite direction
/// (turning the input into a bitonic sequence) followed by a width-`p`
/// bitonic merger whose first stage compares wire `i` with `i + p/2`.
pub fn bitonic_network(order: u32) -> Network {
    let width = 1usize << order;
    finish(width, bitonic_sort(0, width, Direction::Ascending))
}

fn bitonic_sort(base: usize, p: usize, dir: Direction) -> Vec<Vec<Comparator>> {
    if p < 2 {
        return Vec::new();
    }
    let half = p / 2;
    let mut stages = zip_stages(
        bitonic_sort(base, half, Direction::Ascending),
        bitonic_sort(base + half, half, Direction::Descending),
    );
    stages.extend(bitonic_merge(base, p, dir));
    stages
}

fn bitonic_merge(base: usize, p: usize, dir: Direction) -> Vec<Vec<Comparator>> {
    if p < 2 {
        return Vec::new();
    }
    let half = p / 2;
    let split = (0..half)
        .map(|i| Comparator::new(base + i, base + i + half, dir))
        .collect();
    let mut stages = vec![split];
    stages.extend(zip_stages(
        bitonic_merge(base, half, dir),
        bitonic_merge(base + half, half, dir),
    ));
    stages
}

/// Batcher's odd-even mergesort on `2^order` wires.
///
/// Comparators are produced in the usual recursive order and then placed
/// into the earliest stage after every earlier comparator sharing a wire.
pub fn odd_even_merge_network(order: u32) -> Network {
    let width = 1usize << order;
    let mut sequence = Vec::new();
    odd_even_sort(0, width, &mut sequence);
    finish(width, schedule_asap(width, &sequence))
}

fn odd_even_sort(base: usize, n: usize, out: &mut Vec<Comparator>) {
    if n < 2 {
        return;
    }
    let half = n / 2;
    odd_even_sort(base, half, out);
    odd_even_sort(base + half, half, out);
    odd_even_merge(base, n, 1, out);
}

/// Merges the two sorted halves of `base..base+n`, looking at every
/// `stride`-th wire.
fn odd_even_merge(base: usize, n: usize, stride: usize, out: &mut Vec<Comparator>) {
    let step = stride * 2;
    if step < n {
        odd_even_merge(base, n, step, out);
        odd_even_merge(base + stride, n, step, out);
        let mut i = base + stride;
        while i + stride < base + n {
            out.push(Comparator::asc(i, i + stride));
            i += step;
        }
    } else {
        out.push(Comparator::asc(base, base + stride));
    }
}

fn schedule_asap(width: usize, sequence: &[Comparator]) -> Vec<Vec<Comparator>> {
    let mut ready = vec![0usize; width];
    let mut stages: Vec<Vec<Comparator>> = Vec::new();
    for c in sequence {
        let s = ready[c.lo].max(ready[c.hi]);
        if stages.len() <= s {
            stages.resize_with(s + 1, Vec::new);
        }
        stages[s].push(*c);
        ready[c.lo] = s + 1;
        ready[c.hi] = s + 1;
    }
    stages
}

/// The classic 4-input, 5-comparator network: two independent pairs, two
/// independent cross comparisons, then one comparator on the middle wires.
pub fn four_wire_network() -> Network {
    Network::new(
        4,
        vec![
            Stage::new(vec![Comparator::asc(0, 1), Comparator::asc(2, 3)]),
            Stage::new(vec![Comparator::asc(0, 2), Comparator::asc(1, 3)]),
            Stage::new(vec![Comparator::asc(1, 2)]),
        ],
    )
}

/// Round-robin distribution: element `i` goes to part `i % k`.
///
/// # Panics
///
/// If `k == 0`.
pub fn unshuffle<T>(k: usize, xs: impl IntoIterator<Item = T>) -> Vec<Vec<T>> {
    assert!(k >= 1, "unshuffle needs at least one part");
    let mut parts: Vec<Vec<T>> = (0..k).map(|_| Vec::new()).collect();
    for (i, x) in xs.into_iter().enumerate() {
        parts[i % k].push(x);
    }
    parts
}

/// Round-robin interleaving, the inverse of [`unshuffle`]. Ragged parts are
/// drained in turn until every part is exhausted.
pub fn shuffle<T>(parts: Vec<Vec<T>>) -> Vec<T> {
    let total = parts.iter().map(Vec::len).sum();
    let mut iters: Vec<_> = parts.into_iter().map(Vec::into_iter).collect();
    let mut out = Vec::with_capacity(total);
    while out.len() < total {
        for it in iters.iter_mut() {
            if let Some(x) = it.next() {
                out.push(x);
            }
        }
    }
    out
}
