//! Comparison elements for scalars and for sorted blocks.
//!
//! [`merge_split`] is the block comparison element: it merges two sorted
//! blocks and cuts the merged run into a lower and an upper block. Every
//! comparator network that sorts scalars sorts blocks when its comparators
//! are replaced by `merge_split`, provided the cut respects the limits
//! checked by [`check_block_step`]:
//!
//! * `lb = max(min A1, min A2)`: every key below `lb` must land in the lower output;
//! * `ub = min(max A1, max A2)`: every key above `ub` must land in the upper output;
//! * keys in `[lb, ub]` may go either way as long as lower ⪯ upper.
//!
//! An empty block carries no keys and behaves like a `+∞` sentinel: it sinks
//! to the upper output of an ascending comparator, and its minimum and maximum
//! are both taken as `+∞` when computing the limits.

use std::cmp::Ordering;
use std::fmt;
use std::num::ParseFloatError;
use std::str::FromStr;

use thiserror::Error;

use crate::network::Direction;

/// Anything with a total order that can move between threads.
pub trait Key: Ord + Clone + Send + Sync + fmt::Debug + 'static {}

impl<T: Ord + Clone + Send + Sync + fmt::Debug + 'static> Key for T {}

/// A finite `f64`. NaN and infinities are rejected on construction, which
/// makes the order total.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FiniteF64(f64);

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FloatKeyError {
    #[error("non-finite key {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Parse(#[from] ParseFloatError),
}

impl FiniteF64 {
    pub fn new(value: f64) -> Result<Self, FloatKeyError> {
        if value.is_finite() {
            Ok(FiniteF64(value))
        } else {
            Err(FloatKeyError::NonFinite(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Eq for FiniteF64 {}

impl Ord for FiniteF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("finite floats are totally ordered")
    }
}

impl PartialOrd for FiniteF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<f64> for FiniteF64 {
    type Error = FloatKeyError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        FiniteF64::new(value)
    }
}

impl FromStr for FiniteF64 {
    type Err = FloatKeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FiniteF64::new(s.parse::<f64>()?)
    }
}

impl fmt::Display for FiniteF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A run of keys in non-decreasing order occupying one wire.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Block<K>(Vec<K>);

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("keys are not in non-decreasing order at index {index}")]
pub struct NotSorted {
    pub index: usize,
}

impl<K: Ord> Block<K> {
    pub fn new() -> Self {
        Block(Vec::new())
    }

    pub fn singleton(key: K) -> Self {
        Block(vec![key])
    }

    pub fn from_sorted(keys: Vec<K>) -> Result<Self, NotSorted> {
        match keys.windows(2).position(|w| w[0] > w[1]) {
            Some(i) => Err(NotSorted { index: i + 1 }),
            None => Ok(Block(keys)),
        }
    }

    pub fn from_unsorted(mut keys: Vec<K>) -> Self {
        keys.sort();
        Block(keys)
    }

    /// Wraps `keys` without checking order. Only meant for constructing
    /// deliberately broken comparison elements in tests and verification.
    pub fn from_vec_unchecked(keys: Vec<K>) -> Self {
        Block(keys)
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn keys(&self) -> &[K] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<K> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<&K> {
        self.0.first()
    }

    pub fn max(&self) -> Option<&K> {
        self.0.last()
    }
}

impl<K> AsRef<[K]> for Block<K> {
    fn as_ref(&self) -> &[K] {
        &self.0
    }
}

impl<K: fmt::Display> fmt::Display for Block<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("]")
    }
}

/// The scalar comparison element.
pub fn scalar_compare<K: Ord>(a: K, b: K, dir: Direction) -> (K, K) {
    let (low, high) = if b < a { (b, a) } else { (a, b) };
    match dir {
        Direction::Ascending => (low, high),
        Direction::Descending => (high, low),
    }
}

/// `a ⪯ b`: every key of `a` is `<=` every key of `b`. Vacuously true when
/// either side is empty. Does not assume the slices are sorted.
pub fn precedes<K: Ord>(a: &[K], b: &[K]) -> bool {
    match (a.iter().max(), b.iter().min()) {
        (Some(x), Some(y)) => x <= y,
        _ => true,
    }
}

/// Limits of one block comparison step; `None` stands for `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockBounds<K> {
    pub lb: Option<K>,
    pub ub: Option<K>,
}

impl<K: Ord + Clone> BlockBounds<K> {
    /// Limits for two sorted blocks. Empty blocks count as `+∞`.
    pub fn of(a: &Block<K>, b: &Block<K>) -> Self {
        // Option<K> orders None first; map +∞ explicitly instead.
        fn max_inf<K: Ord + Clone>(x: Option<&K>, y: Option<&K>) -> Option<K> {
            match (x, y) {
                (Some(x), Some(y)) => Some(x.max(y).clone()),
                _ => None,
            }
        }
        fn min_inf<K: Ord + Clone>(x: Option<&K>, y: Option<&K>) -> Option<K> {
            match (x, y) {
                (Some(x), Some(y)) => Some(x.min(y).clone()),
                (Some(x), None) | (None, Some(x)) => Some(x.clone()),
                (None, None) => None,
            }
        }
        BlockBounds {
            lb: max_inf(a.min(), b.min()),
            ub: min_inf(a.max(), b.max()),
        }
    }

    fn below_lb(&self, k: &K) -> bool {
        self.lb.as_ref().is_none_or(|lb| k < lb)
    }

    fn above_ub(&self, k: &K) -> bool {
        self.ub.as_ref().is_some_and(|ub| k > ub)
    }
}

/// Linear two-way merge; on equal keys the element from `a` goes first.
pub fn merge_sorted<K: Clone + Ord>(a: &[K], b: &[K]) -> Vec<K> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if b[j] < a[i] {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push(a[i].clone());
            i += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// The block comparison element.
///
/// Merges both blocks and cuts the merged run so the lower output holds
/// `ceil(t/2)` keys, moved only as far as needed to keep every key below `lb`
/// in the lower output and every key above `ub` in the upper one. For
/// equal-size inputs the cut is always exactly in the middle, so block sizes
/// never grow. If either block is empty all keys go to the lower output.
///
/// Descending exchanges the two outputs.
pub fn merge_split<K: Clone + Ord>(a: &Block<K>, b: &Block<K>, dir: Direction) -> (Block<K>, Block<K>) {
    let mut merged = merge_sorted(&a.0, &b.0);
    let cut = if a.is_empty() || b.is_empty() {
        merged.len()
    } else {
        let bounds = BlockBounds::of(a, b);
        let must_low = merged.partition_point(|k| bounds.below_lb(k));
        let may_low = merged.partition_point(|k| !bounds.above_ub(k));
        merged.len().div_ceil(2).clamp(must_low, may_low)
    };
    let upper = merged.split_off(cut);
    let (low, high) = (Block(merged), Block(upper));
    match dir {
        Direction::Ascending => (low, high),
        Direction::Descending => (high, low),
    }
}

/// Which requirement of a valid block comparison step failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValidityClause {
    /// The outputs are not a permutation of the inputs.
    Conservation,
    /// Some key of the lower output exceeds some key of the upper output.
    Order,
    /// A key below `lb` ended up in the upper output.
    LowerSection,
    /// A key above `ub` ended up in the lower output.
    UpperSection,
}

impl fmt::Display for ValidityClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidityClause::Conservation => "conservation",
            ValidityClause::Order => "order",
            ValidityClause::LowerSection => "lower-section",
            ValidityClause::UpperSection => "upper-section",
        })
    }
}

/// Checks an ascending block step `(a1, a2) -> (out1, out2)` against the
/// validity limits. Outputs need not be sorted.
pub fn check_block_step<K: Clone + Ord>(
    a1: &Block<K>,
    a2: &Block<K>,
    out1: &Block<K>,
    out2: &Block<K>,
) -> Result<(), ValidityClause> {
    let inputs = merge_sorted(&a1.0, &a2.0);
    let mut outputs: Vec<K> = out1.0.iter().chain(&out2.0).cloned().collect();
    outputs.sort();
    if inputs != outputs {
        return Err(ValidityClause::Conservation);
    }
    if !precedes(&out1.0, &out2.0) {
        return Err(ValidityClause::Order);
    }
    // With conservation established, "every key < lb is in out1 with its full
    // multiplicity" is the same as "out2 holds no key < lb".
    let bounds = BlockBounds::of(a1, a2);
    if out2.0.iter().any(|k| bounds.below_lb(k)) {
        return Err(ValidityClause::LowerSection);
    }
    if out1.0.iter().any(|k| bounds.above_ub(k)) {
        return Err(ValidityClause::UpperSection);
    }
    Ok(())
}

pub fn is_valid_block_step<K: Clone + Ord>(a1: &Block<K>, a2: &Block<K>, out1: &Block<K>, out2: &Block<K>) -> bool {
    check_block_step(a1, a2, out1, out2).is_ok()
}

/// An invalid block comparison element: swaps whole blocks by their minima
/// and never moves keys between them.
pub fn naive_swap<K: Clone + Ord>(a: &Block<K>, b: &Block<K>, dir: Direction) -> (Block<K>, Block<K>) {
    let swap = matches!((a.min(), b.min()), (Some(x), Some(y)) if y < x);
    let (low, high) = if swap {
        (b.clone(), a.clone())
    } else {
        (a.clone(), b.clone())
    };
    match dir {
        Direction::Ascending => (low, high),
        Direction::Descending => (high, low),
    }
}

/// A comparison element that can be plugged into the executors.
pub trait BlockComparator<K>: Send + Sync {
    fn name(&self) -> &str;

    /// Maps the blocks on the comparator's low and high wire to new blocks.
    fn apply(&self, lo: &Block<K>, hi: &Block<K>, dir: Direction) -> (Block<K>, Block<K>);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MergeSplit;

impl<K: Key> BlockComparator<K> for MergeSplit {
    fn name(&self) -> &str {
        "merge-split"
    }

    fn apply(&self, lo: &Block<K>, hi: &Block<K>, dir: Direction) -> (Block<K>, Block<K>) {
        merge_split(lo, hi, dir)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveSwap;

impl<K: Key> BlockComparator<K> for NaiveSwap {
    fn name(&self) -> &str {
        "naive-swap"
    }

    fn apply(&self, lo: &Block<K>, hi: &Block<K>, dir: Direction) -> (Block<K>, Block<K>) {
        naive_swap(lo, hi, dir)
    }
}

/// The original scalar comparison element, lifted to singleton blocks.
///
/// # Panics
///
/// On blocks with more than one key.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarCompare;

impl<K: Key> BlockComparator<K> for ScalarCompare {
    fn name(&self) -> &str {
        "scalar"
    }

    fn apply(&self, lo: &Block<K>, hi: &Block<K>, dir: Direction) -> (Block<K>, Block<K>) {
        match (lo.keys(), hi.keys()) {
            ([a], [b]) => {
                let (x, y) = scalar_compare(a.clone(), b.clone(), dir);
                (Block(vec![x]), Block(vec![y]))
            }
            (a, b) if a.len() <= 1 && b.len() <= 1 => merge_split(lo, hi, dir),
            (a, b) => panic!(
                "scalar comparator applied to blocks of {} and {} keys",
                a.len(),
                b.len()
            ),
        }
    }
}
