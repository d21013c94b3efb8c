//! Sequential sorts used inside blocks before the network merges them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::comparators::merge_sorted;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InnerSorter {
    /// The standard library's stable sort.
    #[default]
    Std,
    /// Top-down mergesort with an insertion-sort cutoff.
    MergeSort,
    /// Quadratic; only for small inputs and tests.
    Insertion,
}

const INSERTION_CUTOFF: usize = 24;

impl InnerSorter {
    pub const ALL: [InnerSorter; 3] = [InnerSorter::Std, InnerSorter::MergeSort, InnerSorter::Insertion];

    pub fn name(self) -> &'static str {
        match self {
            InnerSorter::Std => "std",
            InnerSorter::MergeSort => "mergesort",
            InnerSorter::Insertion => "insertion",
        }
    }

    pub fn sort<K: Ord + Clone>(self, mut keys: Vec<K>) -> Vec<K> {
        match self {
            InnerSorter::Std => {
                keys.sort();
                keys
            }
            InnerSorter::MergeSort => mergesort(keys),
            InnerSorter::Insertion => {
                insertion_sort(&mut keys);
                keys
            }
        }
    }
}

impl fmt::Display for InnerSorter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("unknown inner sorter {0:?} (expected std, mergesort or insertion)")]
pub struct UnknownSorter(pub String);

impl FromStr for InnerSorter {
    type Err = UnknownSorter;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InnerSorter::ALL
            .into_iter()
            .find(|sorter| sorter.name() == s)
            .ok_or_else(|| UnknownSorter(s.to_string()))
    }
}

fn insertion_sort<K: Ord>(keys: &mut [K]) {
    for i in 1..keys.len() {
        let mut j = i;
        while j > 0 && keys[j] < keys[j - 1] {
            keys.swap(j, j - 1);
            j -= 1;
        }
    }
}

fn mergesort<K: Ord + Clone>(mut keys: Vec<K>) -> Vec<K> {
    if keys.len() <= INSERTION_CUTOFF {
        insertion_sort(&mut keys);
        return keys;
    }
    let right = keys.split_off(keys.len() / 2);
    let left = mergesort(keys);
    let right = mergesort(right);
    merge_sorted(&left, &right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_sorters_agree_with_std() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [0, 1, 2, 3, 23, 24, 25, 100, 1000] {
            let keys: Vec<i64> = (0..n).map(|_| rng.gen_range(-50..50)).collect();
            let mut expected = keys.clone();
            expected.sort();
            for sorter in InnerSorter::ALL {
                assert_eq!(sorter.sort(keys.clone()), expected, "{sorter} n={n}");
            }
        }
    }

    #[test]
    fn parse_names() {
        for sorter in InnerSorter::ALL {
            assert_eq!(sorter.name().parse::<InnerSorter>().unwrap(), sorter);
        }
        assert!("quick".parse::<InnerSorter>().is_err());
    }
}
