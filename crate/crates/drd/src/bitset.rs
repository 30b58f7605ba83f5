//! Fixed-universe bit sets.
//!
//! Version spaces, region memberships, and signature intersections are all
//! subsets of a small fixed universe (hypotheses or regions), so a flat block
//! vector beats pointer-based sets everywhere in the solver. The type is also
//! the key of the decision-tree cache, hence `Eq + Hash`.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    universe: usize,
    blocks: Vec<u64>,
}

impl BitSet {
    pub fn empty(universe: usize) -> Self {
        BitSet {
            universe,
            blocks: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for (i, block) in s.blocks.iter_mut().enumerate() {
            let remaining = universe - i * 64;
            *block = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.blocks[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Lowest set index, if any.
    pub fn first(&self) -> Option<usize> {
        for (i, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some(i * 64 + b.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    /// Keep only indices satisfying the predicate.
    pub fn retain(&mut self, mut keep: impl FnMut(usize) -> bool) {
        let indices: Vec<usize> = self.iter().collect();
        for i in indices {
            if !keep(i) {
                self.remove(i);
            }
        }
    }

    /// Ascending iterator over set indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let base = bi * 64;
            std::iter::successors(
                if block == 0 { None } else { Some(block) },
                |&w| {
                    let w2 = w & (w - 1);
                    if w2 == 0 {
                        None
                    } else {
                        Some(w2)
                    }
                },
            )
            .map(move |w| base + w.trailing_zeros() as usize)
        })
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for BitSet {
    /// Collect indices into a set sized to the maximum element + 1. Mostly a
    /// test convenience; solver code sizes the universe explicitly.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let indices: Vec<usize> = iter.into_iter().collect();
        let universe = indices.iter().map(|&i| i + 1).max().unwrap_or(0);
        let mut s = BitSet::empty(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }
}
