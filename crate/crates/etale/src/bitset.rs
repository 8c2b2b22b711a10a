//! Compact index sets.
//!
//! Every structure in this crate identifies the points of a space (or the
//! germs of an etale space, or composable arrow pairs) by dense indices, so
//! subsets are kept as fixed-width bit sets. Two inline words cover every
//! space that fits in 128 points; fiber products occasionally need more and
//! spill to the heap.

use smallvec::SmallVec;

const BITS: usize = 64;

/// A subset of `0..capacity` stored as a bit mask.
///
/// All binary operations require both operands to share the same capacity;
/// sets belonging to different spaces must never be mixed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    nbits: u32,
    blocks: SmallVec<[u64; 2]>,
}

impl IndexSet {
    pub fn empty(capacity: usize) -> Self {
        let nblocks = capacity.div_ceil(BITS).max(1);
        IndexSet {
            nbits: capacity as u32,
            blocks: smallvec::smallvec![0; nblocks],
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn singleton(capacity: usize, i: usize) -> Self {
        let mut s = Self::empty(capacity);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(capacity: usize, iter: I) -> Self {
        let mut s = Self::empty(capacity);
        for i in iter {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.nbits as usize
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.nbits as usize);
        self.blocks[i / BITS] |= 1 << (i % BITS);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.nbits as usize);
        self.blocks[i / BITS] &= !(1 << (i % BITS));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.nbits as usize);
        self.blocks[i / BITS] >> (i % BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nbits, other.nbits);
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
        out
    }

    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nbits, other.nbits);
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nbits, other.nbits);
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits as usize).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn basic_ops() {
        let mut s = IndexSet::empty(70);
        s.insert(0);
        s.insert(65);
        assert!(s.contains(0) && s.contains(65) && !s.contains(1));
        assert_eq!(s.len(), 2);
        s.remove(0);
        assert_eq!(s.indices(), vec![65]);
        assert!(s.is_subset(&IndexSet::full(70)));
    }

    proptest! {
        // The bit set must agree with a BTreeSet model on all set algebra.
        #[test]
        fn agrees_with_model(a in prop::collection::btree_set(0usize..150, 0..40),
                             b in prop::collection::btree_set(0usize..150, 0..40)) {
            let cap = 150;
            let sa = IndexSet::from_indices(cap, a.iter().copied());
            let sb = IndexSet::from_indices(cap, b.iter().copied());
            let union: BTreeSet<_> = a.union(&b).copied().collect();
            let inter: BTreeSet<_> = a.intersection(&b).copied().collect();
            let diff: BTreeSet<_> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.union(&sb).indices(), union.into_iter().collect::<Vec<_>>());
            prop_assert_eq!(sa.intersect(&sb).indices(), inter.into_iter().collect::<Vec<_>>());
            prop_assert_eq!(sa.difference(&sb).indices(), diff.into_iter().collect::<Vec<_>>());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}
