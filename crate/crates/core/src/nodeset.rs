//! Small node sets as bitmasks.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// Largest node count representable by [`NodeSet`].
pub const MAX_NODES: usize = 32;

/// A set of node indices (0-based) below [`MAX_NODES`].
///
/// Ordered canonically: by cardinality, then lexicographically on the sorted
/// element list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeSet(u32);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_bits(bits: u32) -> Self {
        NodeSet(bits)
    }

    /// The set `{0, 1, ..., k-1}`.
    pub fn full(k: usize) -> Self {
        assert!(k <= MAX_NODES);
        if k == MAX_NODES {
            NodeSet(u32::MAX)
        } else {
            NodeSet((1u32 << k) - 1)
        }
    }

    /// The set `{lo, ..., hi-1}`.
    pub fn range(lo: usize, hi: usize) -> Self {
        if lo >= hi {
            return NodeSet::EMPTY;
        }
        NodeSet(NodeSet::full(hi).0 & !NodeSet::full(lo).0)
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_NODES);
        NodeSet(1 << i)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_NODES && self.0 & (1 << i) != 0
    }

    pub fn insert(self, i: usize) -> Self {
        NodeSet(self.0 | (1 << i))
    }

    pub fn remove(self, i: usize) -> Self {
        if i >= MAX_NODES {
            return self;
        }
        NodeSet(self.0 & !(1 << i))
    }

    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Elements in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self` (including empty and `self`), in canonical order.
    pub fn subsets(self) -> Vec<NodeSet> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = self.0;
        loop {
            out.push(NodeSet(sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & self.0;
        }
        out.sort();
        out
    }

    /// Elements as 1-based node numbers.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }
}

impl Ord for NodeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for NodeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(NodeSet::EMPTY, NodeSet::insert)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Serialized as a sorted list of 1-based node numbers.
impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.to_one_based())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_size_then_lexicographic() {
        let subs = NodeSet::full(3).subsets();
        let lists: Vec<Vec<usize>> = subs.iter().map(|s| s.iter().collect()).collect();
        assert_eq!(
            lists,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn range_and_membership() {
        let s = NodeSet::range(1, 4);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(NodeSet::range(3, 3).is_empty());
        assert!(s.contains(2) && !s.contains(0));
        assert_eq!(s.remove(2).len(), 2);
        assert_eq!(NodeSet::full(MAX_NODES).len(), MAX_NODES);
        assert_eq!(s.to_one_based(), vec![2, 3, 4]);
    }
}
