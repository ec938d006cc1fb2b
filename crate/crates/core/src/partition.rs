//! Partitions of a carrier and a plain union-find.

use std::collections::HashMap;
use std::hash::Hash;

use crate::algebra::Element;
use crate::error::{Error, Result};

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already together.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let mut least = vec![usize::MAX; n];
        let rep = (0..n)
            .map(|e| {
                let r = self.find(e);
                if least[r] == usize::MAX {
                    least[r] = e;
                }
                least[r]
            })
            .collect();
        Partition { rep }
    }
}

/// A partition stored as a representative array, normalised so that each
/// element points at the least element of its block. Equal partitions
/// have equal arrays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rep: Vec<Element>,
}

impl Partition {
    /// The diagonal: every block a singleton.
    pub fn discrete(n: usize) -> Self {
        Partition {
            rep: (0..n).collect(),
        }
    }

    /// One block holding everything.
    pub fn total(n: usize) -> Self {
        Partition { rep: vec![0; n] }
    }

    /// Blocks are the fibres of `key`.
    pub fn from_keys<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut first: HashMap<K, usize> = HashMap::new();
        let rep = keys
            .into_iter()
            .enumerate()
            .map(|(i, k)| *first.entry(k).or_insert(i))
            .collect();
        Partition { rep }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<Element>]) -> Result<Self> {
        let mut uf = UnionFind::new(n);
        let mut seen = vec![false; n];
        for block in blocks {
            for &e in block {
                if e >= n {
                    return Err(Error::Format(format!(
                        "block element {e} out of range 0..{n}"
                    )));
                }
                if seen[e] {
                    return Err(Error::Format(format!("element {e} appears in two blocks")));
                }
                seen[e] = true;
                uf.union(block[0], e);
            }
        }
        Ok(uf.into_partition())
    }

    /// Checks normalisation of a raw representative array.
    pub fn from_reps(rep: Vec<Element>) -> Result<Self> {
        for (e, &r) in rep.iter().enumerate() {
            if r > e || rep[r] != r {
                return Err(Error::Format(format!(
                    "representative array not normalised at {e}"
                )));
            }
        }
        Ok(Partition { rep })
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    #[inline]
    pub fn rep(&self, e: Element) -> Element {
        self.rep[e]
    }

    pub fn reps(&self) -> &[Element] {
        &self.rep
    }

    #[inline]
    pub fn related(&self, a: Element, b: Element) -> bool {
        self.rep[a] == self.rep[b]
    }

    pub fn num_blocks(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|(e, &r)| *e == r)
            .count()
    }

    /// Blocks in order of their least element, each sorted.
    pub fn blocks(&self) -> Vec<Vec<Element>> {
        let mut slot = vec![usize::MAX; self.rep.len()];
        let mut blocks: Vec<Vec<Element>> = Vec::new();
        for (e, &r) in self.rep.iter().enumerate() {
            if r == e {
                slot[e] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[r]].push(e);
        }
        blocks
    }

    pub fn is_discrete(&self) -> bool {
        self.rep.iter().enumerate().all(|(e, &r)| e == r)
    }

    pub fn is_total(&self) -> bool {
        self.rep.iter().all(|&r| r == 0)
    }

    /// `self` refines `other`.
    pub fn leq(&self, other: &Partition) -> bool {
        self.rep
            .iter()
            .enumerate()
            .all(|(e, &r)| other.rep[e] == other.rep[r])
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        Partition::from_keys(self.rep.iter().zip(&other.rep).map(|(a, b)| (*a, *b)))
    }

    /// Join as equivalence relations.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.rep.len());
        for e in 0..self.rep.len() {
            uf.union(e, self.rep[e]);
            uf.union(e, other.rep[e]);
        }
        uf.into_partition()
    }

    /// Least pair `(a, b)`, `a < b`, related here but not in `other`.
    pub fn first_pair_not_in(&self, other: &Partition) -> Option<(Element, Element)> {
        let n = self.rep.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.related(a, b) && !other.related(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalised_reps() {
        let p = Partition::from_blocks(5, &[vec![3, 1], vec![4, 0]]).unwrap();
        assert_eq!(p.reps(), &[0, 1, 2, 1, 0]);
        assert_eq!(p.blocks(), vec![vec![0, 4], vec![1, 3], vec![2]]);
        assert_eq!(p.num_blocks(), 3);
        assert!(Partition::from_blocks(2, &[vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn lattice_ops() {
        let a = Partition::from_blocks(4, &[vec![0, 1]]).unwrap();
        let b = Partition::from_blocks(4, &[vec![1, 2]]).unwrap();
        let j = a.join(&b);
        assert_eq!(j.blocks(), vec![vec![0, 1, 2], vec![3]]);
        assert!(a.leq(&j) && b.leq(&j));
        assert!(a.meet(&b).is_discrete());
        assert_eq!(j.first_pair_not_in(&a), Some((0, 2)));
        assert!(Partition::total(3).is_total());
    }

    #[test]
    fn from_reps_checks() {
        assert!(Partition::from_reps(vec![0, 0, 1]).is_err());
        assert!(Partition::from_reps(vec![0, 0, 2]).is_ok());
    }
}
