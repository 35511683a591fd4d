//! Small set types: subsets of `Z_p` as bitsets, and sorted coordinate sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::zp::PrimeModulus;

/// A subset of `Z_p` stored as a bitset of length `p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    p: PrimeModulus,
    words: Vec<u64>,
}

impl ResidueSet {
    pub fn empty(p: PrimeModulus) -> Self {
        ResidueSet { p, words: vec![0; p.as_usize().div_ceil(64)] }
    }

    pub fn full(p: PrimeModulus) -> Self {
        let mut s = Self::empty(p);
        for r in 0..p.get() {
            s.insert(r);
        }
        s
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(p: PrimeModulus, it: I) -> Self {
        let mut s = Self::empty(p);
        for r in it {
            s.insert(r % p.get());
        }
        s
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn insert(&mut self, r: u64) {
        debug_assert!(r < self.p.get());
        self.words[(r / 64) as usize] |= 1 << (r % 64);
    }

    #[inline]
    pub fn remove(&mut self, r: u64) {
        self.words[(r / 64) as usize] &= !(1 << (r % 64));
    }

    #[inline]
    pub fn contains(&self, r: u64) -> bool {
        r < self.p.get() && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.p.as_usize()
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        debug_assert_eq!(self.p, other.p);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// `A + B = {a + b}`.
    pub fn sumset(&self, other: &ResidueSet) -> ResidueSet {
        let p = self.p;
        let mut out = ResidueSet::empty(p);
        let rhs: Vec<u64> = other.to_vec();
        for a in self.iter() {
            for &b in &rhs {
                out.insert(p.add(a, b));
            }
        }
        out
    }

    /// The `m`-fold sumset `m . A`; `m = 0` gives `{0}`.
    pub fn iterated_sumset(&self, m: u32) -> ResidueSet {
        let mut acc = ResidueSet::from_iter(self.p, [0]);
        for _ in 0..m {
            acc = acc.sumset(self);
        }
        acc
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A set of coordinates in `[n]`, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|&i| !other.contains(i)).collect())
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| !other.contains(i))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// Maps positions within `self` (as produced by restricting to `self`)
    /// back to ambient coordinates.
    pub fn lift(&self, local: &IndexSet) -> IndexSet {
        IndexSet(local.iter().map(|j| self.0[j]).collect())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_set_basics() {
        let p = PrimeModulus::new(67).unwrap();
        let mut s = ResidueSet::empty(p);
        s.insert(0);
        s.insert(64);
        s.insert(66);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_vec(), vec![0, 64, 66]);
        assert!(s.contains(64) && !s.contains(65) && !s.contains(1000));
        s.remove(64);
        assert_eq!(s.to_vec(), vec![0, 66]);
        assert!(s.is_subset(&ResidueSet::full(p)));
        assert_eq!(ResidueSet::full(p).len(), 67);
    }

    #[test]
    fn sumsets() {
        let p = PrimeModulus::new(5).unwrap();
        let a = ResidueSet::from_iter(p, [0, 1]);
        assert_eq!(a.iterated_sumset(2).to_vec(), vec![0, 1, 2]);
        assert_eq!(a.iterated_sumset(4).len(), 5);
        assert_eq!(a.iterated_sumset(0).to_vec(), vec![0]);
    }

    #[test]
    fn index_set_ops() {
        let a = IndexSet::new(vec![5, 1, 3, 3]);
        let b = IndexSet::new(vec![3, 4]);
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        assert_eq!(a.difference(&b).as_slice(), &[1, 5]);
        assert_eq!(a.union(&b).as_slice(), &[1, 3, 4, 5]);
        assert!(!a.is_disjoint(&b));
        assert_eq!(a.lift(&IndexSet::new(vec![0, 2])).as_slice(), &[1, 5]);
    }
}
