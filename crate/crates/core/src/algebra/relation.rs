use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Sub};

use serde::{Deserialize, Serialize};

/// Maximum number of basic relations a calculus may declare.
pub const MAX_BASICS: usize = 32;

/// A disjunction of basic relations, stored as one bit per basic relation.
///
/// Bit `k` is set when basic relation `k` is part of the disjunction. The
/// empty relation is a legal value and signals an inconsistent constraint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Relation(u32);

impl Relation {
    pub const EMPTY: Relation = Relation(0);

    pub const fn from_bits(bits: u32) -> Self {
        Relation(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// The relation holding every one of the first `p` basic relations.
    pub const fn all(p: usize) -> Self {
        if p >= 32 {
            Relation(u32::MAX)
        } else {
            Relation((1u32 << p) - 1)
        }
    }

    pub const fn singleton(id: usize) -> Self {
        Relation(1u32 << id)
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        ids.into_iter().fold(Relation::EMPTY, |r, id| r.with(id))
    }

    pub const fn contains(self, id: usize) -> bool {
        id < 32 && self.0 & (1u32 << id) != 0
    }

    pub const fn with(self, id: usize) -> Self {
        Relation(self.0 | (1u32 << id))
    }

    pub const fn without(self, id: usize) -> Self {
        Relation(self.0 & !(1u32 << id))
    }

    pub fn insert(&mut self, id: usize) {
        self.0 |= 1u32 << id;
    }

    pub fn remove(&mut self, id: usize) {
        self.0 &= !(1u32 << id);
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_singleton(self) -> bool {
        self.0 != 0 && self.0 & (self.0 - 1) == 0
    }

    /// The only member of a singleton relation.
    pub fn single(self) -> Option<usize> {
        self.is_singleton()
            .then(|| self.0.trailing_zeros() as usize)
    }

    /// Lowest member, if any.
    pub fn first(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub const fn intersect(self, other: Relation) -> Relation {
        Relation(self.0 & other.0)
    }

    pub const fn union(self, other: Relation) -> Relation {
        Relation(self.0 | other.0)
    }

    pub const fn difference(self, other: Relation) -> Relation {
        Relation(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Relation) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing id order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }
}

/// Iterator over the basic-relation ids of a [`Relation`].
#[derive(Clone)]
pub struct Members(u32);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let id = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(id)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

impl IntoIterator for Relation {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

impl FromIterator<usize> for Relation {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Relation::from_ids(iter)
    }
}

impl BitAnd for Relation {
    type Output = Relation;
    fn bitand(self, rhs: Relation) -> Relation {
        self.intersect(rhs)
    }
}

impl BitAndAssign for Relation {
    fn bitand_assign(&mut self, rhs: Relation) {
        self.0 &= rhs.0;
    }
}

impl BitOr for Relation {
    type Output = Relation;
    fn bitor(self, rhs: Relation) -> Relation {
        self.union(rhs)
    }
}

impl BitOrAssign for Relation {
    fn bitor_assign(&mut self, rhs: Relation) {
        self.0 |= rhs.0;
    }
}

impl Sub for Relation {
    type Output = Relation;
    fn sub(self, rhs: Relation) -> Relation {
        self.difference(rhs)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let pm = Relation::from_ids([1, 7]);
        let mo = Relation::from_ids([7, 5]);
        assert_eq!(pm & mo, Relation::singleton(7));
        assert_eq!(pm | mo, Relation::from_ids([1, 5, 7]));
        assert_eq!(pm - mo, Relation::singleton(1));
        assert!((pm & Relation::singleton(2)).is_empty());
    }

    #[test]
    fn singleton_queries() {
        assert_eq!(Relation::singleton(4).single(), Some(4));
        assert_eq!(Relation::from_ids([1, 2]).single(), None);
        assert_eq!(Relation::EMPTY.single(), None);
        assert!(!Relation::EMPTY.is_singleton());
        assert_eq!(Relation::all(13).len(), 13);
        assert_eq!(Relation::all(32).len(), 32);
    }

    #[test]
    fn members_are_ordered() {
        let r = Relation::from_ids([9, 0, 3]);
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![0, 3, 9]);
        assert_eq!(r.iter().len(), 3);
    }
}
