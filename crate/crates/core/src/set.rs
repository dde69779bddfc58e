//! Subsets of a finite group as bit vectors.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Elem, Group};

/// A subset of a specific group. Two sets can only be combined when they
/// share the same `Arc<Group>`.
#[derive(Clone)]
pub struct GroupSet {
    group: Arc<Group>,
    words: Vec<u64>,
}

impl PartialEq for GroupSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.words == other.words
    }
}

impl Eq for GroupSet {}

impl std::hash::Hash for GroupSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl GroupSet {
    pub fn empty(group: &Arc<Group>) -> Self {
        GroupSet {
            group: group.clone(),
            words: vec![0; words_for(group.order())],
        }
    }

    pub fn full(group: &Arc<Group>) -> Self {
        let mut s = Self::empty(group);
        let n = group.order();
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            let bits = (n - lo).min(64);
            *w = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        }
        s
    }

    pub fn identity(group: &Arc<Group>) -> Self {
        Self::singleton(group, 0)
    }

    pub fn singleton(group: &Arc<Group>, x: Elem) -> Self {
        let mut s = Self::empty(group);
        s.insert(x);
        s
    }

    /// Builds a set from element indices, rejecting out-of-range values.
    pub fn from_indices<I>(group: &Arc<Group>, elems: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: TryInto<i64> + Copy,
    {
        let mut s = Self::empty(group);
        for e in elems {
            let v: i64 = e.try_into().map_err(|_| Error::OutOfRange {
                elem: i64::MAX,
                order: group.order(),
            })?;
            if v < 0 || v as usize >= group.order() {
                return Err(Error::OutOfRange {
                    elem: v,
                    order: group.order(),
                });
            }
            s.insert(v as Elem);
        }
        Ok(s)
    }

    pub fn from_predicate(group: &Arc<Group>, mut pred: impl FnMut(Elem) -> bool) -> Self {
        let mut s = Self::empty(group);
        for x in 0..group.order() as Elem {
            if pred(x) {
                s.insert(x);
            }
        }
        s
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn same_group(&self, other: &GroupSet) -> bool {
        Arc::ptr_eq(&self.group, &other.group)
    }

    pub fn check_same_group(&self, other: &GroupSet) -> Result<()> {
        if self.same_group(other) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        let x = x as usize;
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: Elem) {
        let x = x as usize;
        self.words[x >> 6] |= 1 << (x & 63);
    }

    #[inline]
    pub fn remove(&mut self, x: Elem) {
        let x = x as usize;
        self.words[x >> 6] &= !(1 << (x & 63));
    }

    pub fn toggle(&mut self, x: Elem) {
        let x = x as usize;
        self.words[x >> 6] ^= 1 << (x & 63);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.group.order()
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some((i * 64) as Elem + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &GroupSet, f: impl Fn(u64, u64) -> u64) -> GroupSet {
        assert!(self.same_group(other), "set operation across different groups");
        GroupSet {
            group: self.group.clone(),
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    // The boolean operations below panic on a group mismatch; the checked
    // product-set operations in `setops` report it as an error instead.

    pub fn union(&self, other: &GroupSet) -> GroupSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &GroupSet) -> GroupSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &GroupSet) -> GroupSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &GroupSet) -> GroupSet {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn complement(&self) -> GroupSet {
        GroupSet::full(&self.group).difference(self)
    }

    pub fn union_with(&mut self, other: &GroupSet) {
        assert!(self.same_group(other), "set operation across different groups");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection_len(&self, other: &GroupSet) -> usize {
        assert!(self.same_group(other), "set operation across different groups");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        assert!(self.same_group(other), "set operation across different groups");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &GroupSet) -> bool {
        self.intersection_len(other) == 0
    }

    /// Left translate `gX`.
    pub fn translate_left(&self, g: Elem) -> GroupSet {
        let row = self.group.row(g);
        let mut out = GroupSet::empty(&self.group);
        for x in self.iter() {
            out.insert(row[x as usize]);
        }
        out
    }

    /// Right translate `Xg`.
    pub fn translate_right(&self, g: Elem) -> GroupSet {
        let mut out = GroupSet::empty(&self.group);
        for x in self.iter() {
            out.insert(self.group.mul(x, g));
        }
        out
    }

    /// `|gX ∩ Y|` without materializing the translate.
    pub fn translate_overlap(&self, g: Elem, other: &GroupSet) -> usize {
        let row = self.group.row(g);
        self.iter().filter(|&x| other.contains(row[x as usize])).count()
    }

    /// Lowercase hex of the bit vector, least significant element first
    /// (element `i` is bit `i % 4` of hex digit `i / 4`).
    pub fn to_hex(&self) -> String {
        let n = self.group.order();
        let digits = n.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in 0..digits {
            let w = self.words[d / 16] >> ((d % 16) * 4) & 0xf;
            out.push(char::from_digit(w as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(group: &Arc<Group>, hex: &str) -> Result<GroupSet> {
        let n = group.order();
        if hex.len() != n.div_ceil(4) {
            return Err(Error::parse(0, format!("hex bit vector must have {} digits", n.div_ceil(4))));
        }
        let mut s = GroupSet::empty(group);
        for (d, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::parse(d, "invalid hex digit"))? as u64;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let x = d * 4 + b;
                    if x >= n {
                        return Err(Error::OutOfRange {
                            elem: x as i64,
                            order: n,
                        });
                    }
                    s.insert(x as Elem);
                }
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, BuildOptions, GroupSpec};

    fn z(n: usize) -> Arc<Group> {
        build_group(&GroupSpec::Cyclic(n), &BuildOptions::default()).unwrap()
    }

    #[test]
    fn basic_membership() {
        let g = z(130);
        let mut s = GroupSet::from_indices(&g, [0, 64, 129]).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(129));
        s.remove(64);
        assert_eq!(s.to_vec(), vec![0, 129]);
        assert_eq!(GroupSet::full(&g).len(), 130);
        assert!(GroupSet::from_indices(&g, [130]).is_err());
        assert!(GroupSet::from_indices(&g, [-1i64]).is_err());
    }

    #[test]
    fn hex_round_trip() {
        let g = z(10);
        let s = GroupSet::from_indices(&g, [0, 3, 4, 9]).unwrap();
        let h = s.to_hex();
        assert_eq!(h.len(), 3);
        assert_eq!(GroupSet::from_hex(&g, &h).unwrap(), s);
    }

    #[test]
    fn translates_in_cyclic_group() {
        let g = z(8);
        let s = GroupSet::from_indices(&g, [0, 1, 2]).unwrap();
        assert_eq!(s.translate_left(7).to_vec(), vec![0, 1, 7]);
        assert_eq!(s.translate_overlap(1, &s), 2);
    }

    #[test]
    #[should_panic]
    fn mixing_groups_panics() {
        let a = GroupSet::full(&z(4));
        let b = GroupSet::full(&z(4));
        let _ = a.union(&b);
    }
}
