//! Finite sets over the ground set `[N] = {1, ..., N}` with `N <= 64`.
//!
//! Element `e` is stored in bit `e - 1` of a single `u64`, so the canonical
//! order on faces is the order of their integer encodings. Widening to 128
//! elements would mean swapping the word for `u128` and raising [`MAX_GROUND`];
//! nothing else in the crate depends on the word width.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_GROUND: u32 = 64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Face(u64);

impl Face {
    pub const EMPTY: Face = Face(0);

    pub const fn from_bits(bits: u64) -> Face {
        Face(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a face from 1-based elements. Duplicates are ignored.
    pub fn from_elements<I>(elements: I) -> Result<Face>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut bits = 0u64;
        for e in elements {
            if e == 0 || e > MAX_GROUND {
                return Err(Error::invalid(format!(
                    "element {e} outside 1..={MAX_GROUND}"
                )));
            }
            bits |= 1u64 << (e - 1);
        }
        Ok(Face(bits))
    }

    /// `{1, ..., n}`.
    pub fn prefix(n: u32) -> Face {
        debug_assert!(n <= MAX_GROUND);
        if n >= 64 {
            Face(u64::MAX)
        } else {
            Face((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: u32) -> Face {
        debug_assert!((1..=MAX_GROUND).contains(&e));
        Face(1u64 << (e - 1))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: u32) -> bool {
        (1..=MAX_GROUND).contains(&e) && self.0 & (1u64 << (e - 1)) != 0
    }

    pub const fn is_subset(self, other: Face) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_superset(self, other: Face) -> bool {
        other.is_subset(self)
    }

    pub const fn is_disjoint(self, other: Face) -> bool {
        self.0 & other.0 == 0
    }

    pub const fn union(self, other: Face) -> Face {
        Face(self.0 | other.0)
    }

    pub const fn intersection(self, other: Face) -> Face {
        Face(self.0 & other.0)
    }

    pub const fn difference(self, other: Face) -> Face {
        Face(self.0 & !other.0)
    }

    pub const fn meet_size(self, other: Face) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    pub fn with(self, e: u32) -> Face {
        self.union(Face::singleton(e))
    }

    /// Largest element, or 0 for the empty face.
    pub fn max_element(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    /// Elements in ascending order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// Every subset of `self`, including `self` and the empty face, in
    /// descending order of encoding.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0),
        }
    }

    /// All subsets of `self` of exactly `size` elements, in ascending order.
    pub fn subsets_of_size(self, size: usize) -> SubsetsOfSize {
        let elements: Vec<u32> = self.elements().collect();
        let m = elements.len();
        let state = if size > m {
            None
        } else if size == 0 {
            Some(0)
        } else {
            Some(Face::prefix(size as u32).0)
        };
        SubsetsOfSize {
            elements,
            size,
            state,
        }
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

impl<'de> Deserialize<'de> for Face {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Face, D::Error> {
        let elements = Vec::<u32>::deserialize(deserializer)?;
        Face::from_elements(elements).map_err(serde::de::Error::custom)
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let low = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(low + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Face;

    fn next(&mut self) -> Option<Face> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            Some((current - 1) & self.mask)
        };
        Some(Face(current))
    }
}

/// Gosper's hack over the positions of the parent face's elements.
pub struct SubsetsOfSize {
    elements: Vec<u32>,
    size: usize,
    state: Option<u64>,
}

impl Iterator for SubsetsOfSize {
    type Item = Face;

    fn next(&mut self) -> Option<Face> {
        let pattern = self.state?;
        let m = self.elements.len();
        let mut bits = 0u64;
        let mut p = pattern;
        while p != 0 {
            let i = p.trailing_zeros() as usize;
            bits |= 1u64 << (self.elements[i] - 1);
            p &= p - 1;
        }
        self.state = if self.size == 0 {
            None
        } else {
            let c = pattern & pattern.wrapping_neg();
            let r = pattern.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let next = (((r ^ pattern) >> 2) / c) | r;
                if m < 64 && next >> m != 0 {
                    None
                } else {
                    Some(next)
                }
            }
        };
        Some(Face(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face(es: &[u32]) -> Face {
        Face::from_elements(es.iter().copied()).unwrap()
    }

    #[test]
    fn encoding_is_one_based() {
        assert_eq!(face(&[1]).bits(), 1);
        assert_eq!(face(&[1, 3]).bits(), 0b101);
        assert_eq!(face(&[64]).bits(), 1u64 << 63);
        assert_eq!(
            face(&[2, 5, 9]).elements().collect::<Vec<_>>(),
            vec![2, 5, 9]
        );
        assert_eq!(face(&[2, 5, 9]).max_element(), 9);
        assert_eq!(Face::EMPTY.max_element(), 0);
    }

    #[test]
    fn rejects_out_of_range_elements() {
        assert!(Face::from_elements([0]).is_err());
        assert!(Face::from_elements([65]).is_err());
    }

    #[test]
    fn display_lists_elements() {
        assert_eq!(face(&[3, 1, 2]).to_string(), "{1,2,3}");
        assert_eq!(Face::EMPTY.to_string(), "{}");
    }

    #[test]
    fn subsets_enumerate_power_set() {
        let f = face(&[2, 4, 7]);
        let subs: Vec<Face> = f.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(f)));
        assert_eq!(*subs.last().unwrap(), Face::EMPTY);
    }

    #[test]
    fn subsets_of_size_counts_are_binomial() {
        let f = Face::prefix(10);
        let binom = [1, 10, 45, 120, 210, 252, 210, 120, 45, 10, 1];
        for (k, &expected) in binom.iter().enumerate() {
            let subs: Vec<Face> = f.subsets_of_size(k).collect();
            assert_eq!(subs.len(), expected, "k={k}");
            assert!(subs.windows(2).all(|w| w[0] < w[1]));
            assert!(subs.iter().all(|s| s.len() == k && s.is_subset(f)));
        }
        assert_eq!(f.subsets_of_size(11).count(), 0);
    }

    #[test]
    fn subsets_of_size_on_full_word() {
        let full = Face::prefix(64);
        assert_eq!(full.subsets_of_size(64).count(), 1);
        assert_eq!(full.subsets_of_size(1).count(), 64);
        assert_eq!(full.subsets_of_size(63).count(), 64);
    }

    #[test]
    fn serde_uses_element_lists() {
        let f = face(&[1, 5]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[1,5]");
        let back: Face = serde_json::from_str("[5,1]").unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<Face>("[0]").is_err());
    }
}
