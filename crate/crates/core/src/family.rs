//! Deduplicated set families and the derived families built from them.
//!
//! For a family `A`, faces `B, X, Y` with `X ⊆ Y`, and a family `S`:
//!
//! | method               | family                              |
//! |----------------------|-------------------------------------|
//! | [`SetFamily::avoiding`]       | `{F ∈ A : F ∩ B = ∅}`      |
//! | [`SetFamily::trace`]          | `{F \ B : F ∈ A, B ⊆ F}`   |
//! | [`SetFamily::containing`]     | `{F ∈ A : B ⊆ F}`          |
//! | [`SetFamily::containing_any`] | `⋃_{B ∈ S} A[B]`           |
//! | [`SetFamily::section`]        | `{F \ X : F ∈ A, F ∩ Y = X}` |
//!
//! Removing elements never renumbers the ground set, so faces of a derived
//! family stay comparable with faces of the family it came from.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::face::{Face, MAX_GROUND};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct SetFamily {
    ground_n: u32,
    members: Vec<Face>,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    ground_n: u32,
    members: Vec<Face>,
}

impl TryFrom<RawFamily> for SetFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        SetFamily::new(raw.ground_n, raw.members)
    }
}

impl From<SetFamily> for RawFamily {
    fn from(fam: SetFamily) -> Self {
        RawFamily {
            ground_n: fam.ground_n,
            members: fam.members,
        }
    }
}

/// Selector for [`SetFamily::derived`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derived {
    Trace(Face),
    Avoid(Face),
    Superset(Face),
    SupersetUnion(Vec<Face>),
    Section { x: Face, y: Face },
}

/// Outcome of a t-intersection test. `witness` is a violating pair (possibly
/// the same member twice) when `holds` is false.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TIntersection {
    pub holds: bool,
    pub witness: Option<(Face, Face)>,
}

impl SetFamily {
    /// Sorts and deduplicates `members`. Fails if a member has an element
    /// above `ground_n`.
    pub fn new<I>(ground_n: u32, members: I) -> Result<SetFamily>
    where
        I: IntoIterator<Item = Face>,
    {
        if ground_n > MAX_GROUND {
            return Err(Error::invalid(format!(
                "ground set size {ground_n} exceeds {MAX_GROUND}"
            )));
        }
        let ground = Face::prefix(ground_n);
        let mut members: Vec<Face> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|f| !f.is_subset(ground)) {
            return Err(Error::invalid(format!(
                "member {bad} is not contained in [{ground_n}]"
            )));
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { ground_n, members })
    }

    /// Caller guarantees members are sorted, unique and inside the ground set.
    pub(crate) fn from_sorted(ground_n: u32, members: Vec<Face>) -> SetFamily {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|f| f.is_subset(Face::prefix(ground_n))));
        SetFamily { ground_n, members }
    }

    pub fn empty(ground_n: u32) -> SetFamily {
        SetFamily::new(ground_n, []).expect("ground size checked by caller")
    }

    /// All `k`-subsets of `[n]`.
    pub fn complete_layer(n: u32, k: usize) -> Result<SetFamily> {
        if n > MAX_GROUND {
            return Err(Error::invalid(format!("n = {n} exceeds {MAX_GROUND}")));
        }
        Ok(SetFamily::from_sorted(
            n,
            Face::prefix(n).subsets_of_size(k).collect(),
        ))
    }

    pub fn ground_n(&self) -> u32 {
        self.ground_n
    }

    pub fn members(&self) -> &[Face] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Face> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Face> {
        self.members.iter()
    }

    pub fn contains(&self, face: Face) -> bool {
        self.members.binary_search(&face).is_ok()
    }

    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(|f| f.len()).max().unwrap_or(0)
    }

    /// The common member size, or `None` for an empty or mixed family.
    pub fn uniform_size(&self) -> Option<usize> {
        let first = self.members.first()?.len();
        self.members
            .iter()
            .all(|f| f.len() == first)
            .then_some(first)
    }

    /// Union of all members.
    pub fn support(&self) -> Face {
        self.members
            .iter()
            .fold(Face::EMPTY, |acc, &f| acc.union(f))
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|&f| other.contains(f))
    }

    /// Members of `self` that are not in `other`.
    pub fn difference(&self, other: &SetFamily) -> SetFamily {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&f| !other.contains(f))
            .collect();
        SetFamily::from_sorted(self.ground_n, members)
    }

    fn check_face(&self, face: Face) -> Result<()> {
        if face.is_subset(Face::prefix(self.ground_n)) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{face} is not contained in [{}]",
                self.ground_n
            )))
        }
    }

    pub fn derived(&self, kind: &Derived) -> Result<SetFamily> {
        match kind {
            Derived::Trace(b) => {
                self.check_face(*b)?;
                Ok(self.trace(*b))
            }
            Derived::Avoid(b) => {
                self.check_face(*b)?;
                Ok(self.avoiding(*b))
            }
            Derived::Superset(b) => {
                self.check_face(*b)?;
                Ok(self.containing(*b))
            }
            Derived::SupersetUnion(cover) => {
                for &b in cover {
                    self.check_face(b)?;
                }
                Ok(self.containing_any(cover))
            }
            Derived::Section { x, y } => {
                self.check_face(*y)?;
                self.section(*x, *y)
            }
        }
    }

    /// `A(B)`: members containing `b`, with `b` removed.
    pub fn trace(&self, b: Face) -> SetFamily {
        let mut members: Vec<Face> = self
            .members
            .iter()
            .filter(|f| f.is_superset(b))
            .map(|f| f.difference(b))
            .collect();
        members.sort_unstable();
        SetFamily::from_sorted(self.ground_n, members)
    }

    /// `A(B̄)`: members disjoint from `b`.
    pub fn avoiding(&self, b: Face) -> SetFamily {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|f| f.is_disjoint(b))
            .collect();
        SetFamily::from_sorted(self.ground_n, members)
    }

    /// `A[B]`: members containing `b`.
    pub fn containing(&self, b: Face) -> SetFamily {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|f| f.is_superset(b))
            .collect();
        SetFamily::from_sorted(self.ground_n, members)
    }

    /// `A[S]`: members containing at least one face of `cover`.
    pub fn containing_any(&self, cover: &[Face]) -> SetFamily {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|f| cover.iter().any(|&b| f.is_superset(b)))
            .collect();
        SetFamily::from_sorted(self.ground_n, members)
    }

    /// `A(X, Y)`: members whose intersection with `y` is exactly `x`, with
    /// `x` removed. Requires `x ⊆ y`; `x = y` is allowed.
    pub fn section(&self, x: Face, y: Face) -> Result<SetFamily> {
        if !x.is_subset(y) {
            return Err(Error::invalid(format!(
                "section requires X ⊆ Y, got X = {x}, Y = {y}"
            )));
        }
        let mut members: Vec<Face> = self
            .members
            .iter()
            .filter(|f| f.intersection(y) == x)
            .map(|f| f.difference(x))
            .collect();
        members.sort_unstable();
        Ok(SetFamily::from_sorted(self.ground_n, members))
    }

    /// Every pair of members, a member with itself included, shares at least
    /// `t` elements. A member smaller than `t` therefore fails on its own.
    pub fn is_t_intersecting(&self, t: usize) -> TIntersection {
        for (i, &a) in self.members.iter().enumerate() {
            for &b in &self.members[i..] {
                if a.meet_size(b) < t {
                    return TIntersection {
                        holds: false,
                        witness: Some((a, b)),
                    };
                }
            }
        }
        TIntersection {
            holds: true,
            witness: None,
        }
    }

    /// Intersection of all members.
    pub fn common_core(&self) -> Result<Face> {
        let mut it = self.members.iter().copied();
        let first = it
            .next()
            .ok_or_else(|| Error::invalid("common core of an empty family"))?;
        Ok(it.fold(first, Face::intersection))
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily[{}]", self.ground_n)?;
        f.debug_list().entries(self.members.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a Face;
    type IntoIter = std::slice::Iter<'a, Face>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
