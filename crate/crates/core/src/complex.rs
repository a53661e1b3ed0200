//! Simplicial complexes stored as their facet antichain.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::face::Face;
use crate::family::SetFamily;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Complex {
    facets: SetFamily,
}

/// A `t`-set maximizing the star size in some layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BestStar {
    pub center: Face,
    pub size: usize,
}

impl Complex {
    /// Keeps the inclusion-maximal candidates.
    pub fn from_facets(candidates: SetFamily) -> Result<Complex> {
        if candidates.is_empty() {
            return Err(Error::invalid("a complex needs at least one facet"));
        }
        let n = candidates.ground_n();
        let members = candidates.members();
        // Sorting by size descending lets each candidate be tested only
        // against already-kept (larger or equal) faces.
        let mut by_size: Vec<Face> = members.to_vec();
        by_size.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let mut kept: Vec<Face> = Vec::new();
        for f in by_size {
            if !kept.iter().any(|&g| f.is_subset(g)) {
                kept.push(f);
            }
        }
        Ok(Complex {
            facets: SetFamily::new(n, kept)?,
        })
    }

    /// The full simplex on `[n]`.
    pub fn simplex(n: u32) -> Result<Complex> {
        Complex::from_facets(SetFamily::new(n, [Face::prefix(n)])?)
    }

    pub fn ground_n(&self) -> u32 {
        self.facets.ground_n()
    }

    pub fn facets(&self) -> &SetFamily {
        &self.facets
    }

    /// Smallest facet size: the largest `n` for which the complex has rank `>= n`.
    pub fn rank(&self) -> usize {
        self.facets.iter().map(|f| f.len()).min().unwrap_or(0)
    }

    pub fn dimension_bound(&self) -> usize {
        self.facets.max_member_size()
    }

    pub fn contains(&self, face: Face) -> bool {
        self.facets.iter().any(|&f| face.is_subset(f))
    }

    /// `C^(k)`: all `k`-faces of the complex, in canonical order.
    pub fn layer(&self, k: usize) -> SetFamily {
        let mut members: Vec<Face> = self
            .facets
            .iter()
            .flat_map(|f| f.subsets_of_size(k))
            .collect();
        members.sort_unstable();
        members.dedup();
        SetFamily::from_sorted(self.ground_n(), members)
    }

    /// `|C^(k)(T)|`, the number of `k`-faces containing `center`.
    pub fn star_size(&self, k: usize, center: Face) -> Result<usize> {
        if center.len() > k {
            return Err(Error::invalid(format!(
                "|T| = {} exceeds k = {k}",
                center.len()
            )));
        }
        let rest = k - center.len();
        let mut members: Vec<Face> = self
            .facets
            .iter()
            .filter(|f| f.is_superset(center))
            .flat_map(|f| f.difference(center).subsets_of_size(rest))
            .collect();
        members.sort_unstable();
        members.dedup();
        Ok(members.len())
    }

    /// A `t`-set with the largest star in layer `k`, ties broken by the
    /// smallest encoding.
    pub fn best_star(&self, k: usize, t: usize) -> Result<BestStar> {
        if t > k {
            return Err(Error::invalid(format!("t = {t} exceeds k = {k}")));
        }
        best_star_in(&self.layer(k), t)
    }
}

/// Largest `|A[T]|` over `t`-subsets `T` of the ground set, ties by smallest
/// encoding. `t`-sets outside every member score 0.
pub fn best_star_in(fam: &SetFamily, t: usize) -> Result<BestStar> {
    let n = fam.ground_n();
    if t > n as usize {
        return Err(Error::invalid(format!("no {t}-subset of [{n}] exists")));
    }
    let counts = t_subset_counts(fam, t);
    let best = counts
        .iter()
        .map(|(&center, &size)| BestStar { center, size })
        .max_by(|a, b| a.size.cmp(&b.size).then(b.center.cmp(&a.center)));
    Ok(match best {
        Some(b) => b,
        None => BestStar {
            center: Face::prefix(t as u32),
            size: 0,
        },
    })
}

/// `|A[T]|` for every `t`-set `T` lying inside at least one member.
pub fn t_subset_counts(fam: &SetFamily, t: usize) -> HashMap<Face, usize> {
    let mut counts: HashMap<Face, usize> = HashMap::new();
    for f in fam {
        for s in f.subsets_of_size(t) {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    counts
}
