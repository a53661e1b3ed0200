//! Exact maximum `t`-intersecting subfamilies of a uniform family.
//!
//! Members are vertices of a compatibility graph with an edge whenever two
//! members share at least `t` elements. The search includes candidates in
//! canonical order (include before exclude), so the first family of the
//! optimal size it meets is the lexicographically smallest optimal one; that
//! family is the reported witness.
//!
//! Pruning uses a greedy colouring bound and shift stability. If the layer is
//! closed under replacing `j` by some `i < j`, shifting an optimal family
//! gives an optimal family that is lexicographically no larger, so the
//! smallest optimal family is stable under every such shift. For the
//! non-trivial variant a shift is allowed to break stability only while it
//! could still make the family trivial, which needs every member to meet
//! `{i, j}`. Exceeding the node budget is an error rather than a degraded
//! answer.

use serde::Serialize;

use crate::complex::{best_star_in, Complex};
use crate::error::{Error, Result};
use crate::face::Face;
use crate::family::SetFamily;

/// Node budget meaning "no limit".
pub const UNLIMITED: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremum {
    pub size: usize,
    pub witness: SetFamily,
    /// Search nodes expanded.
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalResult {
    pub k: usize,
    pub t: usize,
    pub rank: usize,
    pub layer_size: usize,
    pub max_size: usize,
    pub witness: SetFamily,
    /// The witness has a common core of at least `t` elements.
    pub trivial: bool,
    pub best_star_size: usize,
    #[serde(rename = "best_star_T")]
    pub best_star_center: Face,
    pub star_optimal: bool,
    /// `rank >= (t + 1)(k - t + 1)`.
    pub borg_threshold_met: bool,
    /// A star is beaten although the rank threshold holds.
    pub counterexample_candidate: bool,
    pub nodes: u64,
}

#[derive(Clone, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn empty(n: usize) -> Bitset {
        Bitset(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Bitset {
        let mut b = Bitset::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Bitset) -> Bitset {
        Bitset(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_count(&self, other: &Bitset) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn and_not_assign(&mut self, other: &Bitset) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }
}

/// A shift replacing element `j` by `i < j`, usable when the layer is closed
/// under it.
#[derive(Clone, Copy)]
struct Shift {
    i: u32,
    j: u32,
}

struct Search<'a> {
    members: &'a [Face],
    adj: Vec<Bitset>,
    t: usize,
    nontrivial: bool,
    budget: u64,
    nodes: u64,
    best: usize,
    best_clique: Vec<usize>,
    shifts: Vec<Shift>,
    /// For each member, `(shift index, index of the shifted member)`.
    images: Vec<Vec<(usize, usize)>>,
}

impl<'a> Search<'a> {
    fn new(members: &'a [Face], n: u32, t: usize, nontrivial: bool, budget: u64) -> Search<'a> {
        let m = members.len();
        let mut adj = vec![Bitset::empty(m); m];
        for i in 0..m {
            for j in i + 1..m {
                if members[i].meet_size(members[j]) >= t {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        let index = |f: Face| members.binary_search(&f).ok();
        let mut shifts = Vec::new();
        let mut images = vec![Vec::new(); m];
        for j in 2..=n {
            for i in 1..j {
                let mut found = Vec::new();
                let closed = members.iter().enumerate().all(|(a, &f)| {
                    if !f.contains(j) || f.contains(i) {
                        return true;
                    }
                    match index(f.difference(Face::singleton(j)).with(i)) {
                        Some(b) => {
                            found.push((a, b));
                            true
                        }
                        None => false,
                    }
                });
                if closed && !found.is_empty() {
                    let s = shifts.len();
                    shifts.push(Shift { i, j });
                    for (a, b) in found {
                        images[a].push((s, b));
                    }
                }
            }
        }
        Search {
            members,
            adj,
            t,
            nontrivial,
            budget,
            nodes: 0,
            best: 0,
            best_clique: Vec::new(),
            shifts,
            images,
        }
    }

    fn feasible(&self, clique: &[usize], core: Face) -> bool {
        !self.nontrivial || (!clique.is_empty() && core.len() < self.t)
    }

    /// Whether the final family could still become trivial under the shift,
    /// which is the only way it may fail to be stable under it. Its core has
    /// fewer than `t` elements, and shifting adds at most `i` to the core,
    /// and only when every member meets `{i, j}`.
    fn may_trivialize(&self, s: Shift, core: Face, covered: bool) -> bool {
        self.nontrivial && covered && core.difference(Face::singleton(s.j)).len() + 1 >= self.t
    }

    /// Greedy sequential colouring bound: the number of classes of pairwise
    /// incompatible members needed to cover `p`.
    fn color_bound(&self, p: &Bitset, stop: usize) -> usize {
        let mut uncolored = p.clone();
        let mut colors = 0;
        while !uncolored.is_empty() {
            colors += 1;
            if colors > stop {
                return colors;
            }
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                uncolored.remove(v);
                q.remove(v);
                q.and_not_assign(&self.adj[v]);
            }
        }
        colors
    }

    /// Drops candidates whose image under a locked shift can no longer join.
    fn prune_dead(&self, p: &mut Bitset, in_c: &Bitset, locked: &Bitset) {
        let candidates: Vec<usize> = p.iter().collect();
        for u in candidates {
            let dead = self.images[u]
                .iter()
                .any(|&(s, b)| locked.contains(s) && !in_c.contains(b) && !p.contains(b));
            if dead {
                p.remove(u);
            }
        }
    }

    /// Include-first search over candidates in canonical order. `covers`
    /// holds the shifts `{i, j}` met by every chosen member.
    #[allow(clippy::too_many_arguments)]
    fn search(
        &mut self,
        clique: &mut Vec<usize>,
        in_c: &mut Bitset,
        core: Face,
        locked: &Bitset,
        covers: &Bitset,
        mut p: Bitset,
    ) -> Result<()> {
        if clique.len() > self.best && self.feasible(clique, core) {
            self.best = clique.len();
            self.best_clique = clique.clone();
        }
        loop {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExhausted {
                    budget: self.budget,
                });
            }
            self.prune_dead(&mut p, in_c, locked);
            let Some(v) = p.first() else {
                return Ok(());
            };
            let room = self.best - clique.len().min(self.best);
            if p.count() <= room || self.color_bound(&p, room) <= room {
                return Ok(());
            }
            if self.nontrivial && !clique.is_empty() && core.len() >= self.t {
                // Some later member must shrink the core; the family then
                // lies in C, that member, and its compatible candidates.
                let reach = p
                    .iter()
                    .filter(|&b| !self.members[b].is_superset(core))
                    .map(|b| p.and_count(&self.adj[b]))
                    .max();
                match reach {
                    Some(r) if 1 + r > room => {}
                    _ => return Ok(()),
                }
            }

            let f = self.members[v];
            let new_core = if clique.is_empty() {
                f
            } else {
                core.intersection(f)
            };
            let mut new_locked = locked.clone();
            let mut new_covers = covers.clone();
            let mut newly = Vec::new();
            for s in 0..self.shifts.len() {
                if locked.contains(s) {
                    continue;
                }
                let sh = self.shifts[s];
                let covered = covers.contains(s) && (f.contains(sh.i) || f.contains(sh.j));
                if !covered {
                    new_covers.remove(s);
                }
                if !self.may_trivialize(sh, new_core, covered) {
                    new_locked.insert(s);
                    newly.push(s);
                }
            }
            clique.push(v);
            in_c.insert(v);
            let stable = newly.is_empty()
                || clique.iter().all(|&a| {
                    self.images[a]
                        .iter()
                        .all(|&(s, b)| !newly.contains(&s) || in_c.contains(b))
                });
            let res = if stable {
                let np = p.and(&self.adj[v]);
                self.search(clique, in_c, new_core, &new_locked, &new_covers, np)
            } else {
                Ok(())
            };
            clique.pop();
            in_c.remove(v);
            res?;
            p.remove(v);
        }
    }
}

fn check_uniform(layer: &SetFamily, t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    if layer.is_empty() {
        return Ok(());
    }
    let k = layer
        .uniform_size()
        .ok_or_else(|| Error::invalid("family is not uniform"))?;
    if t > k {
        return Err(Error::invalid(format!("t = {t} exceeds member size {k}")));
    }
    Ok(())
}

fn run(layer: &SetFamily, t: usize, nontrivial: bool, budget: u64) -> Result<Extremum> {
    check_uniform(layer, t)?;
    let members = layer.members();
    let m = members.len();
    let mut search = Search::new(members, layer.ground_n(), t, nontrivial, budget);
    // Families of the star's size are still searched so that the smallest
    // optimal witness is found, not just the star.
    let lower = if nontrivial {
        0
    } else {
        best_star_in(layer, t)?.size
    };
    search.best = lower.saturating_sub(1);
    let n_shifts = search.shifts.len();
    let mut locked = Bitset::empty(n_shifts);
    if !nontrivial {
        locked = Bitset::full(n_shifts);
    }
    let covers = Bitset::full(n_shifts);
    search.search(
        &mut Vec::new(),
        &mut Bitset::empty(m),
        Face::EMPTY,
        &locked,
        &covers,
        Bitset::full(m),
    )?;
    if search.best_clique.len() < lower {
        return Err(Error::Invariant("search missed the best star".into()));
    }
    Ok(Extremum {
        size: search.best_clique.len(),
        witness: SetFamily::new(
            layer.ground_n(),
            search.best_clique.iter().map(|&i| members[i]),
        )?,
        nodes: search.nodes,
    })
}

/// Largest `t`-intersecting subfamily of a uniform family.
pub fn max_t_intersecting(layer: &SetFamily, t: usize, budget: u64) -> Result<Extremum> {
    run(layer, t, false, budget)
}

/// Largest `t`-intersecting subfamily whose members share fewer than `t`
/// common elements. Size 0 when none exists.
pub fn max_nontrivial_t_intersecting(layer: &SetFamily, t: usize, budget: u64) -> Result<Extremum> {
    run(layer, t, true, budget)
}

/// Compares the exact maximum with the best star in layer `k`.
pub fn ekr_verdict(cx: &Complex, k: usize, t: usize, budget: u64) -> Result<ExtremalResult> {
    let rank = cx.rank();
    if t == 0 || t > k || k > rank {
        return Err(Error::invalid(format!(
            "need 1 <= t <= k <= rank, got t = {t}, k = {k}, rank = {rank}"
        )));
    }
    let layer = cx.layer(k);
    let star = best_star_in(&layer, t)?;
    let ext = max_t_intersecting(&layer, t, budget)?;
    let trivial = ext
        .witness
        .common_core()
        .map(|c| c.len() >= t)
        .unwrap_or(false);
    let star_optimal = ext.size == star.size;
    let borg_threshold_met = rank >= (t + 1) * (k - t + 1);
    Ok(ExtremalResult {
        k,
        t,
        rank,
        layer_size: layer.len(),
        max_size: ext.size,
        witness: ext.witness,
        trivial,
        best_star_size: star.size,
        best_star_center: star.center,
        star_optimal,
        borg_threshold_met,
        counterexample_candidate: !star_optimal && borg_threshold_met,
        nodes: ext.nodes,
    })
}
