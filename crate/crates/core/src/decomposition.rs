//! Spread approximation by peeling dense traces, with the checks that go
//! with it and the parameter arithmetic for the stability bound.
//!
//! Each step picks an inclusion-maximal `S` with `|F(S)| >= r^{-|S|} |F|`,
//! stops if `|S| > q`, and otherwise removes `F[S]`. The maximal set is found
//! greedily: extend `S` by the element keeping the condition with the largest
//! trace (ties to the smaller element); when no single element works, look
//! for any qualifying strict superset and jump to the smallest one (largest
//! trace, then smallest encoding). A qualifying superset can exist even when
//! no one-element extension qualifies, so the second phase is what makes the
//! result maximal.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::complex::{best_star_in, t_subset_counts};
use crate::error::{Error, Result};
use crate::face::Face;
use crate::family::{SetFamily, TIntersection};
use crate::rational::{big_ratio_f64, meets_density, to_f64, Rational};
use crate::spreadness::{is_rq_spread, TraceCounts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    OversizeSet,
    Exhausted,
}

/// How each step's inclusion-maximal set is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    Greedy,
    /// Among all inclusion-maximal qualifying sets take the largest, then the
    /// one with the largest trace, then the smallest encoding. Exponential in
    /// member size.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    /// `|F^i|`.
    pub family_size: usize,
    pub set: Face,
    /// `|F^i(S_i)|`.
    pub trace_size: usize,
    /// `|F^i(S_i)| / |F^i|`.
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub r: Rational,
    pub q: usize,
    pub cover: Vec<Face>,
    pub pieces: Vec<SetFamily>,
    pub remainder: SetFamily,
    pub stop_reason: StopReason,
    pub last_set: Option<Face>,
    pub trace: Vec<Step>,
}

/// Members of `fam` containing `s`.
fn containing<'a>(fam: &'a [Face], s: Face) -> impl Iterator<Item = Face> + 'a {
    fam.iter().copied().filter(move |f| f.is_superset(s))
}

fn qualifies(count: usize, total: usize, r: Rational, size: usize) -> bool {
    count > 0 && meets_density(count as u64, total as u64, r, size as u32)
}

/// Qualifying strict supersets of `s` as `(set, trace)`.
fn qualifying_supersets(fam: &[Face], s: Face, r: Rational) -> Vec<(Face, usize)> {
    let mut counts: HashMap<Face, usize> = HashMap::new();
    for f in containing(fam, s) {
        for extra in f.difference(s).subsets() {
            if !extra.is_empty() {
                *counts.entry(s.union(extra)).or_insert(0) += 1;
            }
        }
    }
    let total = fam.len();
    counts
        .into_iter()
        .filter(|&(y, c)| qualifies(c, total, r, y.len()))
        .collect()
}

fn greedy_maximal(fam: &[Face], r: Rational) -> (Face, usize) {
    let total = fam.len();
    let mut s = Face::EMPTY;
    let mut trace = total;
    loop {
        let mut counts = [0usize; 65];
        for f in containing(fam, s) {
            for e in f.difference(s).elements() {
                counts[e as usize] += 1;
            }
        }
        let step = (1..=64u32)
            .filter(|&e| qualifies(counts[e as usize], total, r, s.len() + 1))
            .max_by(|&a, &b| counts[a as usize].cmp(&counts[b as usize]).then(b.cmp(&a)));
        if let Some(e) = step {
            s = s.with(e);
            trace = counts[e as usize];
            continue;
        }
        let jump = qualifying_supersets(fam, s, r).into_iter().min_by(|a, b| {
            a.0.len()
                .cmp(&b.0.len())
                .then(b.1.cmp(&a.1))
                .then(a.0.cmp(&b.0))
        });
        match jump {
            Some((y, c)) => {
                s = y;
                trace = c;
            }
            None => return (s, trace),
        }
    }
}

fn exhaustive_maximal(fam: &[Face], r: Rational) -> (Face, usize) {
    let counts = TraceCounts::new(fam);
    let total = fam.len();
    let qualifying: Vec<(Face, usize)> = counts
        .iter()
        .map(|(y, c)| (y, c as usize))
        .filter(|&(y, c)| qualifies(c, total, r, y.len()))
        .collect();
    let mut dominated: std::collections::HashSet<Face> = std::collections::HashSet::new();
    for &(y, _) in &qualifying {
        for sub in y.subsets() {
            if sub != y {
                dominated.insert(sub);
            }
        }
    }
    qualifying
        .into_iter()
        .filter(|(y, _)| !dominated.contains(y))
        .max_by(|a, b| {
            a.0.len()
                .cmp(&b.0.len())
                .then(a.1.cmp(&b.1))
                .then(b.0.cmp(&a.0))
        })
        .expect("the empty set always qualifies")
}

/// Peels `f` into dense pieces with small cover sets and a remainder.
pub fn spread_approximation(
    f: &SetFamily,
    ambient: &SetFamily,
    r: Rational,
    q: usize,
) -> Result<Decomposition> {
    spread_approximation_with(f, ambient, r, q, Selection::Greedy)
}

pub fn spread_approximation_with(
    f: &SetFamily,
    ambient: &SetFamily,
    r: Rational,
    q: usize,
    selection: Selection,
) -> Result<Decomposition> {
    if r < Rational::from_integer(1) {
        return Err(Error::invalid(format!("r = {r} must be at least 1")));
    }
    if !f.is_subfamily_of(ambient) {
        return Err(Error::invalid(
            "the family is not contained in the ambient family",
        ));
    }
    let n = f.ground_n();
    let mut current: Vec<Face> = f.members().to_vec();
    let mut d = Decomposition {
        r,
        q,
        cover: Vec::new(),
        pieces: Vec::new(),
        remainder: SetFamily::empty(n),
        stop_reason: StopReason::Exhausted,
        last_set: None,
        trace: Vec::new(),
    };
    while !current.is_empty() {
        let (s, trace) = match selection {
            Selection::Greedy => greedy_maximal(&current, r),
            Selection::Exhaustive => exhaustive_maximal(&current, r),
        };
        d.trace.push(Step {
            family_size: current.len(),
            set: s,
            trace_size: trace,
            density: trace as f64 / current.len() as f64,
        });
        if s.len() > q {
            d.stop_reason = StopReason::OversizeSet;
            d.last_set = Some(s);
            d.remainder = SetFamily::new(n, current)?;
            return Ok(d);
        }
        let (piece, rest): (Vec<Face>, Vec<Face>) =
            current.into_iter().partition(|m| m.is_superset(s));
        d.cover.push(s);
        d.pieces.push(SetFamily::new(n, piece)?);
        current = rest;
    }
    Ok(d)
}

/// Bound on the remainder with the quantities it was evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderCheck {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub r0: Rational,
    /// `max_T |A(T)|` over `t`-sets.
    pub star: usize,
    pub star_center: Face,
    pub remainder: usize,
    pub bound: f64,
    /// Decided exactly.
    pub holds: bool,
    /// The ambient family is `(r0, t)`-spread.
    pub ambient_spread: bool,
    /// `r <= r0`, `q + 1 >= t` and the ambient is `(r0, t)`-spread; the bound
    /// is guaranteed only then.
    pub preconditions: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    /// Pieces and remainder are disjoint and together give the family.
    pub partition: bool,
    /// Every member of a piece contains its cover set.
    pub containment: bool,
    /// Every cover set has at most `q` elements.
    pub cover_sizes: bool,
    /// Every peeled trace `F^i(S_i)` is `r`-spread.
    pub pieces_spread: bool,
    /// `(piece index, X)` for the first piece whose trace is not `r`-spread.
    pub spread_violation: Option<(usize, Face)>,
    /// Reported, not required: small parameters do not force it.
    pub cover_t_intersecting: TIntersection,
    pub remainder_bound: Option<RemainderCheck>,
}

impl Verification {
    /// The checks that follow from the procedure itself.
    pub fn procedure_ok(&self) -> bool {
        self.partition && self.containment && self.cover_sizes && self.pieces_spread
    }
}

/// Checks the postconditions of `d`. The remainder bound is evaluated when
/// `r0` is given.
pub fn verify_decomposition(
    d: &Decomposition,
    f: &SetFamily,
    ambient: &SetFamily,
    t: usize,
    r0: Option<Rational>,
) -> Result<Verification> {
    if !f.is_subfamily_of(ambient) {
        return Err(Error::invalid(
            "the family is not contained in the ambient family",
        ));
    }
    if d.pieces.len() != d.cover.len() {
        return Err(Error::invalid(
            "decomposition has mismatched cover and pieces",
        ));
    }
    let mut all: Vec<Face> = d.pieces.iter().flat_map(|p| p.iter().copied()).collect();
    all.extend(d.remainder.iter().copied());
    let count = all.len();
    all.sort_unstable();
    all.dedup();
    let partition = all.len() == count && all.as_slice() == f.members();

    let containment = d
        .pieces
        .iter()
        .zip(&d.cover)
        .all(|(p, &s)| p.iter().all(|m| m.is_superset(s)));
    let cover_sizes = d.cover.iter().all(|s| s.len() <= d.q);

    let spread_violation = d
        .pieces
        .iter()
        .zip(&d.cover)
        .enumerate()
        .find_map(|(i, (p, &s))| {
            let check = is_rq_spread(&p.trace(s), d.r, 0);
            check.witness.map(|(_, x)| (i, x))
        });

    let cover_family = SetFamily::new(f.ground_n(), d.cover.iter().copied())?;
    let cover_t_intersecting = cover_family.is_t_intersecting(t);

    let remainder_bound = match r0 {
        None => None,
        Some(r0) => {
            let star = best_star_in(ambient, t)?;
            let ambient_spread = is_rq_spread(ambient, r0, t).holds;
            let rem = d.remainder.len();
            Some(RemainderCheck {
                r0,
                star: star.size,
                star_center: star.center,
                remainder: rem,
                bound: remainder_bound(d.r, r0, d.q, t, star.size),
                holds: remainder_within_bound(rem, d.r, r0, d.q, t, star.size),
                ambient_spread,
                preconditions: ambient_spread && d.r <= r0 && d.q.saturating_add(1) >= t,
            })
        }
    };

    Ok(Verification {
        partition,
        containment,
        cover_sizes,
        pieces_spread: spread_violation.is_none(),
        spread_violation,
        cover_t_intersecting,
        remainder_bound,
    })
}

/// `r^(q+1) · r0^(t-q-1) · star` as an exact fraction.
fn remainder_bound_parts(
    r: Rational,
    r0: Rational,
    q: usize,
    t: usize,
    star: usize,
) -> (BigUint, BigUint) {
    let pow = |x: u64, e: usize| BigUint::from(x).pow(e as u32);
    let up = q + 1;
    let mut num = pow(*r.numer(), up) * BigUint::from(star as u64);
    let mut den = pow(*r.denom(), up);
    if t >= up {
        num *= pow(*r0.numer(), t - up);
        den *= pow(*r0.denom(), t - up);
    } else {
        num *= pow(*r0.denom(), up - t);
        den *= pow(*r0.numer(), up - t);
    }
    (num, den)
}

/// `r^(q+1) · r0^(t-q-1) · star`.
pub fn remainder_bound(r: Rational, r0: Rational, q: usize, t: usize, star: usize) -> f64 {
    let (num, den) = remainder_bound_parts(r, r0, q, t, star);
    big_ratio_f64(&num, &den)
}

/// `remainder <= r^(q+1) · r0^(t-q-1) · star`, exactly.
pub fn remainder_within_bound(
    remainder: usize,
    r: Rational,
    r0: Rational,
    q: usize,
    t: usize,
    star: usize,
) -> bool {
    let (num, den) = remainder_bound_parts(r, r0, q, t, star);
    BigUint::from(remainder as u64) * den <= num
}

/// `log2(x)` for an exact rational argument, with an exact value when `x` is
/// a power of two.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Log2 {
    Exact(u64),
    Approx(f64),
}

impl Log2 {
    fn of(num: u64, den: u64) -> Log2 {
        if den != 0 && num.is_multiple_of(den) && (num / den).is_power_of_two() {
            Log2::Exact((num / den).trailing_zeros() as u64)
        } else {
            Log2::Approx((num as f64 / den as f64).log2())
        }
    }

    fn value(self) -> f64 {
        match self {
            Log2::Exact(v) => v as f64,
            Log2::Approx(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterPlan {
    pub n: u64,
    pub k: u64,
    pub t: u64,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub r0: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub r: Rational,
    pub q: u64,
    /// `log2(n / k)`.
    pub log2_ratio: f64,
    /// The logarithms involved were exact integers, so every comparison
    /// below is exact.
    pub exact: bool,
    /// `n >= 2^13 k log2(2k)`.
    pub hyp_n_vs_klogk: bool,
    /// `n >= 2^19 t k log2^2(n/k)`.
    pub hyp_n_vs_tklog2: bool,
    /// `r >= 2q`.
    pub cond_r_ge_2q: bool,
    /// `r > 2^12 log2(2k)`.
    pub cond_r_gt_spreadgate: bool,
    /// `q >= t`.
    pub cond_q_ge_t: bool,
    /// `2^-19 n / (k log2(n/k))`, the exponent in the remainder estimate.
    pub remainder_exponent: f64,
    /// `2^-20 n / (k log2(n/k))`, the exponent in the stability bound.
    pub stability_exponent: f64,
}

/// Parameters `r0 = n/k`, `r = r0/2`, `q = floor(2^-18 n / (k log2(n/k)))`
/// and the hypotheses they must meet.
pub fn parameter_plan(n: u64, k: u64, t: u64) -> Result<ParameterPlan> {
    if !(n > k && k >= t && t >= 1) {
        return Err(Error::invalid(format!(
            "need n > k >= t >= 1, got n = {n}, k = {k}, t = {t}"
        )));
    }
    let r0 = Rational::new(n, k);
    let r = r0 / 2;
    let l = Log2::of(n, k);
    let l2k = Log2::of(2 * k, 1);
    let exact = matches!((l, l2k), (Log2::Exact(_), Log2::Exact(_)));
    let (n128, k128, t128) = (n as u128, k as u128, t as u128);

    let q = match l {
        Log2::Exact(lv) => (n128 / ((1u128 << 18) * k128 * lv as u128)) as u64,
        Log2::Approx(lv) => (n as f64 / ((1u64 << 18) as f64 * k as f64 * lv)).floor() as u64,
    };
    // n >= 2^13 k log2(2k), which is also r > 2^12 log2(2k) without equality.
    let (hyp_klogk, gate) = match l2k {
        Log2::Exact(lv) => {
            let rhs = (1u128 << 13) * k128 * lv as u128;
            (n128 >= rhs, n128 > rhs)
        }
        Log2::Approx(lv) => {
            let rhs = (1u64 << 13) as f64 * k as f64 * lv;
            (n as f64 >= rhs, n as f64 > rhs)
        }
    };
    let hyp_tklog2 = match l {
        Log2::Exact(lv) => {
            let lv = lv as u128;
            n128 >= (1u128 << 19) * t128 * k128 * lv * lv
        }
        Log2::Approx(lv) => n as f64 >= (1u64 << 19) as f64 * t as f64 * k as f64 * lv * lv,
    };
    // r = n / 2k >= 2q  <=>  n >= 4kq.
    let cond_r_ge_2q = n128 >= 4 * k128 * q as u128;
    let base = n as f64 / (k as f64 * l.value());
    Ok(ParameterPlan {
        n,
        k,
        t,
        r0,
        r,
        q,
        log2_ratio: l.value(),
        exact,
        hyp_n_vs_klogk: hyp_klogk,
        hyp_n_vs_tklog2: hyp_tklog2,
        cond_r_ge_2q,
        cond_r_gt_spreadgate: gate,
        cond_q_ge_t: q >= t,
        remainder_exponent: base / (1u64 << 19) as f64,
        stability_exponent: base / (1u64 << 20) as f64,
    })
}

/// `max(star - m · 2^e, 0.6 · star)` with `e = 2^-20 n / (k log2(n/k))`.
pub fn stability_bound(star: u64, m: u64, n: u64, k: u64) -> Result<f64> {
    if n <= k || k == 0 {
        return Err(Error::invalid(format!(
            "need n > k >= 1, got n = {n}, k = {k}"
        )));
    }
    let l = Log2::of(n, k).value();
    Ok(stability_bound_at(
        star,
        m,
        n as f64 / (k as f64 * l) / (1u64 << 20) as f64,
    ))
}

/// `max(star - m · 2^exponent, 0.6 · star)`.
pub fn stability_bound_at(star: u64, m: u64, exponent: f64) -> f64 {
    let first = if m == 0 {
        star as f64
    } else {
        star as f64 - m as f64 * exponent.exp2()
    };
    first.max(0.6 * star as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityDistance {
    /// `min_T |F \ C^(k)[T]|` over `t`-sets `T`.
    pub m: usize,
    /// A minimizing `T`, smallest encoding on ties.
    pub center: Face,
}

/// Distance of `f` from the nearest `t`-star of the layer it lives in.
pub fn stability_distance(layer: &SetFamily, f: &SetFamily, t: usize) -> Result<StabilityDistance> {
    if !f.is_subfamily_of(layer) {
        return Err(Error::invalid("the family is not contained in the layer"));
    }
    let star = best_star_in(f, t)?;
    Ok(StabilityDistance {
        m: f.len() - star.size,
        center: star.center,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverCheck {
    /// `|A[S]|`: ambient members containing some cover set.
    pub lhs: usize,
    /// `eps · max_T |A[T]|`.
    pub rhs: f64,
    pub star: usize,
    #[serde(rename = "T")]
    pub center: Face,
    /// Decided exactly.
    pub holds: bool,
}

/// Compares the sets generated by a non-trivial cover with the best star.
pub fn nontrivial_cover_check(
    ambient: &SetFamily,
    cover: &SetFamily,
    t: usize,
    eps: Rational,
) -> Result<CoverCheck> {
    if eps == Rational::from_integer(0) || eps > Rational::from_integer(1) {
        return Err(Error::invalid(format!("eps = {eps} must lie in (0, 1]")));
    }
    if cover.is_empty() {
        return Err(Error::invalid("the cover is empty"));
    }
    if let Some((a, b)) = cover.is_t_intersecting(t).witness {
        return Err(Error::invalid(format!(
            "the cover is not {t}-intersecting: {a} and {b}"
        )));
    }
    if cover.common_core()?.len() >= t {
        return Err(Error::invalid("the cover is trivial"));
    }
    let lhs = ambient.containing_any(cover.members()).len();
    let counts = t_subset_counts(ambient, t);
    let best = best_star_in(ambient, t)?;
    debug_assert_eq!(counts.get(&best.center).copied().unwrap_or(0), best.size);
    let holds = lhs as u128 * *eps.denom() as u128 <= *eps.numer() as u128 * best.size as u128;
    Ok(CoverCheck {
        lhs,
        rhs: to_f64(eps) * best.size as f64,
        star: best.size,
        center: best.center,
        holds,
    })
}
