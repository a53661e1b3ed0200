//! Monte Carlo estimates for random sets hitting spread families.
//!
//! Trials are split into chunks of [`CHUNK`] trials. Chunk `c` draws from
//! `Prng::stream(seed, c)`, so counts depend only on `(seed, trials)` and not
//! on how chunks are scheduled across threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::face::Face;
use crate::family::SetFamily;
use crate::rational::{to_f64, Rational};
use crate::rng::Prng;
use crate::spreadness::is_rq_spread;

pub const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn new(trials: u64, successes: u64) -> Estimate {
        let estimate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let std_err = if trials == 0 {
            0.0
        } else {
            (estimate * (1.0 - estimate) / trials as f64).sqrt()
        };
        Estimate {
            trials,
            successes,
            estimate,
            std_err,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverOutcome {
    #[serde(flatten)]
    pub estimate: Estimate,
    pub seed: u64,
    /// Inclusion probability `m · delta`.
    pub p: f64,
    /// Largest member size.
    pub k: usize,
    /// `1 - (5 / log2(r delta))^m · k`, unclamped.
    pub bound: f64,
    /// `bound <= 0`.
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColoringOutcome {
    pub seed: u64,
    /// Both colour classes contain a member of their family.
    pub both: Estimate,
    pub first: Estimate,
    pub second: Estimate,
    /// Each side alone hits with estimated probability above 1/2.
    pub both_sides_above_half: bool,
}

/// Runs `trials` trials in chunks; `trial` returns a bitmask of events and
/// the result counts how often each of the first `events` bits was set.
fn run_trials<F>(seed: u64, trials: u64, events: usize, trial: F) -> Vec<u64>
where
    F: Fn(&mut Prng) -> u32 + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let mut streams = Vec::with_capacity(chunks as usize);
    let mut g = Prng::new(seed);
    for _ in 0..chunks {
        streams.push(g.clone());
        g.jump();
    }
    streams
        .into_par_iter()
        .enumerate()
        .map(|(c, mut rng)| {
            let start = c as u64 * CHUNK;
            let len = CHUNK.min(trials - start);
            let mut counts = vec![0u64; events];
            for _ in 0..len {
                let mask = trial(&mut rng);
                for (e, count) in counts.iter_mut().enumerate() {
                    *count += u64::from(mask >> e & 1);
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; events],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Members sorted by size, so small members are tried first.
fn by_size(fam: &SetFamily) -> Vec<Face> {
    let mut v = fam.members().to_vec();
    v.sort_by_key(|f| (f.len(), *f));
    v
}

fn hits(members: &[Face], w: Face) -> bool {
    members.iter().any(|f| f.is_subset(w))
}

/// Estimates the probability that an `(m · delta)`-random subset of the
/// ground set contains a member, next to the guaranteed lower bound.
pub fn spread_cover_probability(
    fam: &SetFamily,
    r: Rational,
    exponent_m: f64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<CoverOutcome> {
    if fam.is_empty() {
        return Err(Error::invalid("the family is empty"));
    }
    let p = exponent_m * delta;
    if !(exponent_m > 0.0 && delta > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!(
            "need m > 0, delta > 0 and m * delta <= 1, got m = {exponent_m}, delta = {delta}"
        )));
    }
    let rd = to_f64(r) * delta;
    if rd <= 1.0 {
        return Err(Error::invalid(format!("need r * delta > 1, got {rd}")));
    }
    let check = is_rq_spread(fam, r, 0);
    if let Some((_, x)) = check.witness {
        return Err(Error::invalid(format!(
            "the family is not {r}-spread: X = {x}"
        )));
    }
    let k = fam.max_member_size();
    let bound = 1.0 - (5.0 / rd.log2()).powf(exponent_m) * k as f64;
    let members = by_size(fam);
    let n = fam.ground_n();
    let counts = run_trials(seed, trials, 1, |rng| {
        let mut w = Face::EMPTY;
        for e in 1..=n {
            if rng.bernoulli(p) {
                w = w.with(e);
            }
        }
        u32::from(hits(&members, w))
    });
    Ok(CoverOutcome {
        estimate: Estimate::new(trials, counts[0]),
        seed,
        p,
        k,
        bound,
        vacuous: bound <= 0.0,
    })
}

/// Colours every element outside `excluded` with one of two colours
/// uniformly and checks whether colour one contains a member of `g1` and
/// colour two a member of `g2`.
pub fn two_coloring_experiment(
    g1: &SetFamily,
    g2: &SetFamily,
    excluded: Face,
    trials: u64,
    seed: u64,
) -> Result<ColoringOutcome> {
    for (name, g) in [("g1", g1), ("g2", g2)] {
        if let Some(f) = g.iter().find(|f| !f.is_disjoint(excluded)) {
            return Err(Error::invalid(format!(
                "{name} member {f} meets the excluded set"
            )));
        }
    }
    let n = g1.ground_n().max(g2.ground_n());
    let (m1, m2) = (by_size(g1), by_size(g2));
    let counts = run_trials(seed, trials, 3, |rng| {
        let mut u1 = Face::EMPTY;
        let mut u2 = Face::EMPTY;
        for e in 1..=n {
            if excluded.contains(e) {
                continue;
            }
            if rng.bernoulli(0.5) {
                u1 = u1.with(e);
            } else {
                u2 = u2.with(e);
            }
        }
        let a = hits(&m1, u1);
        let b = hits(&m2, u2);
        u32::from(a) | u32::from(b) << 1 | u32::from(a && b) << 2
    });
    let first = Estimate::new(trials, counts[0]);
    let second = Estimate::new(trials, counts[1]);
    Ok(ColoringOutcome {
        seed,
        both: Estimate::new(trials, counts[2]),
        first,
        second,
        both_sides_above_half: first.estimate > 0.5 && second.estimate > 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face(es: &[u32]) -> Face {
        Face::from_elements(es.iter().copied()).unwrap()
    }

    /// Exact probability that a `p`-random subset of `[n]` contains a member.
    fn exact_cover(fam: &SetFamily, p: f64) -> f64 {
        let n = fam.ground_n();
        assert!(n <= 20);
        (0u64..1 << n)
            .map(Face::from_bits)
            .filter(|&w| hits(fam.members(), w))
            .map(|w| p.powi(w.len() as i32) * (1.0 - p).powi((n as usize - w.len()) as i32))
            .sum()
    }

    /// Exact probabilities (first, second, both) over all colourings.
    fn exact_coloring(g1: &SetFamily, g2: &SetFamily, n: u32) -> (f64, f64, f64) {
        let total = (1u64 << n) as f64;
        let (mut a, mut b, mut c) = (0u64, 0u64, 0u64);
        for bits in 0u64..1 << n {
            let u1 = Face::from_bits(bits);
            let u2 = Face::prefix(n).difference(u1);
            let x = hits(g1.members(), u1);
            let y = hits(g2.members(), u2);
            a += u64::from(x);
            b += u64::from(y);
            c += u64::from(x && y);
        }
        (a as f64 / total, b as f64 / total, c as f64 / total)
    }

    fn within(e: &Estimate, truth: f64) -> bool {
        (e.estimate - truth).abs() <= 3.0 * e.std_err.max(1e-12)
    }

    #[test]
    fn empty_set_always_hits() {
        let fam = SetFamily::new(5, [Face::EMPTY]).unwrap();
        let o =
            spread_cover_probability(&fam, Rational::from_integer(4), 1.0, 0.5, 1000, 1).unwrap();
        assert_eq!(o.estimate.successes, 1000);
        assert_eq!(o.k, 0);
        assert_eq!(o.bound, 1.0);
    }

    #[test]
    fn all_pairs_of_thirty() {
        let fam = SetFamily::complete_layer(30, 2).unwrap();
        let o = spread_cover_probability(&fam, Rational::from_integer(15), 2.0, 0.25, 20_000, 7)
            .unwrap();
        assert!(o.vacuous);
        let expected = 1.0 - 0.5f64.powi(30) * 31.0;
        assert!((o.bound - (1.0 - 2.0 * (5.0 / 3.75f64.log2()).powi(2))).abs() < 1e-12);
        assert!(within(&o.estimate, expected) || o.estimate.successes == o.estimate.trials);
    }

    #[test]
    fn single_set_probability() {
        let fam = SetFamily::new(3, [face(&[1, 2, 3])]).unwrap();
        let o = spread_cover_probability(&fam, Rational::from_integer(1), 0.25, 2.0, 100_000, 11)
            .unwrap();
        assert_eq!(exact_cover(&fam, 0.5), 0.125);
        assert!(within(&o.estimate, 0.125));
    }

    #[test]
    fn certain_inclusion() {
        let fam = SetFamily::complete_layer(6, 3).unwrap();
        let o = spread_cover_probability(&fam, Rational::new(6, 5), 1.0, 1.0, 500, 3).unwrap();
        assert_eq!(o.estimate.estimate, 1.0);
    }

    #[test]
    fn matches_exact_probability() {
        let fam = SetFamily::complete_layer(8, 2).unwrap();
        let o =
            spread_cover_probability(&fam, Rational::from_integer(4), 1.0, 0.3, 50_000, 5).unwrap();
        assert!(within(&o.estimate, exact_cover(&fam, 0.3)));
    }

    #[test]
    fn rejects_bad_input() {
        let star = SetFamily::complete_layer(6, 2)
            .unwrap()
            .containing(face(&[1]));
        // The star's trace at {1} is everything, so it is not 2-spread.
        assert!(
            spread_cover_probability(&star, Rational::from_integer(2), 1.0, 0.6, 10, 1).is_err()
        );
        let fam = SetFamily::complete_layer(6, 1).unwrap();
        let r = Rational::from_integer(6);
        assert!(spread_cover_probability(&fam, r, 2.0, 0.6, 10, 1).is_err());
        assert!(spread_cover_probability(&fam, r, 1.0, 0.1, 10, 1).is_err());
        assert!(spread_cover_probability(&SetFamily::empty(3), r, 1.0, 0.5, 10, 1).is_err());
        let g = SetFamily::new(3, [face(&[1])]).unwrap();
        assert!(two_coloring_experiment(&g, &g, face(&[1]), 10, 1).is_err());
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let fam = SetFamily::complete_layer(10, 3).unwrap();
        let r = Rational::from_integer(2);
        let a = spread_cover_probability(&fam, r, 0.5, 0.8, 30_000, 99).unwrap();
        let b = spread_cover_probability(&fam, r, 0.5, 0.8, 30_000, 99).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| spread_cover_probability(&fam, r, 0.5, 0.8, 30_000, 99).unwrap());
        assert_eq!(a, c);
        let d = spread_cover_probability(&fam, r, 0.5, 0.8, 30_000, 100).unwrap();
        assert_ne!(a.estimate.successes, d.estimate.successes);
    }

    #[test]
    fn coloring_trivial_cases() {
        let e = SetFamily::new(4, [Face::EMPTY]).unwrap();
        let o = two_coloring_experiment(&e, &e, Face::EMPTY, 1000, 2).unwrap();
        assert_eq!(o.both.successes, 1000);
        assert!(o.both_sides_above_half);

        let g1 = SetFamily::new(2, [face(&[1])]).unwrap();
        let g2 = SetFamily::new(2, [face(&[2])]).unwrap();
        let o = two_coloring_experiment(&g1, &g2, Face::EMPTY, 100_000, 3).unwrap();
        assert!(within(&o.both, 0.25));
        assert!(within(&o.first, 0.5));
    }

    #[test]
    fn coloring_matches_exact_enumeration() {
        let g = SetFamily::complete_layer(10, 2).unwrap();
        let (a, b, c) = exact_coloring(&g, &g, 10);
        let o = two_coloring_experiment(&g, &g, Face::EMPTY, 100_000, 4).unwrap();
        assert!(within(&o.first, a));
        assert!(within(&o.second, b));
        assert!(within(&o.both, c));

        // Excluded elements are never coloured.
        let h = SetFamily::new(10, [face(&[1, 2]), face(&[3, 4]), face(&[5, 6])]).unwrap();
        let excluded = face(&[7, 8, 9, 10]);
        let o = two_coloring_experiment(&h, &h, excluded, 100_000, 5).unwrap();
        let (a, _, c) = exact_coloring(&h, &h, 6);
        assert!(within(&o.first, a));
        assert!(within(&o.both, c));
    }

    #[test]
    fn pairs_of_twenty() {
        let g = SetFamily::complete_layer(20, 2).unwrap();
        let o = two_coloring_experiment(&g, &g, Face::EMPTY, 20_000, 6).unwrap();
        // Fails only if one colour class has at most one element.
        let exact = 1.0 - 2.0 * 21.0 / (1u64 << 20) as f64;
        assert!(within(&o.both, exact) || o.both.successes == o.both.trials);
    }
}
