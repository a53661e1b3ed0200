//! Exact rationals and power comparisons.

use std::cmp::Ordering;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Non-negative rational used for spreadness parameters such as `r`, `r0`, `eps`.
pub type Rational = Ratio<u64>;

/// Compares `a · b^e` with `c · d^f` exactly.
pub fn cmp_scaled_powers(a: u64, b: u64, e: u32, c: u64, d: u64, f: u32) -> Ordering {
    if let (Some(lhs), Some(rhs)) = (checked_scaled_power(a, b, e), checked_scaled_power(c, d, f)) {
        return lhs.cmp(&rhs);
    }
    let lhs = BigUint::from(a) * BigUint::from(b).pow(e);
    let rhs = BigUint::from(c) * BigUint::from(d).pow(f);
    lhs.cmp(&rhs)
}

fn checked_scaled_power(a: u64, b: u64, e: u32) -> Option<u128> {
    (b as u128).checked_pow(e)?.checked_mul(a as u128)
}

/// `count · r^size >= total`, the density test `count >= r^{-size} · total`.
pub fn meets_density(count: u64, total: u64, r: Rational, size: u32) -> bool {
    cmp_scaled_powers(count, *r.numer(), size, total, *r.denom(), size) != Ordering::Less
}

/// `count · r^size <= total`, the spread test `count <= r^{-size} · total`.
pub fn within_spread(count: u64, total: u64, r: Rational, size: u32) -> bool {
    cmp_scaled_powers(count, *r.numer(), size, total, *r.denom(), size) != Ordering::Greater
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Accepts `p/q`, integers, and finite decimals such as `2.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse {s:?} as a non-negative rational"));
    if let Some((int, frac)) = s.split_once('.') {
        if s.contains('/') || frac.is_empty() || frac.len() > 18 {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = frac.parse().map_err(|_| bad())?;
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        return Ok(Rational::new(num, den));
    }
    let r = Rational::from_str(s).map_err(|_| bad())?;
    if r.denom().is_zero() {
        return Err(bad());
    }
    Ok(r)
}

/// Serializes a rational as `"p/q"` (or `"p"` when integral).
pub fn serialize<S: serde::Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(r)
}

/// Exact value of `(x / y)` where both sides are big integers, as `f64`.
pub(crate) fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if den.is_zero() {
        return f64::INFINITY;
    }
    // Shift both sides to keep the quotient representable.
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}
