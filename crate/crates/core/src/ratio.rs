//! Exact rational arithmetic helpers.
//!
//! Every closed-form quantity in the bounds calculus is carried as a
//! `BigRational`; nothing in this crate is allowed to round through floats
//! when a theorem-level comparison depends on the value.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::Error;

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_usize(n: usize) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Largest integer `<= x`.
pub fn floor_int(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

pub fn pow_u(x: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `floor(sqrt(x))` for `x >= 0`, exact: the unique `c` with `c^2 <= x < (c+1)^2`.
pub fn isqrt_rational(x: &Rational) -> BigInt {
    assert!(!x.is_negative(), "isqrt of negative rational");
    // floor(sqrt(x)) == floor(sqrt(floor(x))) for x >= 0.
    floor_int(x).sqrt()
}

/// Parses "p/q", a decimal like "0.25", or a plain integer.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let digits = frac.len() as u32;
        let frac_num: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let den = BigInt::from(10u32).pow(digits);
        let mut num = int * &den;
        if neg {
            num -= frac_num;
        } else {
            num += frac_num;
        }
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// "p/q" (or just "p" for integers), the inverse of [`parse_rational`].
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// serde adapter: rationals cross the wire as "p/q" strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Exact value of the form `scale * radicand^(1/k) + offset`.
///
/// The extremal cascade produces thresholds built from `C = (a0/eps)^(1/k)`,
/// which is irrational in general. We never materialize it; comparisons
/// against rationals go through k-th-power cross-multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct KthRootExpr {
    pub scale: Rational,
    pub radicand: Rational,
    pub k: u32,
    pub offset: Rational,
}

impl KthRootExpr {
    /// `scale * radicand^(1/k) + offset`; requires `radicand >= 0`, `scale >= 0`.
    pub fn new(scale: Rational, radicand: Rational, k: u32, offset: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        assert!(!scale.is_negative(), "negative scale");
        assert!(k >= 1);
        KthRootExpr { scale, radicand, k, offset }
    }

    /// Exact comparison of the represented value with `x`.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        // scale * rad^(1/k) vs x - offset, both sides with known signs.
        let rhs = x - &self.offset;
        let lhs_zero = self.scale.is_zero() || self.radicand.is_zero();
        if rhs.is_negative() {
            return Ordering::Greater; // lhs >= 0 > rhs
        }
        if lhs_zero {
            return if rhs.is_zero() { Ordering::Equal } else { Ordering::Less };
        }
        // Both positive: compare scale^k * rad vs rhs^k.
        let lhs_pow = pow_u(&self.scale, self.k) * &self.radicand;
        let rhs_pow = pow_u(&rhs, self.k);
        lhs_pow.cmp(&rhs_pow)
    }

    pub fn approx_f64(&self) -> f64 {
        to_f64(&self.scale) * to_f64(&self.radicand).powf(1.0 / self.k as f64)
            + to_f64(&self.offset)
    }
}

impl fmt::Display for KthRootExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*({})^(1/{}) + {}",
            format_rational(&self.scale),
            format_rational(&self.radicand),
            self.k,
            format_rational(&self.offset)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational("1e-3").ok(), None);
    }

    #[test]
    fn format_round_trips() {
        for x in [rat(3, 7), rat(-22, 4), rat_int(0), rat_int(-5)] {
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }

    #[test]
    fn isqrt_exact() {
        assert_eq!(isqrt_rational(&rat_int(144)), BigInt::from(12));
        assert_eq!(isqrt_rational(&rat(145, 1)), BigInt::from(12));
        assert_eq!(isqrt_rational(&rat(1, 2)), BigInt::from(0));
        assert_eq!(isqrt_rational(&rat(9, 4)), BigInt::from(1));
    }

    #[test]
    fn kth_root_comparisons() {
        // 2^(1/2) vs rationals around sqrt(2)
        let r = KthRootExpr::new(rat_int(1), rat_int(2), 2, rat_int(0));
        assert_eq!(r.cmp_rational(&rat(141421, 100000)), Ordering::Greater);
        assert_eq!(r.cmp_rational(&rat(141422, 100000)), Ordering::Less);
        // 3 * 8^(1/3) + 1 = 7 exactly
        let r = KthRootExpr::new(rat_int(3), rat_int(8), 3, rat_int(1));
        assert_eq!(r.cmp_rational(&rat_int(7)), Ordering::Equal);
        assert_eq!(r.cmp_rational(&rat_int(8)), Ordering::Less);
    }
}
