//! Exact rational scalars and the extended rational line.
//!
//! Everything geometric in this crate is measured in `BigRational`. Interval
//! endpoints additionally admit `-inf` / `+inf`, captured by [`ExtRat`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// Shorthand for the scalar type used throughout the crate.
pub type Rat = BigRational;

/// `n/d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Canonical text form: `p/q` with `q > 0` reduced, or just `p` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Parse the canonical form produced by [`fmt_rat`]: `p`, `-p`, `p/q`.
/// Returns `None` on anything else (including a zero denominator).
pub fn parse_rat(s: &str) -> Option<Rat> {
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_s.parse().ok()?;
    let den: BigInt = match den_s {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// `r^n` for any integer exponent; `r` must be nonzero when `n < 0`.
pub fn pow_i(r: &Rat, n: i64) -> Rat {
    let mut base = if n < 0 { r.recip() } else { r.clone() };
    let mut exp = n.unsigned_abs();
    let mut acc = Rat::one();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        exp >>= 1;
    }
    acc
}

/// Serialize a rational as its canonical `p/q` string (for report JSON).
pub fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// A point of the extended rational line `ℚ ∪ {-∞, +∞}`, totally ordered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRat {
    NegInf,
    Fin(Rat),
    PosInf,
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl ExtRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Fin(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Fin(_))
    }
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Fin(r)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRat::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => write!(f, "-inf"),
            ExtRat::PosInf => write!(f, "+inf"),
            ExtRat::Fin(r) => write!(f, "{}", r),
        }
    }
}

/// Sort key for rationals in id strings: rationals order before text ids, so
/// canonical labels built from [`fmt_rat`] sort numerically when compared as
/// parsed pairs. Exposed for deterministic orderings elsewhere in the crate.
pub fn rat_sort_key(r: &Rat) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

/// True if `r` is strictly between `lo` and `hi` on the extended line.
pub fn strictly_between(lo: &ExtRat, r: &Rat, hi: &ExtRat) -> bool {
    let p = ExtRat::Fin(r.clone());
    *lo < p && p < *hi
}

/// Sign of a rational as -1, 0, +1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_format_round_trips() {
        for (n, d, s) in [(1i64, 2i64, "1/2"), (-3, 4, "-3/4"), (5, 1, "5"), (4, 2, "2"), (0, 7, "0")] {
            let r = rat(n, d);
            assert_eq!(fmt_rat(&r), s);
            assert_eq!(parse_rat(s).unwrap(), r);
        }
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
        assert!(parse_rat("1.5").is_none());
    }

    #[test]
    fn extended_order_is_total() {
        let pts = [ExtRat::NegInf, ExtRat::Fin(rat(-7, 2)), ExtRat::Fin(rat_int(0)), ExtRat::Fin(rat(9, 10)), ExtRat::PosInf];
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert_eq!(pts[i].cmp(&pts[j]), i.cmp(&j));
            }
        }
    }

    #[test]
    fn integer_powers_are_exact() {
        let half = rat(1, 2);
        assert_eq!(pow_i(&half, 3), rat(1, 8));
        assert_eq!(pow_i(&half, 0), rat_int(1));
        assert_eq!(pow_i(&half, -2), rat_int(4));
        let neg = rat(-2, 3);
        assert_eq!(pow_i(&neg, 2), rat(4, 9));
        assert_eq!(pow_i(&neg, 3), rat(-8, 27));
    }
}
