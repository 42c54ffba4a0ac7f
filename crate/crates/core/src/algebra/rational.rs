//! Exact rational scalars.
//!
//! `BigRational` already keeps numerator/denominator reduced with a positive
//! denominator, so it is used directly as the scalar field. The helpers here
//! cover the few operations the rest of the crate needs on top of it.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Sign as -1, 0 or +1.
pub fn sign(a: &Rational) -> i8 {
    match a.cmp(&Rational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Larger of the numerator and denominator bit lengths.
pub fn bits(a: &Rational) -> u64 {
    a.numer().bits().max(a.denom().bits())
}

/// Parses `"a/b"`, `"a"` or `"-a/b"`; surrounding whitespace is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(n, d))
}

/// Canonical `"a/b"` text, or `"a"` for integers.
pub fn format_rational(a: &Rational) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Rational with the smallest denominator in the closed interval `[a, b]`.
pub fn simplest_between(a: &Rational, b: &Rational) -> Rational {
    debug_assert!(a <= b);
    let zero = Rational::zero();
    if a <= &zero && &zero <= b {
        return zero;
    }
    if b < &zero {
        return -simplest_between(&-b, &-a);
    }
    let c = a.ceil();
    if &c <= b {
        return c;
    }
    let fl = a.floor();
    let lo = (b - &fl).recip();
    let hi = (a - &fl).recip();
    fl + simplest_between(&lo, &hi).recip()
}

/// `num / den` where both are non-negative machine integers.
pub fn frac(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
