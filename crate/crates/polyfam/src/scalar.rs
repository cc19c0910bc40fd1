//! Scalar type and helpers: arbitrary-precision rationals.
//!
//! All geometric computation in this crate is exact. The scalar type is a
//! reduced big-rational; its `Display` form (`n`, `-n`, or `n/d` with `d > 1`)
//! is the canonical coordinate syntax of the family text format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

pub type Scalar = BigRational;

/// Integer scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n/d` as a scalar. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Sign of a scalar as `-1`, `0`, or `1`.
pub fn sgn(q: &Scalar) -> i8 {
    match q.cmp(&Scalar::zero()) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("empty scalar")]
    Empty,
    #[error("invalid integer part {0:?}")]
    BadInteger(String),
    #[error("invalid denominator {0:?}")]
    BadDenominator(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Parses `n` or `n/d` with optional leading `-`. The result is reduced; any
/// sign on the denominator is normalized away.
pub fn parse_scalar(s: &str) -> Result<Scalar, ScalarParseError> {
    if s.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| ScalarParseError::BadInteger(num_str.to_string()))?;
    let denom: BigInt = match den_str {
        Some(d) => d
            .parse()
            .map_err(|_| ScalarParseError::BadDenominator(d.to_string()))?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(ScalarParseError::ZeroDenominator);
    }
    Ok(Scalar::new(numer, denom))
}

/// Canonical string form: reduced, `n/d` only when the denominator exceeds 1.
pub fn format_scalar(q: &Scalar) -> String {
    q.to_string()
}

/// The rational with the smallest denominator (smallest numerator on ties)
/// in the closed interval `[lo, hi]`. Classic continued-fraction walk; used
/// to suggest compact exact bounds for certified enclosures.
pub fn simplest_in_interval(lo: &Scalar, hi: &Scalar) -> Scalar {
    assert!(lo <= hi, "empty interval");
    if sgn(lo) <= 0 && sgn(hi) >= 0 {
        return Scalar::zero();
    }
    if sgn(hi) < 0 {
        return -simplest_in_interval(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

fn simplest_positive(lo: &Scalar, hi: &Scalar) -> Scalar {
    // pre: 0 < lo <= hi
    let ceil_lo = lo.ceil();
    if ceil_lo <= *hi {
        return ceil_lo;
    }
    // Both ends share the integer part n; recurse on the fractional parts:
    // the simplest value is n + 1/simplest(1/(hi - n), 1/(lo - n)).
    let n = lo.floor();
    let inner = simplest_positive(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}
