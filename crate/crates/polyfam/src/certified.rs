//! Certified enclosures of the irrational quantities the crate needs:
//! square roots, arctangents, angles recovered from exact squared cosines,
//! and line inclinations.
//!
//! Every function returns an [`Interval`] with exact rational endpoints that
//! provably bracket the true value; callers refine by asking for more bits.
//! Series are evaluated on dyadic approximations of the argument with the
//! rounding error folded into the enclosure, which keeps denominators from
//! compounding across terms.

use crate::scalar::{int, ratio, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifiedError {
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("value out of the function's domain")]
    OutOfDomain,
}

/// A closed interval with rational endpoints, `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(q: Scalar) -> Interval {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) * ratio(1, 2)
    }

    pub fn contains(&self, q: &Scalar) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn scaled(&self, q: &Scalar) -> Interval {
        if q.is_negative() {
            Interval {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            Interval {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }

    pub fn offset(&self, q: &Scalar) -> Interval {
        Interval {
            lo: &self.lo + q,
            hi: &self.hi + q,
        }
    }

    /// True when every value of `self` is strictly below every value of `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !(self.certainly_lt(other) || other.certainly_lt(self))
    }

    /// Outward dyadic rounding to `bits` fractional bits; keeps endpoint
    /// representations small after a chain of exact operations.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn dyadic_floor(q: &Scalar, bits: u32) -> Scalar {
    let scaled = (q.numer() << bits).div_floor(q.denom());
    Scalar::new(scaled, pow2(bits))
}

fn dyadic_ceil(q: &Scalar, bits: u32) -> Scalar {
    let scaled = (q.numer() << bits).div_ceil(q.denom());
    Scalar::new(scaled, pow2(bits))
}

/// Nearest dyadic with `bits` fractional bits, ties rounded up:
/// `floor(q * 2^bits + 1/2) / 2^bits`.
fn dyadic_round(q: &Scalar, bits: u32) -> Scalar {
    let num = (q.numer() << (bits + 1)) + q.denom();
    let m = num.div_floor(&(q.denom() << 1));
    Scalar::new(m, pow2(bits))
}

/// `2^-bits` as a scalar.
fn ulp(bits: u32) -> Scalar {
    Scalar::new(BigInt::one(), pow2(bits))
}

/// Certified enclosure of `sqrt(q)` with width at most `2^-prec_bits`.
pub fn sqrt_interval(q: &Scalar, prec_bits: u32) -> Result<Interval, CertifiedError> {
    if q.is_negative() {
        return Err(CertifiedError::NegativeSqrt);
    }
    if q.is_zero() {
        return Ok(Interval::point(Scalar::zero()));
    }
    // sqrt(n/d) = sqrt(n*d)/d; isqrt of the scaled integer gives the bracket.
    let n = q.numer();
    let d = q.denom();
    let scaled = (n * d) << (2 * prec_bits);
    let root = scaled.sqrt();
    let denom = d * pow2(prec_bits);
    Ok(Interval::new(
        Scalar::new(root.clone(), denom.clone()),
        Scalar::new(root + 1, denom),
    ))
}

/// Alternating arctangent series on a small argument. Requires `|z| <= 1/2`;
/// returns an enclosure of `atan(z)` of width about `2^-prec_bits`.
fn atan_series(z: &Scalar, prec_bits: u32) -> Interval {
    let bits = prec_bits + 8;
    // Evaluate at a dyadic approximation; atan is 1-Lipschitz, so the
    // substitution error is bounded by the rounding error.
    let (zd, round_err) = if z.denom().bits() <= 32 {
        (z.clone(), Scalar::zero())
    } else {
        let zd = dyadic_round(z, bits);
        let err = (z - &zd).abs();
        (zd, err)
    };
    debug_assert!(zd.abs() <= ratio(3, 5), "series argument too large");
    let neg_z_sq = -(&zd * &zd);
    let mut sum = Scalar::zero();
    let mut power = zd.clone(); // (-1)^k z^(2k+1), the signed term numerator
    let mut k: u32 = 0;
    let tail;
    loop {
        sum += &power / int(2 * i64::from(k) + 1);
        power *= &neg_z_sq;
        let next_mag = power.abs() / int(2 * i64::from(k) + 3);
        if next_mag <= ulp(bits) {
            tail = next_mag;
            break;
        }
        k += 1;
        // |z| <= 1/2 converges well before this.
        assert!(k < 10_000, "arctangent series failed to converge");
    }
    let err = tail + round_err;
    Interval::new(&sum - &err, sum + err).round_out(bits)
}

/// Certified enclosure of `atan(q)` for any rational `q`.
pub fn atan_interval(q: &Scalar, prec_bits: u32) -> Interval {
    if q.is_negative() {
        return atan_interval(&-q, prec_bits).neg();
    }
    let one = Scalar::one();
    if q > &one {
        // atan(q) = pi/2 - atan(1/q)
        let half_pi = pi(prec_bits + 4).scaled(&ratio(1, 2));
        return half_pi.sub(&atan_interval(&q.recip(), prec_bits + 2));
    }
    if q > &ratio(1, 2) {
        // atan(q) = pi/4 + atan((q - 1)/(q + 1)), the argument lies in (-1/3, 0].
        let quarter_pi = pi(prec_bits + 4).scaled(&ratio(1, 4));
        let reduced = (q - &one) / (q + &one);
        return quarter_pi.add(&atan_series(&reduced, prec_bits + 2));
    }
    atan_series(q, prec_bits + 2)
}

/// Certified enclosure of pi (Machin's formula).
pub fn pi(prec_bits: u32) -> Interval {
    let a = atan_series(&ratio(1, 5), prec_bits + 8).scaled(&int(16));
    let b = atan_series(&ratio(1, 239), prec_bits + 8).scaled(&int(4));
    a.sub(&b).round_out(prec_bits + 4)
}

/// Maclaurin cosine at a point of `[0, 16/5]`, evaluated on a dyadic
/// rounding of the argument with the substitution error (cosine is
/// 1-Lipschitz) folded into the enclosure.
fn cos_point(q: &Scalar, prec_bits: u32) -> Interval {
    let bits = prec_bits + 8;
    let (qd, round_err) = if q.denom().bits() <= 32 {
        (q.clone(), Scalar::zero())
    } else {
        let qd = dyadic_round(q, bits);
        let err = (q - &qd).abs();
        (qd, err)
    };
    debug_assert!(!qd.is_negative() && qd <= ratio(17, 5));
    let neg_q_sq = -(&qd * &qd);
    let mut sum = Scalar::zero();
    let mut term = Scalar::one(); // (-1)^k q^(2k) / (2k)!
    let mut k: u32 = 0;
    let tail;
    loop {
        sum += &term;
        term *= &neg_q_sq / int(i64::from(2 * k + 1) * i64::from(2 * k + 2));
        let next_mag = term.abs();
        // Terms decrease strictly once (2k+1)(2k+2) exceeds q^2, which holds
        // from k = 2 for arguments up to 17/5; only then is the alternating
        // tail bound valid.
        if k >= 2 && next_mag <= ulp(bits) {
            tail = next_mag;
            break;
        }
        k += 1;
        assert!(k < 10_000, "cosine series failed to converge");
    }
    let err = tail + round_err;
    Interval::new(&sum - &err, sum + err).round_out(bits)
}

/// Certified enclosure of `cos(x)` over an enclosure `x` within `[0, 16/5]`
/// (past pi, so any angle of interest fits). Errors if the enclosure leaves
/// that range, where the evaluation below would lose monotonicity.
pub fn cos_interval(x: &Interval, prec_bits: u32) -> Result<Interval, CertifiedError> {
    if x.lo().is_negative() || x.hi() > &ratio(16, 5) {
        return Err(CertifiedError::OutOfDomain);
    }
    // The cosine decreases on [0, pi] and 16/5 > pi, but monotonicity is
    // only used endpoint-wise: cos(x) is bracketed by the enclosures at the
    // endpoints as long as the whole interval stays left of pi. For the
    // sliver (pi, 16/5] the lower endpoint evaluation still bounds below
    // because cos is minimized at pi >= x.lo there; keep it simple and
    // widen: evaluate both endpoints and take the convex hull with -1 if
    // the interval might cross pi.
    let at_lo = cos_point(x.lo(), prec_bits);
    let at_hi = cos_point(x.hi(), prec_bits);
    let pi_enc = pi(prec_bits);
    if x.hi() > pi_enc.lo() {
        // Might cross the minimum; be conservative.
        let lo = (-Scalar::one()).min(at_lo.lo().min(at_hi.lo()).clone());
        let hi = at_lo.hi().max(at_hi.hi()).clone();
        return Ok(Interval::new(lo, hi));
    }
    Ok(Interval::new(at_hi.lo().clone(), at_lo.hi().clone()))
}

/// Enclosure of `atan(sqrt(t))` for rational `t >= 0`.
pub fn atan_of_sqrt(t: &Scalar, prec_bits: u32) -> Result<Interval, CertifiedError> {
    let r = sqrt_interval(t, prec_bits + 2)?;
    let lo = atan_interval(r.lo(), prec_bits + 2);
    let hi = atan_interval(r.hi(), prec_bits + 2);
    Ok(Interval::new(lo.lo().clone(), hi.hi().clone()))
}

/// Recovers an enclosure of the angle in `[0, pi]` whose squared cosine is
/// `cos_sq` and whose cosine has sign `sign`. `sign == 0` requires
/// `cos_sq == 0` and denotes a right angle.
pub fn angle_from_squared_cosine(
    cos_sq: &Scalar,
    sign: i8,
    prec_bits: u32,
) -> Result<Interval, CertifiedError> {
    if cos_sq.is_negative() || cos_sq > &Scalar::one() {
        return Err(CertifiedError::OutOfDomain);
    }
    if (sign == 0) != cos_sq.is_zero() {
        return Err(CertifiedError::OutOfDomain);
    }
    if sign == 0 {
        return Ok(pi(prec_bits + 2).scaled(&ratio(1, 2)));
    }
    if cos_sq == &Scalar::one() {
        return Ok(if sign > 0 {
            Interval::point(Scalar::zero())
        } else {
            pi(prec_bits)
        });
    }
    // tan^2 = (1 - cos^2)/cos^2, and the angle is acute iff sign > 0.
    let tan_sq = (Scalar::one() - cos_sq) / cos_sq;
    let acute = atan_of_sqrt(&tan_sq, prec_bits + 2)?;
    Ok(if sign > 0 {
        acute
    } else {
        pi(prec_bits + 2).sub(&acute)
    })
}

/// Enclosure of the inclination of the line direction `(dx, dy)` in `[0, pi)`:
/// the angle measured from the positive first axis, direction sign ignored.
pub fn line_inclination(dx: &Scalar, dy: &Scalar, prec_bits: u32) -> Interval {
    assert!(
        !(dx.is_zero() && dy.is_zero()),
        "inclination of the zero direction"
    );
    if dy.is_zero() {
        return Interval::point(Scalar::zero());
    }
    if dx.is_zero() {
        return pi(prec_bits + 2).scaled(&ratio(1, 2));
    }
    let slope = dy / dx;
    if slope.is_positive() {
        atan_interval(&slope, prec_bits)
    } else {
        pi(prec_bits + 2).add(&atan_interval(&slope, prec_bits + 2))
    }
}

/// Exact total order on line directions by inclination in `[0, pi)`.
/// Directions with slope `>= 0` come first in slope order, then vertical,
/// then negative slopes in slope order. Returns the comparison of the
/// inclinations of `(dx1, dy1)` and `(dx2, dy2)`.
pub fn compare_inclinations(
    dx1: &Scalar,
    dy1: &Scalar,
    dx2: &Scalar,
    dy2: &Scalar,
) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    // Rank 0: dy == 0 (inclination 0); rank 1: slope > 0; rank 2: vertical;
    // rank 3: slope < 0.
    let rank = |dx: &Scalar, dy: &Scalar| -> u8 {
        if dy.is_zero() {
            0
        } else if dx.is_zero() {
            2
        } else if (dy / dx).is_positive() {
            1
        } else {
            3
        }
    };
    let r1 = rank(dx1, dy1);
    let r2 = rank(dx2, dy2);
    match r1.cmp(&r2) {
        Ordering::Equal => {}
        other => return other,
    }
    if r1 == 1 || r1 == 3 {
        (dy1 / dx1).cmp(&(dy2 / dx2))
    } else {
        Ordering::Equal
    }
}
