//! Figure exporters: SVG drawings of projected families and OBJ meshes.
//!
//! These are the only code paths where exact coordinates leave the crate as
//! decimal approximations. Every emitted file states its precision in a
//! comment line. Decimal conversion itself is exactly rounded (half away
//! from zero) at a requested number of significant digits.

use crate::kernel::Vec3;
use crate::model::Family;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("projection direction ({x}, {y}, {z}) lies in the plane of polygon {polygon}")]
    DegenerateDirection {
        x: Scalar,
        y: Scalar,
        z: Scalar,
        polygon: usize,
    },
    #[error("no generic projection direction found in {0} attempts")]
    NoGenericDirection(usize),
    #[error("projection direction must be nonzero")]
    ZeroDirection,
    #[error("significant digits must be at least 1")]
    ZeroPrecision,
}

/// Default number of significant digits for OBJ coordinates.
pub const DEFAULT_OBJ_DIGITS: u32 = 12;

/// Decimal places used for SVG coordinates.
const SVG_DECIMALS: usize = 6;

fn ten_pow(k: u64) -> BigInt {
    BigInt::from(10u32).pow(u32::try_from(k).expect("exponent fits u32"))
}

/// Exactly rounded fixed-point decimal form of `q` with `sig_digits`
/// significant digits (ties away from zero). Trailing fractional zeros are
/// trimmed, so the output is canonical for a given `(q, sig_digits)`.
pub fn decimal_approx(q: &Scalar, sig_digits: u32) -> String {
    assert!(sig_digits >= 1, "need at least one significant digit");
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().clone();

    // Find the decimal exponent e with 10^e <= |q| < 10^(e+1).
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ge = |e: i64| -> bool {
        // |q| >= 10^e  <=>  num >= den * 10^e (shifting to whichever side keeps powers positive)
        if e >= 0 {
            num >= &den * ten_pow(e as u64)
        } else {
            &num * ten_pow((-e) as u64) >= den
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }

    // Scale so the significant digits land in the integer part, then round
    // half away from zero (the magnitude is positive here, so half up).
    let k = i64::from(sig_digits) - 1 - e;
    let (scaled_num, scaled_den) = if k >= 0 {
        (&num * ten_pow(k as u64), den)
    } else {
        (num.clone(), &den * ten_pow((-k) as u64))
    };
    let rounded: BigInt = (scaled_num * 2u32 + &scaled_den) / (scaled_den * 2u32);

    let digits = rounded.to_string();
    let body = if k <= 0 {
        format!("{digits}{}", "0".repeat((-k) as usize))
    } else {
        let k = k as usize;
        let with_point = if digits.len() > k {
            let (int_part, frac_part) = digits.split_at(digits.len() - k);
            format!("{int_part}.{frac_part}")
        } else {
            format!("0.{}{digits}", "0".repeat(k - digits.len()))
        };
        with_point
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Wavefront OBJ text: every point as a `v` line, every polygon as a 1-based
/// `f` line, with family metadata and the stated precision in comments.
pub fn export_obj(family: &Family, sig_digits: u32) -> Result<String, ExportError> {
    if sig_digits == 0 {
        return Err(ExportError::ZeroPrecision);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# polygon family: {} points, {} polygons",
        family.point_set().len(),
        family.len()
    );
    let _ = writeln!(
        out,
        "# coordinates are decimal approximations at {sig_digits} significant digits"
    );
    for (k, v) in family.metadata() {
        let _ = writeln!(out, "# meta {k} {v}");
    }
    for p in family.point_set().points() {
        let _ = writeln!(
            out,
            "v {} {} {}",
            decimal_approx(&p.x, sig_digits),
            decimal_approx(&p.y, sig_digits),
            decimal_approx(&p.z, sig_digits)
        );
    }
    for poly in family.polygons() {
        let indices: Vec<String> = poly.vertices().iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(out, "f {}", indices.join(" "));
    }
    Ok(out)
}

/// Exact genericity gate: errors if the direction is zero or lies in some
/// polygon's plane (where that polygon would project to a segment).
fn check_direction(family: &Family, v: &Vec3) -> Result<(), ExportError> {
    if v.is_zero() {
        return Err(ExportError::ZeroDirection);
    }
    for (i, poly) in family.polygons().iter().enumerate() {
        if poly.plane().normal().dot(v).is_zero() {
            return Err(ExportError::DegenerateDirection {
                x: v.x.clone(),
                y: v.y.clone(),
                z: v.z.clone(),
                polygon: i,
            });
        }
    }
    Ok(())
}

/// Picks a direction clear of every polygon plane: vertical first, then
/// rational rotations of vertical drawn from a fixed seed.
fn auto_direction(family: &Family, max_attempts: usize) -> Result<Vec3, ExportError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b6a_f00d);
    for attempt in 0..max_attempts.max(1) {
        let v = if attempt == 0 {
            Vec3::from_i64(0, 0, 1)
        } else {
            let q: Vec<i64> = (0..4).map(|_| rng.gen_range(-9i64..=9)).collect();
            let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
            let v = Vec3::from_i64(
                2 * (b * d + a * c),
                2 * (c * d - a * b),
                a * a - b * b - c * c + d * d,
            );
            if v.is_zero() {
                continue;
            }
            v
        };
        if check_direction(family, &v).is_ok() {
            return Ok(v);
        }
    }
    Err(ExportError::NoGenericDirection(max_attempts.max(1)))
}

fn to_f64(q: &Scalar) -> f64 {
    decimal_approx(q, 17)
        .parse()
        .expect("decimal form is a valid float literal")
}

fn fmt_svg(x: f64) -> String {
    let s = format!("{:.*}", SVG_DECIMALS, x);
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

const PALETTE: [&str; 8] = [
    "#1b6ca8", "#c0392b", "#1e8449", "#7d3c98", "#b7950b", "#148f77", "#a04000", "#34495e",
];

/// SVG 1.1 drawing of the family under orthogonal projection.
///
/// The projection direction must miss every polygon plane (checked exactly);
/// with `direction = None` a generic one is chosen deterministically. The
/// drawing itself is floating point: polygons in family order with a fixed
/// color cycle, every point of the family dotted, the vertical axis flipped
/// so the mathematical y-axis points up.
pub fn export_svg(family: &Family, direction: Option<&Vec3>) -> Result<String, ExportError> {
    let v = match direction {
        Some(v) => {
            check_direction(family, v)?;
            v.clone()
        }
        None => auto_direction(family, 64)?,
    };

    // Orthonormal screen basis (floating point; the exactness boundary was
    // the degeneracy check above).
    let vf = [to_f64(&v.x), to_f64(&v.y), to_f64(&v.z)];
    let norm = (vf[0] * vf[0] + vf[1] * vf[1] + vf[2] * vf[2]).sqrt();
    let vhat = [vf[0] / norm, vf[1] / norm, vf[2] / norm];
    let seed_axis = if vhat[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let u_raw = cross(seed_axis, vhat);
    let u_norm = (u_raw[0] * u_raw[0] + u_raw[1] * u_raw[1] + u_raw[2] * u_raw[2]).sqrt();
    let u = [u_raw[0] / u_norm, u_raw[1] / u_norm, u_raw[2] / u_norm];
    let w = cross(vhat, u);

    // Project every point; flip y for screen coordinates.
    let screen: Vec<(f64, f64)> = family
        .point_set()
        .points()
        .iter()
        .map(|p| {
            let pf = [to_f64(&p.x), to_f64(&p.y), to_f64(&p.z)];
            let x = pf[0] * u[0] + pf[1] * u[1] + pf[2] * u[2];
            let y = pf[0] * w[0] + pf[1] * w[1] + pf[2] * w[2];
            (x, -y)
        })
        .collect();

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &screen {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    if screen.is_empty() {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let extent = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let margin = extent * 0.05;
    let view = (
        min_x - margin,
        min_y - margin,
        (max_x - min_x) + 2.0 * margin,
        (max_y - min_y) + 2.0 * margin,
    );
    let stroke = extent / 200.0;
    let dot = extent / 120.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        fmt_svg(view.0),
        fmt_svg(view.1),
        fmt_svg(view.2),
        fmt_svg(view.3)
    );
    let _ = writeln!(
        out,
        "<!-- orthogonal projection along ({}, {}, {}); coordinates rounded to {} decimal places -->",
        v.x, v.y, v.z, SVG_DECIMALS
    );
    let _ = writeln!(
        out,
        "<g stroke-width=\"{}\" fill-opacity=\"0.18\">",
        fmt_svg(stroke)
    );
    for (i, poly) in family.polygons().iter().enumerate() {
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|&k| {
                let (x, y) = screen[k];
                format!("{},{}", fmt_svg(x), fmt_svg(y))
            })
            .collect();
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{color}\" stroke=\"{color}\"/>",
            pts.join(" ")
        );
    }
    for &(x, y) in &screen {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#202020\" stroke=\"none\"/>",
            fmt_svg(x),
            fmt_svg(y),
            fmt_svg(dot)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
