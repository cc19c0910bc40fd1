//! Reference families with known compatibility guarantees.
//!
//! * [`christmas_tree`]: `m^2` triangles on `2m+1` points, pairwise meeting in
//!   at most a common vertex or a full common edge (vertex-or-edge family);
//! * [`prism_quads`]: `m(m-1)/2` parallelograms on `2m` points with no badly
//!   intersecting pair;
//! * [`fat_hexagon_stack`]: `count >= 3` fat hexagons engineered so that
//!   exactly one pair intersects badly — the projection pipeline's positive
//!   test input;
//! * [`scattered_hexagons`]: pairwise disjoint fat hexagons — the matching
//!   negative control.
//!
//! All constructions are deterministic in their parameters and seed.

use crate::kernel::{Point3, Vec3};
use crate::model::{
    is_fat_hexagon, Family, FatnessParams, ModelError, PointSet,
};
use crate::scalar::{int, ratio, Scalar};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid construction parameter: {0}")]
    InvalidParameter(String),
    #[error("parameters infeasible for this construction: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `m` distinct points on the unit circle with rational coordinates, in
/// angular order. Seed `0` gives the canonical ladder through the tangent
/// half-angle parameters `t = 0, 1, ..., m-1` (starting at `(1, 0)`); other
/// seeds draw random rational parameters. No two returned points are equal or
/// antipodal.
pub fn rational_circle_points(m: usize, seed: u64) -> Vec<(Scalar, Scalar)> {
    let params: Vec<Scalar> = if seed == 0 {
        (0..m).map(|i| int(i as i64)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set: BTreeSet<Scalar> = BTreeSet::new();
        let mut guard = 0u32;
        while set.len() < m {
            guard += 1;
            assert!(guard < 1_000_000, "circle point sampling failed to converge");
            let n = rng.gen_range(-256i64..=256);
            let d = rng.gen_range(1i64..=64);
            let t = ratio(n, d);
            let minus_one = -Scalar::one();
            if set.iter().any(|u| u * &t == minus_one) {
                continue; // antipodal to an existing point
            }
            set.insert(t);
        }
        set.into_iter().collect()
    };
    params
        .into_iter()
        .map(|t| {
            let t_sq = &t * &t;
            let den = &t_sq + Scalar::one();
            ((Scalar::one() - &t_sq) / &den, (int(2) * t) / den)
        })
        .collect()
}

/// A vertex-or-edge-compatible family of `m^2` triangles on `2m+1` points:
/// `m+1` points stacked on a vertical axis and `m` unit-circle directions.
/// Triangle `(i, j)` joins axis points `i`, `i+1` with circle point `j`; all
/// triangle planes contain the axis, so any two triangles meet in at most a
/// common vertex or a full common edge.
pub fn christmas_tree(m: usize) -> Result<Family, ConstructError> {
    if m == 0 {
        return Err(ConstructError::InvalidParameter(
            "christmas-tree needs m >= 1".into(),
        ));
    }
    let mut points: Vec<Point3> = (0..=m as i64)
        .map(|i| Point3::new(Scalar::zero(), Scalar::zero(), int(i)))
        .collect();
    for (x, y) in rational_circle_points(m, 0) {
        points.push(Point3::new(x, y, Scalar::zero()));
    }
    let mut triangles = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            triangles.push(vec![i, i + 1, m + 1 + j]);
        }
    }
    let mut family = Family::new(PointSet::new(points)?, &triangles)?;
    family.set_metadata("construction", "christmas-tree");
    family.set_metadata("m", &m.to_string());
    Ok(family)
}

/// A family with no badly intersecting pair: over `m` base points in strictly
/// convex position, one parallelogram per base pair, swept along `axis`
/// (default `(0,0,1)`; must leave the base plane). Quads over a common base
/// point share exactly the vertical edge there; quads over disjoint base
/// pairs share no vertex at all.
pub fn prism_quads(m: usize, seed: u64, axis: Option<Vec3>) -> Result<Family, ConstructError> {
    if m < 2 {
        return Err(ConstructError::InvalidParameter(
            "prism-quads needs m >= 2".into(),
        ));
    }
    let v = axis.unwrap_or_else(|| Vec3::from_i64(0, 0, 1));
    if v.z.is_zero() {
        return Err(ConstructError::InvalidParameter(
            "axis must leave the base plane (nonzero third coordinate)".into(),
        ));
    }
    let mut points: Vec<Point3> = rational_circle_points(m, seed)
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, Scalar::zero()))
        .collect();
    let tops: Vec<Point3> = points.iter().map(|p| p.add(&v)).collect();
    points.extend(tops);
    let mut quads = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            quads.push(vec![i, j, m + j, m + i]);
        }
    }
    let mut family = Family::new(PointSet::new(points)?, &quads)?;
    family.set_metadata("construction", "prism-quads");
    family.set_metadata("m", &m.to_string());
    family.set_metadata("seed", &seed.to_string());
    Ok(family)
}

/// The planar template hexagon all stacked constructions share, in the
/// pre-rotation frame. Fat for `c^2 >= 3/2` and `cos_alpha in [3/10, 7/10]`:
/// the ear angles (odd positions) have `|cos| <= 0.29`, the corner angles
/// (even positions) have `|cos| >= 0.72`, and the squared side ratio is at
/// most `29/25`.
fn template_2d() -> [(Scalar, Scalar); 6] {
    [
        (int(0), int(0)),   // corner A
        (int(4), int(-3)),  // ear B
        (int(8), int(0)),   // corner C
        (int(9), int(5)),   // ear D
        (int(4), int(7)),   // corner E
        (int(-1), int(5)),  // ear F
    ]
}

/// Rotation of the horizontal frame by the rational angle with
/// `cos = 4/5, sin = 3/5`, keeping heights. Applied to every stacked
/// construction so that no diagonal of interest is axis-parallel.
fn rotate_xy(p: Point3) -> Point3 {
    let c = ratio(4, 5);
    let s = ratio(3, 5);
    Point3::new(&c * &p.x - &s * &p.y, s * p.x + c * p.y, p.z)
}

fn stack_param_check(params: &FatnessParams) -> Result<(), ConstructError> {
    if params.c_sq() < &ratio(3, 2) {
        return Err(ConstructError::Infeasible(format!(
            "stacked hexagons need c^2 >= 3/2, got {}",
            params.c_sq()
        )));
    }
    let ca = params.cos_alpha();
    if ca < &ratio(3, 10) || ca > &ratio(7, 10) {
        return Err(ConstructError::Infeasible(format!(
            "stacked hexagons need cos_alpha in [3/10, 7/10], got {ca}"
        )));
    }
    Ok(())
}

fn small_jitter(rng: &mut ChaCha8Rng) -> (Scalar, Scalar) {
    (
        ratio(rng.gen_range(-32i64..=32), 64),
        ratio(rng.gen_range(-32i64..=32), 64),
    )
}

/// Template copy translated by `(dx, dy)` in the horizontal plane.
fn translated_template(dx: &Scalar, dy: &Scalar) -> Vec<Point3> {
    template_2d()
        .into_iter()
        .map(|(x, y)| Point3::new(x + dx, y + dy, Scalar::zero()))
        .collect()
}

fn finish_stack_family(
    points: Vec<Point3>,
    hexes: Vec<Vec<usize>>,
    params: &FatnessParams,
) -> Result<Family, ConstructError> {
    let points: Vec<Point3> = points.into_iter().map(rotate_xy).collect();
    let family = Family::new(PointSet::new(points)?, &hexes)?;
    for (i, poly) in family.polygons().iter().enumerate() {
        if !is_fat_hexagon(family.point_set(), poly, params)? {
            return Err(ConstructError::Infeasible(format!(
                "hexagon {i} is not fat for the requested parameters"
            )));
        }
    }
    Ok(family)
}

/// `count >= 3` fat hexagons with exactly one badly intersecting pair.
///
/// Three core hexagons are arranged around a central triangle: each pair
/// shares exactly one triangle corner, and the corner diagonals of the three
/// hexagons run along the triangle's edge lines (or parallel to them), so the
/// projection pipeline's inclination buckets keep the trio together. The
/// planes are tilted such that the hexagon pair sharing the first corner
/// meets in a segment reaching both interiors — the one bad pair — while the
/// other two pairs meet in their shared corner only. Remaining hexagons are
/// distant flat template copies.
///
/// Requires `c^2 >= 3/2` and `cos_alpha in [3/10, 7/10]`; stricter parameters
/// are rejected as infeasible.
pub fn fat_hexagon_stack(
    count: usize,
    params: &FatnessParams,
    seed: u64,
) -> Result<Family, ConstructError> {
    if count < 3 {
        return Err(ConstructError::InvalidParameter(
            "hexagon-stack needs count >= 3".into(),
        ));
    }
    stack_param_check(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Central triangle corners (heights are fixed by the plane tilts below).
    let p_a = (int(0), int(0));
    let p_c = (int(8), int(0));
    let p_e = (int(4), int(7));
    // Fresh replacement corners, offset along the triangle edge lines so the
    // corresponding diagonals stay exactly parallel: eta = 1/128.
    let eta = ratio(1, 128);
    let own_c = (&p_c.0 + &(&p_c.0 - &p_a.0) * &eta, (&p_c.1 - &p_a.1) * &eta);
    let own_e = (
        &p_e.0 + &(&p_e.0 - &p_c.0) * &eta,
        &p_e.1 + &(&p_e.1 - &p_c.1) * &eta,
    );
    let own_a = (
        &p_a.0 + &(&p_a.0 - &p_e.0) * &eta,
        &p_a.1 + &(&p_a.1 - &p_e.1) * &eta,
    );

    // Plane tilts: hexagon 0 rises off the line through corners A and E,
    // hexagon 1 off the A-C line, hexagon 2 off the C-E line. The slopes are
    // chosen so that the planes of hexagons 0 and 1 cross *into* both
    // interiors at corner A (the engineered bad pair) while the other two
    // crossing lines leave their shared corners immediately.
    let lift0 = |x: &Scalar, y: &Scalar| (int(4) * y - int(7) * x) / int(64);
    let lift1 = |_x: &Scalar, y: &Scalar| -(y / int(8));
    let lift2 = |x: &Scalar, y: &Scalar| (int(56) - int(7) * x - int(4) * y) / int(64);

    let template = template_2d();
    let ear = |i: usize, h: i64| -> (Scalar, Scalar) {
        // Per-hexagon ear jitter keeps projected images distinct.
        (
            &template[i].0 + ratio(h, 64),
            &template[i].1 + ratio(h, 128),
        )
    };

    let mut points: Vec<Point3> = Vec::new();
    let push3 = |points: &mut Vec<Point3>,
                     xy: &(Scalar, Scalar),
                     lift: &dyn Fn(&Scalar, &Scalar) -> Scalar|
     -> usize {
        let z = lift(&xy.0, &xy.1);
        points.push(Point3::new(xy.0.clone(), xy.1.clone(), z));
        points.len() - 1
    };

    // Shared corners lie on all the relevant planes at height zero.
    let ia = push3(&mut points, &p_a, &|_, _| Scalar::zero());
    let ic = push3(&mut points, &p_c, &|_, _| Scalar::zero());
    let ie = push3(&mut points, &p_e, &|_, _| Scalar::zero());
    debug_assert!(lift0(&p_a.0, &p_a.1).is_zero() && lift0(&p_e.0, &p_e.1).is_zero());
    debug_assert!(lift1(&p_a.0, &p_a.1).is_zero() && lift1(&p_c.0, &p_c.1).is_zero());
    debug_assert!(lift2(&p_c.0, &p_c.1).is_zero() && lift2(&p_e.0, &p_e.1).is_zero());

    let mut hexes: Vec<Vec<usize>> = Vec::with_capacity(count);

    // Hexagon 0: corners A (shared), C (own), E (shared); plane of lift0.
    let b0 = push3(&mut points, &ear(1, 0), &lift0);
    let c0 = push3(&mut points, &own_c, &lift0);
    let d0 = push3(&mut points, &ear(3, 0), &lift0);
    let f0 = push3(&mut points, &ear(5, 0), &lift0);
    hexes.push(vec![ia, b0, c0, d0, ie, f0]);

    // Hexagon 1: corners A (shared), C (shared), E (own); plane of lift1.
    let b1 = push3(&mut points, &ear(1, 1), &lift1);
    let d1 = push3(&mut points, &ear(3, 1), &lift1);
    let e1 = push3(&mut points, &own_e, &lift1);
    let f1 = push3(&mut points, &ear(5, 1), &lift1);
    hexes.push(vec![ia, b1, ic, d1, e1, f1]);

    // Hexagon 2: corners A (own), C (shared), E (shared); plane of lift2.
    let a2 = push3(&mut points, &own_a, &lift2);
    let b2 = push3(&mut points, &ear(1, 2), &lift2);
    let d2 = push3(&mut points, &ear(3, 2), &lift2);
    let f2 = push3(&mut points, &ear(5, 2), &lift2);
    hexes.push(vec![a2, b2, ic, d2, ie, f2]);

    // Distant flat copies make up the rest of the family.
    for j in 3..count {
        let step = int((j as i64) - 2);
        let (jx, jy) = small_jitter(&mut rng);
        let dx = int(40) * &step + jx;
        let dy = int(25) * &step + jy;
        let base = points.len();
        points.extend(translated_template(&dx, &dy));
        hexes.push((base..base + 6).collect());
    }

    let mut family = finish_stack_family(points, hexes, params)?;
    family.set_metadata("construction", "hexagon-stack");
    family.set_metadata("count", &count.to_string());
    family.set_metadata("seed", &seed.to_string());
    family.set_metadata("c-sq", &params.c_sq().to_string());
    family.set_metadata("cos-alpha", &params.cos_alpha().to_string());
    Ok(family)
}

/// The negative control for the pipeline: `count` pairwise disjoint flat
/// template copies, all fat, sharing no points and no bad pairs.
pub fn scattered_hexagons(
    count: usize,
    params: &FatnessParams,
    seed: u64,
) -> Result<Family, ConstructError> {
    if count == 0 {
        return Err(ConstructError::InvalidParameter(
            "scattered-hexagons needs count >= 1".into(),
        ));
    }
    stack_param_check(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point3> = Vec::new();
    let mut hexes: Vec<Vec<usize>> = Vec::with_capacity(count);
    for j in 0..count {
        let step = int(j as i64);
        let (jx, jy) = small_jitter(&mut rng);
        let dx = int(40) * &step + jx;
        let dy = int(25) * &step + jy;
        let base = points.len();
        points.extend(translated_template(&dx, &dy));
        hexes.push((base..base + 6).collect());
    }
    let mut family = finish_stack_family(points, hexes, params)?;
    family.set_metadata("construction", "scattered-hexagons");
    family.set_metadata("count", &count.to_string());
    family.set_metadata("seed", &seed.to_string());
    Ok(family)
}
