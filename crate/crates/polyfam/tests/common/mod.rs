//! Shared support for the integration suites.
//!
//! Two things live here:
//!
//!  * an *independent* exact intersection oracle for pairs of convex planar
//!    polygons, built from first principles (candidate boundary points plus
//!    convex-hull reasoning) with its own vector arithmetic, so that
//!    `classify_pair` can be checked against code that shares none of its
//!    logic;
//!  * deterministic random generators for triangle pairs, fat hexagons,
//!    rational plane rotations, and rational space rotations (via integer
//!    quaternions), all driven by a seeded ChaCha stream.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use polyfam::certified::{angle_from_squared_cosine, atan_interval};
use polyfam::classify::satisfies;
use polyfam::kernel::squared_cosine;
use polyfam::model::{fat_triples, is_fat_hexagon, validate_polygon};
use polyfam::pipeline::{fatness_transfer, ProjectionSpec};
use polyfam::scalar::{int, ratio};
use polyfam::{
    classify_pair, ConvexPlanarPolygon, FatnessParams, IntersectionShape, PairClassification,
    Point3, PointSet, Relation, Scalar, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Minimal exact vector arithmetic, deliberately separate from the library's.
// ---------------------------------------------------------------------------

pub type V3 = [Scalar; 3];

pub fn v3(p: &Point3) -> V3 {
    [p.x.clone(), p.y.clone(), p.z.clone()]
}

pub fn vsub(a: &V3, b: &V3) -> V3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn vadd(a: &V3, b: &V3) -> V3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn vscale(a: &V3, s: &Scalar) -> V3 {
    [&a[0] * s, &a[1] * s, &a[2] * s]
}

pub fn vcross(a: &V3, b: &V3) -> V3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn vdot(a: &V3, b: &V3) -> Scalar {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn vzero(a: &V3) -> bool {
    a[0].is_zero() && a[1].is_zero() && a[2].is_zero()
}

// ---------------------------------------------------------------------------
// The oracle polygon: raw vertex loop + plane normal, with a point locator.
// ---------------------------------------------------------------------------

pub struct OraclePolygon {
    pub indices: Vec<usize>,
    pub pts: Vec<V3>,
    pub normal: V3,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrLoc {
    Outside,
    Boundary,
    Interior,
}

impl OraclePolygon {
    pub fn new(ps: &PointSet, poly: &ConvexPlanarPolygon) -> OraclePolygon {
        let indices = poly.vertices().to_vec();
        let pts: Vec<V3> = indices.iter().map(|&i| v3(ps.get(i))).collect();
        OraclePolygon::from_pts(indices, pts)
    }

    pub fn from_pts(indices: Vec<usize>, pts: Vec<V3>) -> OraclePolygon {
        assert!(pts.len() >= 3, "oracle polygon needs >= 3 vertices");
        let normal = vcross(&vsub(&pts[1], &pts[0]), &vsub(&pts[2], &pts[0]));
        assert!(!vzero(&normal), "oracle polygon has collinear start");
        OraclePolygon {
            indices,
            pts,
            normal,
        }
    }

    pub fn plane_eval(&self, x: &V3) -> Scalar {
        vdot(&self.normal, &vsub(x, &self.pts[0]))
    }

    /// Exact location of a point relative to the closed polygon. Relies only
    /// on plane membership plus one orientation sign per edge; for a strictly
    /// convex loop a zero edge sign together with non-negative signs
    /// everywhere else puts the point on that edge's closed extent.
    pub fn locate(&self, x: &V3) -> OrLoc {
        if !self.plane_eval(x).is_zero() {
            return OrLoc::Outside;
        }
        let k = self.pts.len();
        let mut on_boundary = false;
        for i in 0..k {
            let a = &self.pts[i];
            let b = &self.pts[(i + 1) % k];
            let s = vdot(&vcross(&vsub(b, a), &vsub(x, a)), &self.normal);
            if s.is_negative() {
                return OrLoc::Outside;
            }
            if s.is_zero() {
                on_boundary = true;
            }
        }
        if on_boundary {
            OrLoc::Boundary
        } else {
            OrLoc::Interior
        }
    }

    /// Checks that the vertex loop really is strictly convex and
    /// counter-clockwise with respect to its own start normal.
    pub fn is_strictly_convex(&self) -> bool {
        let k = self.pts.len();
        (0..k).all(|i| {
            let a = &self.pts[i];
            let b = &self.pts[(i + 1) % k];
            let c = &self.pts[(i + 2) % k];
            vdot(&vcross(&vsub(b, a), &vsub(c, b)), &self.normal).is_positive()
        })
    }
}

// ---------------------------------------------------------------------------
// Exact segment/segment and segment/plane intersection helpers.
// ---------------------------------------------------------------------------

/// All intersection points of the closed segments `[p1,q1]` and `[p2,q2]`
/// that are needed as hull candidates: the single transversal point, or the
/// two endpoints of the collinear overlap.
pub fn seg_seg(p1: &V3, q1: &V3, p2: &V3, q2: &V3) -> Vec<V3> {
    let d1 = vsub(q1, p1);
    let d2 = vsub(q2, p2);
    let r = vsub(p2, p1);
    let n = vcross(&d1, &d2);
    if vzero(&n) {
        // Parallel. Distinct parallel lines never meet.
        if !vzero(&vcross(&d1, &r)) {
            return vec![];
        }
        // Collinear: clip the second segment's parameter range onto the first.
        let den = vdot(&d1, &d1);
        let ta = vdot(&vsub(p2, p1), &d1) / &den;
        let tb = vdot(&vsub(q2, p1), &d1) / &den;
        let (mut lo, mut hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if lo < Scalar::zero() {
            lo = Scalar::zero();
        }
        if hi > Scalar::one() {
            hi = Scalar::one();
        }
        if lo > hi {
            return vec![];
        }
        let a = vadd(p1, &vscale(&d1, &lo));
        let b = vadd(p1, &vscale(&d1, &hi));
        if a == b {
            return vec![a];
        }
        return vec![a, b];
    }
    // Non-parallel lines meet only if coplanar.
    if !vdot(&r, &n).is_zero() {
        return vec![];
    }
    let nn = vdot(&n, &n);
    let s = vdot(&vcross(&r, &d2), &n) / &nn;
    let t = vdot(&vcross(&r, &d1), &n) / &nn;
    let unit = Scalar::zero()..=Scalar::one();
    if unit.contains(&s) && unit.contains(&t) {
        vec![vadd(p1, &vscale(&d1, &s))]
    } else {
        vec![]
    }
}

/// Intersection points of the segment `[a,b]` with the supporting plane of
/// `poly` (not yet clipped to the polygon itself). A segment inside the plane
/// contributes its endpoints.
pub fn seg_plane(a: &V3, b: &V3, poly: &OraclePolygon) -> Vec<V3> {
    let da = poly.plane_eval(a);
    let db = poly.plane_eval(b);
    match (da.is_zero(), db.is_zero()) {
        (true, true) => vec![a.clone(), b.clone()],
        (true, false) => vec![a.clone()],
        (false, true) => vec![b.clone()],
        (false, false) => {
            if da.is_positive() == db.is_positive() {
                vec![]
            } else {
                let t = &da / (&da - &db);
                vec![vadd(a, &vscale(&vsub(b, a), &t))]
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The oracle classification itself.
// ---------------------------------------------------------------------------

pub struct OracleClassification {
    /// Affine dimension of the intersection: -1 empty, 0 point, 1 segment,
    /// 2 region.
    pub dim: i64,
    /// The single intersection point when `dim == 0`.
    pub single: Option<V3>,
    /// The two segment endpoints when `dim == 1`.
    pub seg_ends: Option<(V3, V3)>,
    /// Deduplicated candidate points; every candidate lies in both hulls and
    /// every vertex of the true intersection appears among them.
    pub candidates: Vec<V3>,
    pub shared_vertices: Vec<usize>,
    pub shared_full_edges: usize,
    pub interior_contact: bool,
}

fn push_unique(cands: &mut Vec<V3>, p: V3) {
    if !cands.contains(&p) {
        cands.push(p);
    }
}

/// Unordered consecutive index pairs of a polygon, computed directly from the
/// vertex loop.
fn undirected_edges(poly: &ConvexPlanarPolygon) -> Vec<(usize, usize)> {
    let vs = poly.vertices();
    let k = vs.len();
    (0..k)
        .map(|i| {
            let a = vs[i];
            let b = vs[(i + 1) % k];
            (a.min(b), a.max(b))
        })
        .collect()
}

pub fn oracle_classify(
    ps: &PointSet,
    pa: &ConvexPlanarPolygon,
    pb: &ConvexPlanarPolygon,
) -> OracleClassification {
    let a = OraclePolygon::new(ps, pa);
    let b = OraclePolygon::new(ps, pb);
    assert!(a.is_strictly_convex(), "polygon A not strictly convex");
    assert!(b.is_strictly_convex(), "polygon B not strictly convex");

    // Candidate points. Every vertex of conv(A) ∩ conv(B) is a vertex of one
    // polygon inside the other, or a boundary crossing: either two edges
    // meeting, or an edge of one passing through the other's supporting plane
    // inside that polygon. All candidates collected lie in both hulls, so
    // the convex hull of the candidates is exactly the intersection.
    let mut cands: Vec<V3> = Vec::new();
    for v in &a.pts {
        if b.locate(v) != OrLoc::Outside {
            push_unique(&mut cands, v.clone());
        }
    }
    for v in &b.pts {
        if a.locate(v) != OrLoc::Outside {
            push_unique(&mut cands, v.clone());
        }
    }
    let ka = a.pts.len();
    let kb = b.pts.len();
    for i in 0..ka {
        let (a0, a1) = (&a.pts[i], &a.pts[(i + 1) % ka]);
        for j in 0..kb {
            let (b0, b1) = (&b.pts[j], &b.pts[(j + 1) % kb]);
            for p in seg_seg(a0, a1, b0, b1) {
                push_unique(&mut cands, p);
            }
        }
        for p in seg_plane(a0, a1, &b) {
            if b.locate(&p) != OrLoc::Outside {
                push_unique(&mut cands, p);
            }
        }
    }
    for j in 0..kb {
        let (b0, b1) = (&b.pts[j], &b.pts[(j + 1) % kb]);
        for p in seg_plane(b0, b1, &a) {
            if a.locate(&p) != OrLoc::Outside {
                push_unique(&mut cands, p);
            }
        }
    }

    // Affine dimension of the candidate set.
    let dim: i64 = if cands.is_empty() {
        -1
    } else if cands.len() == 1 {
        0
    } else {
        let d = vsub(&cands[1], &cands[0]);
        if cands[2..]
            .iter()
            .all(|p| vzero(&vcross(&d, &vsub(p, &cands[0]))))
        {
            1
        } else {
            2
        }
    };

    let single = if dim == 0 { Some(cands[0].clone()) } else { None };
    let seg_ends = if dim == 1 {
        // Extremes along the common line direction.
        let d = vsub(&cands[1], &cands[0]);
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        let mut lo_v = vdot(&lo, &d);
        let mut hi_v = lo_v.clone();
        for p in &cands[1..] {
            let t = vdot(p, &d);
            if t < lo_v {
                lo_v = t.clone();
                lo = p.clone();
            }
            if t > hi_v {
                hi_v = t;
                hi = p.clone();
            }
        }
        Some((lo, hi))
    } else {
        None
    };

    // Shared combinatorial structure, from the index lists alone.
    let mut shared_vertices: Vec<usize> = pa
        .vertices()
        .iter()
        .copied()
        .filter(|v| pb.vertices().contains(v))
        .collect();
    shared_vertices.sort_unstable();
    let eb = undirected_edges(pb);
    let shared_full_edges = undirected_edges(pa)
        .into_iter()
        .filter(|e| eb.contains(e))
        .count();

    // Interior contact: does the intersection touch the relative interior of
    // either polygon? dim 2 forces it; for a segment it suffices to test the
    // midpoint (the relint part of a chord of a convex polygon, if nonempty,
    // is the whole open chord); for a point, the point itself.
    let interior_contact = match dim {
        2 => true,
        1 => {
            let (lo, hi) = seg_ends.as_ref().unwrap();
            let mid = vscale(&vadd(lo, hi), &ratio(1, 2));
            a.locate(&mid) == OrLoc::Interior || b.locate(&mid) == OrLoc::Interior
        }
        0 => {
            let p = single.as_ref().unwrap();
            a.locate(p) == OrLoc::Interior || b.locate(p) == OrLoc::Interior
        }
        _ => false,
    };

    OracleClassification {
        dim,
        single,
        seg_ends,
        candidates: cands,
        shared_vertices,
        shared_full_edges,
        interior_contact,
    }
}

/// The three relation verdicts recomputed from the oracle's own data.
pub fn oracle_satisfies(relation: Relation, oc: &OracleClassification) -> bool {
    let single_shared_vertex = oc.dim == 0 && oc.shared_vertices.len() == 1;
    match relation {
        Relation::AlmostDisjoint => oc.dim < 0 || single_shared_vertex,
        // A shared full edge pins a one-dimensional intersection exactly:
        // the segment lies on the edge's supporting line, and a strictly
        // convex polygon meets that line in the edge alone.
        Relation::VertexOrEdge => {
            oc.dim < 0 || single_shared_vertex || (oc.dim == 1 && oc.shared_full_edges >= 1)
        }
        Relation::NoBadIntersection => !(!oc.shared_vertices.is_empty() && oc.interior_contact),
    }
}

/// Compares `classify_pair` against the oracle on every observable: shared
/// vertex set, shared full edges, interior contact, intersection dimension
/// and geometry, and all three relation verdicts. Returns a description of
/// the first disagreement.
pub fn check_pair_against_oracle(
    ps: &PointSet,
    pa: &ConvexPlanarPolygon,
    pb: &ConvexPlanarPolygon,
) -> Result<PairClassification, String> {
    let main = classify_pair(ps, pa, pb).map_err(|e| format!("classify_pair failed: {e}"))?;
    let oc = oracle_classify(ps, pa, pb);

    if main.shared_vertices != oc.shared_vertices {
        return Err(format!(
            "shared vertices: library {:?} vs oracle {:?}",
            main.shared_vertices, oc.shared_vertices
        ));
    }
    if main.shared_full_edges != oc.shared_full_edges {
        return Err(format!(
            "shared full edges: library {} vs oracle {}",
            main.shared_full_edges, oc.shared_full_edges
        ));
    }
    if main.interior_contact != oc.interior_contact {
        return Err(format!(
            "interior contact: library {} vs oracle {}",
            main.interior_contact, oc.interior_contact
        ));
    }

    match &main.shape {
        IntersectionShape::Empty => {
            if oc.dim != -1 {
                return Err(format!("library Empty but oracle dim {}", oc.dim));
            }
        }
        IntersectionShape::SinglePoint(p) => {
            if oc.dim != 0 {
                return Err(format!("library SinglePoint but oracle dim {}", oc.dim));
            }
            if &v3(p) != oc.single.as_ref().unwrap() {
                return Err("single point differs from oracle".into());
            }
        }
        IntersectionShape::Segment(s) => {
            if oc.dim != 1 {
                return Err(format!("library Segment but oracle dim {}", oc.dim));
            }
            let (lo, hi) = oc.seg_ends.as_ref().unwrap();
            let (ma, mb) = (v3(&s.a), v3(&s.b));
            let same = (&ma == lo && &mb == hi) || (&ma == hi && &mb == lo);
            if !same {
                return Err("segment endpoints differ from oracle".into());
            }
        }
        IntersectionShape::Region(vs) => {
            if oc.dim != 2 {
                return Err(format!("library Region but oracle dim {}", oc.dim));
            }
            if vs.len() < 3 {
                return Err(format!("region with only {} vertices", vs.len()));
            }
            // Every reported region vertex must be a known candidate, the
            // region loop must be strictly convex, and every candidate must
            // lie inside it; together these pin the region exactly.
            let raw: Vec<V3> = vs.iter().map(v3).collect();
            for p in &raw {
                if !oc.candidates.contains(p) {
                    return Err("region vertex is not an oracle candidate".into());
                }
            }
            let loop_poly = OraclePolygon::from_pts((0..raw.len()).collect(), raw);
            if !loop_poly.is_strictly_convex() {
                return Err("region loop not strictly convex".into());
            }
            for c in &oc.candidates {
                if loop_poly.locate(c) == OrLoc::Outside {
                    return Err("oracle candidate falls outside reported region".into());
                }
            }
        }
    }

    for &r in Relation::ALL.iter() {
        if satisfies(r, &main) != oracle_satisfies(r, &oc) {
            return Err(format!(
                "verdict under {} disagrees with oracle ({} vs {})",
                r.name(),
                satisfies(r, &main),
                oracle_satisfies(r, &oc)
            ));
        }
    }
    Ok(main)
}

// ---------------------------------------------------------------------------
// Random generators.
// ---------------------------------------------------------------------------

/// Appends a point, reusing the index of an existing equal point.
pub fn push_point(pts: &mut Vec<Point3>, p: Point3) -> usize {
    if let Some(i) = pts.iter().position(|q| q == &p) {
        i
    } else {
        pts.push(p);
        pts.len() - 1
    }
}

pub fn random_lattice_point(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Point3 {
    Point3::from_i64(
        rng.gen_range(lo..=hi),
        rng.gen_range(lo..=hi),
        rng.gen_range(lo..=hi),
    )
}

/// A random pair of distinct triangles with coordinates in `{-3..3}^3`.
/// Mixes four strategies so degenerate contacts stay frequent: independent
/// triangles, one forced shared vertex, one forced shared edge, and a small
/// translate of the first triangle. Returns `None` when a sample degenerates
/// (collinear triple, repeated index, identical triangles); callers resample.
pub fn random_triangle_pair(
    rng: &mut ChaCha8Rng,
) -> Option<(PointSet, ConvexPlanarPolygon, ConvexPlanarPolygon)> {
    let mut pts: Vec<Point3> = Vec::new();
    let mut ia = Vec::with_capacity(3);
    for _ in 0..3 {
        let p = random_lattice_point(rng, -3, 3);
        ia.push(push_point(&mut pts, p));
    }
    let mode = rng.gen_range(0..4);
    let mut ib = Vec::with_capacity(3);
    match mode {
        0 => {
            for _ in 0..3 {
                ib.push(push_point(&mut pts, random_lattice_point(rng, -3, 3)));
            }
        }
        1 => {
            ib.push(ia[0]);
            for _ in 0..2 {
                ib.push(push_point(&mut pts, random_lattice_point(rng, -3, 3)));
            }
        }
        2 => {
            ib.push(ia[0]);
            ib.push(ia[1]);
            ib.push(push_point(&mut pts, random_lattice_point(rng, -3, 3)));
        }
        _ => {
            let d = random_lattice_point(rng, -2, 2);
            for &i in &ia {
                let p = pts[i].clone();
                let q = Point3::new(&p.x + &d.x, &p.y + &d.y, &p.z + &d.z);
                ib.push(push_point(&mut pts, q));
            }
        }
    }
    let mut sa = ia.clone();
    let mut sb = ib.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    sa.dedup();
    sb.dedup();
    if sa.len() != 3 || sb.len() != 3 || sa == sb {
        return None;
    }
    let ps = PointSet::new(pts).ok()?;
    let pa = validate_polygon(&ps, &ia).ok()?;
    let pb = validate_polygon(&ps, &ib).ok()?;
    Some((ps, pa, pb))
}

// ---------------------------------------------------------------------------
// Fat hexagons: a jittered template moved by rational similarities and
// rational space rotations.
// ---------------------------------------------------------------------------

/// A convex hexagon with sides (5, 5, sqrt 26, sqrt 29, sqrt 29, sqrt 26):
/// side ratio about 1.08, `|cos|` at the odd positions at most 0.28 and at
/// the even positions at most 0.75, leaving generous jitter margins.
pub const HEX_TEMPLATE: [(i64, i64); 6] = [(0, 0), (4, -3), (8, 0), (9, 5), (4, 7), (-1, 5)];

/// The template with every coordinate independently shifted by `j/32`,
/// `j` uniform in `-8..=8`.
pub fn jittered_template_2d(rng: &mut ChaCha8Rng) -> Vec<(Scalar, Scalar)> {
    HEX_TEMPLATE
        .iter()
        .map(|&(x, y)| {
            (
                int(x) + ratio(rng.gen_range(-8..=8), 32),
                int(y) + ratio(rng.gen_range(-8..=8), 32),
            )
        })
        .collect()
}

/// The rational point `((1-t^2)/(1+t^2), 2t/(1+t^2))` on the unit circle,
/// at angle `2*atan(t)`.
pub fn circle_point(t: &Scalar) -> (Scalar, Scalar) {
    let t2 = t * t;
    let den = Scalar::one() + &t2;
    ((Scalar::one() - &t2) / &den, (int(2) * t) / &den)
}

/// Applies a random rational similarity (rotation by a circle point composed
/// with a quarter-turn, scale from a small menu, translation on a quarter
/// grid) to a list of 2D points.
pub fn random_similarity_2d(
    rng: &mut ChaCha8Rng,
    verts: &[(Scalar, Scalar)],
) -> Vec<(Scalar, Scalar)> {
    let t = ratio(rng.gen_range(-9..=9), 10);
    let (c, s) = circle_point(&t);
    let quarter_turns = rng.gen_range(0..4);
    let scale = [ratio(1, 2), int(1), ratio(3, 2), int(2), int(3)][rng.gen_range(0..5)].clone();
    let tx = ratio(rng.gen_range(-40..=40), 4);
    let ty = ratio(rng.gen_range(-40..=40), 4);
    verts
        .iter()
        .map(|(x, y)| {
            let mut p = (&c * x - &s * y, &s * x + &c * y);
            for _ in 0..quarter_turns {
                p = (-p.1.clone(), p.0.clone());
            }
            (&p.0 * &scale + &tx, &p.1 * &scale + &ty)
        })
        .collect()
}

pub type Mat3 = [[Scalar; 3]; 3];

/// The exact rotation matrix of the integer quaternion `a + bi + cj + dk`.
pub fn quat_matrix(a: i64, b: i64, c: i64, d: i64) -> Option<Mat3> {
    let n = a * a + b * b + c * c + d * d;
    if n == 0 {
        return None;
    }
    let e = |num: i64| ratio(num, n);
    Some([
        [
            e(a * a + b * b - c * c - d * d),
            e(2 * (b * c - a * d)),
            e(2 * (b * d + a * c)),
        ],
        [
            e(2 * (b * c + a * d)),
            e(a * a - b * b + c * c - d * d),
            e(2 * (c * d - a * b)),
        ],
        [
            e(2 * (b * d - a * c)),
            e(2 * (c * d + a * b)),
            e(a * a - b * b - c * c + d * d),
        ],
    ])
}

/// An arbitrary rational rotation from a small random integer quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    loop {
        if let Some(m) = quat_matrix(
            rng.gen_range(-9..=9),
            rng.gen_range(-9..=9),
            rng.gen_range(-9..=9),
            rng.gen_range(-9..=9),
        ) {
            return m;
        }
    }
}

/// A rotation biased toward a small angle (dominant real part), keeping the
/// rotated plane close to horizontal.
pub fn small_tilt_rotation(rng: &mut ChaCha8Rng) -> Mat3 {
    quat_matrix(
        rng.gen_range(12..=20),
        rng.gen_range(-4..=4),
        rng.gen_range(-4..=4),
        rng.gen_range(-4..=4),
    )
    .expect("nonzero real part")
}

pub fn apply_rotation(m: &Mat3, x: &Scalar, y: &Scalar, z: &Scalar) -> (Scalar, Scalar, Scalar) {
    (
        &m[0][0] * x + &m[0][1] * y + &m[0][2] * z,
        &m[1][0] * x + &m[1][1] * y + &m[1][2] * z,
        &m[2][0] * x + &m[2][1] * y + &m[2][2] * z,
    )
}

/// Embeds planar vertices at `z = 0`, applies a rotation, then translates.
pub fn embed_2d(
    verts: &[(Scalar, Scalar)],
    rot: &Mat3,
    translate: &(Scalar, Scalar, Scalar),
) -> Vec<Point3> {
    let zero = Scalar::zero();
    verts
        .iter()
        .map(|(x, y)| {
            let (rx, ry, rz) = apply_rotation(rot, x, y, &zero);
            Point3::new(rx + &translate.0, ry + &translate.1, rz + &translate.2)
        })
        .collect()
}

/// Builds a validated hexagon over its own six-point set.
pub fn hexagon_polygon(pts: Vec<Point3>) -> Option<(PointSet, ConvexPlanarPolygon)> {
    let ps = PointSet::new(pts).ok()?;
    let poly = validate_polygon(&ps, &[0, 1, 2, 3, 4, 5]).ok()?;
    Some((ps, poly))
}

/// A random `(c, cos_alpha)` pair from menus that the jittered template
/// satisfies with margin most of the time.
pub fn random_fat_menu(rng: &mut ChaCha8Rng) -> (Scalar, Scalar) {
    let c = [ratio(3, 2), int(2), ratio(5, 2), int(3)][rng.gen_range(0..4)].clone();
    let ca = [ratio(2, 5), ratio(1, 2), ratio(3, 5), ratio(7, 10)][rng.gen_range(0..4)].clone();
    (c, ca)
}

/// Largest and smallest squared side length of a polygon.
pub fn side_sq_extremes(ps: &PointSet, poly: &ConvexPlanarPolygon) -> (Scalar, Scalar) {
    let vs = poly.vertices();
    let k = vs.len();
    let mut min_sq: Option<Scalar> = None;
    let mut max_sq: Option<Scalar> = None;
    for i in 0..k {
        let a = v3(ps.get(vs[i]));
        let b = v3(ps.get(vs[(i + 1) % k]));
        let d = vsub(&b, &a);
        let len = vdot(&d, &d);
        if min_sq.as_ref().map_or(true, |m| &len < m) {
            min_sq = Some(len.clone());
        }
        if max_sq.as_ref().map_or(true, |m| &len > m) {
            max_sq = Some(len);
        }
    }
    (min_sq.unwrap(), max_sq.unwrap())
}

/// Whether all pairwise side ratios are at most `c` (exactly, on squares).
pub fn pairwise_side_ratio_at_most(ps: &PointSet, poly: &ConvexPlanarPolygon, c: &Scalar) -> bool {
    let (min_sq, max_sq) = side_sq_extremes(ps, poly);
    max_sq <= c * c * min_sq
}

// ---------------------------------------------------------------------------
// Reusable property runners. The focused suites and the acceptance gate run
// the same properties at different trial counts.
// ---------------------------------------------------------------------------

/// A fresh random fat hexagon in space with its parameters and the ratio
/// bound `c`. The hexagon passes `is_fat_hexagon` and additionally keeps
/// every pairwise side ratio at most `c` (stronger than fatness requires,
/// and exactly what the corner-angle floor needs).
pub fn random_fat_hexagon(
    r: &mut ChaCha8Rng,
    small_tilt: bool,
) -> Option<(PointSet, ConvexPlanarPolygon, FatnessParams, Scalar)> {
    let (c, ca) = random_fat_menu(r);
    let jittered = jittered_template_2d(r);
    let verts2 = random_similarity_2d(r, &jittered);
    let rot = if small_tilt {
        small_tilt_rotation(r)
    } else {
        random_rotation(r)
    };
    let tr = (
        int(r.gen_range(-9..=9)),
        int(r.gen_range(-9..=9)),
        int(r.gen_range(-9..=9)),
    );
    let (ps, poly) = hexagon_polygon(embed_2d(&verts2, &rot, &tr))?;
    let params = FatnessParams::new(&c, &ca).ok()?;
    if !is_fat_hexagon(&ps, &poly, &params).ok()? {
        return None;
    }
    if !pairwise_side_ratio_at_most(&ps, &poly, &c) {
        return None;
    }
    Some((ps, poly, params, c))
}

/// A certified lower bound for the corner angles of a `(c, alpha)`-fat
/// hexagon whose pairwise side ratios stay at most `c`:
/// `atan(sin alpha / (c + cos alpha)) - 1e-9`, rounded safely upward before
/// the slack is subtracted.
pub fn certified_angle_floor(params: &FatnessParams, bits: u32) -> Result<Scalar, String> {
    let t = fatness_transfer(params, &Scalar::one(), bits).map_err(|e| e.to_string())?;
    let upper = atan_interval(t.tan_phi_max_bounds.hi(), bits);
    Ok(upper.hi() - ratio(1, 1_000_000_000))
}

/// The angle-floor property on `n` random fat hexagons: in each corner
/// triangle (corner, fat vertex, corner) both corner angles have certified
/// enclosures whose lower ends clear the floor.
pub fn phi_bound_trials(n: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let mut accepted = 0usize;
    let mut guard = 0usize;
    while accepted < n {
        guard += 1;
        if guard > 60 * n + 1000 {
            return Err("fat hexagon generator starved".into());
        }
        let Some((ps, poly, params, _)) = random_fat_hexagon(&mut r, false) else {
            continue;
        };
        let floor = certified_angle_floor(&params, 96)?;
        let (t024, _) = fat_triples(&ps, &poly, &params).map_err(|e| e.to_string())?;
        let ear_start = if t024 { 0 } else { 1 };
        for t in 0..3 {
            let ear = (ear_start + 2 * t) % 6;
            for (corner, other) in [((ear + 5) % 6, (ear + 1) % 6), ((ear + 1) % 6, (ear + 5) % 6)]
            {
                let vc = ps.get(poly.vertices()[corner]);
                let ve = ps.get(poly.vertices()[ear]);
                let vo = ps.get(poly.vertices()[other]);
                let (sq, sign) =
                    squared_cosine(&ve.sub(vc), &vo.sub(vc)).map_err(|e| e.to_string())?;
                let ang = angle_from_squared_cosine(&sq, sign, 96).map_err(|e| e.to_string())?;
                if ang.lo() < &floor {
                    return Err(format!(
                        "hexagon {accepted}: corner angle enclosure [{}, {}] dips below \
                         the certified floor {floor}",
                        ang.lo(),
                        ang.hi()
                    ));
                }
            }
        }
        accepted += 1;
    }
    Ok(())
}

/// The projection property on `n` random (fat hexagon, tilt) pairs whose
/// tilt stays inside the transfer domain: the vertical-projection image
/// passes `is_fat_hexagon` under the transferred parameters.
pub fn projection_fatness_trials(n: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let mut accepted = 0usize;
    let mut guard = 0usize;
    while accepted < n {
        guard += 1;
        if guard > 400 * n + 1000 {
            return Err("in-domain tilt generator starved".into());
        }
        let small = accepted % 2 == 0;
        let Some((ps, poly, params, _)) = random_fat_hexagon(&mut r, small) else {
            continue;
        };
        let vertical = Vec3::from_i64(0, 0, 1);
        let (cos_sq, _) =
            squared_cosine(poly.plane().normal(), &vertical).map_err(|e| e.to_string())?;
        let transferred = match params.transfer(&cos_sq) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let spec = ProjectionSpec::vertical();
        let flat: Vec<Point3> = poly
            .vertices()
            .iter()
            .map(|&i| {
                let (u, w) = spec.project(ps.get(i));
                Point3::new(u, w, Scalar::zero())
            })
            .collect();
        let Some((fps, fpoly)) = hexagon_polygon(flat) else {
            return Err(format!("trial {accepted}: projected hexagon is degenerate"));
        };
        if !is_fat_hexagon(&fps, &fpoly, &transferred).map_err(|e| e.to_string())? {
            return Err(format!(
                "trial {accepted}: projected hexagon fails the transferred fatness test"
            ));
        }
        accepted += 1;
    }
    Ok(())
}

/// Runs `n` accepted random triangle pairs through the oracle comparison,
/// tallying intersection dimensions as (empty, point, segment, region).
pub fn classifier_oracle_trials(n: usize, seed: u64) -> Result<[usize; 4], String> {
    let mut r = rng(seed);
    let mut counts = [0usize; 4];
    let mut accepted = 0usize;
    let mut guard = 0usize;
    while accepted < n {
        guard += 1;
        if guard > 40 * n + 1000 {
            return Err("triangle pair generator starved".into());
        }
        let Some((ps, pa, pb)) = random_triangle_pair(&mut r) else {
            continue;
        };
        let main = check_pair_against_oracle(&ps, &pa, &pb).map_err(|e| {
            format!(
                "pair #{accepted} ({:?} vs {:?}): {e}",
                pa.vertices(),
                pb.vertices()
            )
        })?;
        let slot = match main.shape.dimension() {
            None => 0,
            Some(d) => d as usize + 1,
        };
        counts[slot] += 1;
        accepted += 1;
    }
    Ok(counts)
}
