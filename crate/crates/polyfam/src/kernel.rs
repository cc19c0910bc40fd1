//! Exact geometric kernel: points, planes, and convex intersection predicates.
//!
//! Every predicate is decided in rational arithmetic; there are no epsilons
//! anywhere in this module. Geometric objects carry canonical forms so that
//! equal objects compare equal structurally:
//!
//! * [`Plane`] is stored as an integer equation `n·x = offset` with content 1
//!   and the first nonzero normal component positive;
//! * [`IntersectionShape::Segment`] endpoints are lexicographically sorted;
//! * [`IntersectionShape::Region`] vertices are counterclockwise with respect
//!   to the canonical plane normal, starting at the lexicographically least
//!   vertex.
//!
//! Polygon-valued arguments are vertex slices that must describe a strictly
//! convex planar polygon, counterclockwise with respect to the canonical
//! normal of its supporting plane, as produced by
//! [`crate::model::validate_polygon`].

use crate::scalar::{int, sgn, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("need at least three points spanning a plane")]
    CollinearPoints,
    #[error("points are not coplanar")]
    NotCoplanar,
}

/// A point of 3-space with rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

/// A displacement vector with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl fmt::Debug for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.x, self.y, self.z)
    }
}

impl fmt::Debug for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} {} {}>", self.x, self.y, self.z)
    }
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        Point3::new(int(x), int(y), int(z))
    }

    pub fn origin() -> Self {
        Point3::from_i64(0, 0, 0)
    }

    pub fn sub(&self, other: &Point3) -> Vec3 {
        Vec3 {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
            z: &self.z - &other.z,
        }
    }

    pub fn add(&self, v: &Vec3) -> Point3 {
        Point3 {
            x: &self.x + &v.x,
            y: &self.y + &v.y,
            z: &self.z + &v.z,
        }
    }

    /// The point `self + t·(other - self)`.
    pub fn lerp(&self, other: &Point3, t: &Scalar) -> Point3 {
        self.add(&other.sub(self).scaled(t))
    }
}

impl Vec3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Self {
        Vec3::new(int(x), int(y), int(z))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn dot(&self, other: &Vec3) -> Scalar {
        &self.x * &other.x + &self.y * &other.y + &self.z * &other.z
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3 {
            x: &self.y * &other.z - &self.z * &other.y,
            y: &self.z * &other.x - &self.x * &other.z,
            z: &self.x * &other.y - &self.y * &other.x,
        }
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn scaled(&self, t: &Scalar) -> Vec3 {
        Vec3 {
            x: &self.x * t,
            y: &self.y * t,
            z: &self.z * t,
        }
    }

    pub fn add(&self, other: &Vec3) -> Vec3 {
        Vec3 {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            z: &self.z + &other.z,
        }
    }

    pub fn neg(&self) -> Vec3 {
        Vec3 {
            x: -&self.x,
            y: -&self.y,
            z: -&self.z,
        }
    }
}

/// Orientation of `d` relative to the plane spanned by `a`, `b`, `c`:
/// the sign of `det(b-a, c-a, d-a)`. Positive means `d` lies on the side a
/// right-handed normal of the ordered triangle points to; zero means the four
/// points are coplanar.
pub fn orient3d(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> i8 {
    let u = b.sub(a);
    let v = c.sub(a);
    let w = d.sub(a);
    sgn(&u.cross(&v).dot(&w))
}

/// A plane `normal · x = offset` in canonical integer form: the coordinates of
/// `normal` and `offset` are coprime integers and the first nonzero normal
/// component is positive. Two equal planes always compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Plane {
    normal: Vec3,
    offset: Scalar,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}x + {}y + {}z = {}]",
            self.normal.x, self.normal.y, self.normal.z, self.offset
        )
    }
}

impl Plane {
    /// Builds the canonical form of the plane `n·x = offset`.
    pub fn from_normal_offset(n: Vec3, offset: Scalar) -> Result<Plane, KernelError> {
        if n.is_zero() {
            return Err(KernelError::ZeroVector);
        }
        // Clear denominators, divide by the content, then fix the sign.
        let lcm_den = [&n.x, &n.y, &n.z, &offset]
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = [&n.x, &n.y, &n.z, &offset]
            .iter()
            .map(|q| q.numer() * (&lcm_den / q.denom()))
            .collect();
        let content = ints
            .iter()
            .fold(BigInt::zero(), |acc, v| acc.gcd(v));
        debug_assert!(!content.is_zero());
        let mut ints: Vec<BigInt> = ints.into_iter().map(|v| v / &content).collect();
        let flip = ints[..3]
            .iter()
            .find(|v| !v.is_zero())
            .map(|v| v.is_negative())
            .unwrap_or(false);
        if flip {
            for v in ints.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
        let mut it = ints.into_iter().map(Scalar::from_integer);
        Ok(Plane {
            normal: Vec3::new(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            ),
            offset: it.next().unwrap(),
        })
    }

    pub fn normal(&self) -> &Vec3 {
        &self.normal
    }

    pub fn offset(&self) -> &Scalar {
        &self.offset
    }

    /// `normal · p - offset`; zero exactly when `p` lies on the plane.
    pub fn eval(&self, p: &Point3) -> Scalar {
        self.normal.dot(&Vec3 {
            x: p.x.clone(),
            y: p.y.clone(),
            z: p.z.clone(),
        }) - &self.offset
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.eval(p).is_zero()
    }

    /// True when the normals are parallel (equal or opposite planes' direction).
    pub fn parallel_to(&self, other: &Plane) -> bool {
        self.normal.cross(&other.normal).is_zero()
    }
}

/// The canonical supporting plane of a coplanar point set spanning a plane.
/// Fails if fewer than three points are given, all points are collinear, or
/// some point lies off the plane of the first spanning triple.
pub fn supporting_plane(points: &[Point3]) -> Result<Plane, KernelError> {
    if points.len() < 3 {
        return Err(KernelError::CollinearPoints);
    }
    let a = &points[0];
    let mut normal = None;
    for i in 1..points.len() {
        for j in (i + 1)..points.len() {
            let n = points[i].sub(a).cross(&points[j].sub(a));
            if !n.is_zero() {
                normal = Some(n);
                break;
            }
        }
        if normal.is_some() {
            break;
        }
    }
    let n = normal.ok_or(KernelError::CollinearPoints)?;
    let offset = n.dot(&a.sub(&Point3::origin()));
    let plane = Plane::from_normal_offset(n, offset)?;
    if points.iter().any(|p| !plane.contains(p)) {
        return Err(KernelError::NotCoplanar);
    }
    Ok(plane)
}

/// A nondegenerate closed segment.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Segment {
    pub a: Point3,
    pub b: Point3,
}

impl Segment {
    pub fn new(a: Point3, b: Point3) -> Result<Segment, KernelError> {
        if a == b {
            return Err(KernelError::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    /// Endpoints sorted lexicographically (canonical form).
    pub fn sorted(a: Point3, b: Point3) -> Result<Segment, KernelError> {
        if a <= b {
            Segment::new(a, b)
        } else {
            Segment::new(b, a)
        }
    }

    pub fn midpoint(&self) -> Point3 {
        self.a.lerp(&self.b, &crate::scalar::ratio(1, 2))
    }
}

/// Intersection of two convex compact sets, in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IntersectionShape {
    Empty,
    SinglePoint(Point3),
    Segment(Segment),
    /// A two-dimensional convex polygon: counterclockwise with respect to the
    /// canonical normal of its plane, lexicographically least vertex first.
    Region(Vec<Point3>),
}

impl IntersectionShape {
    pub fn dimension(&self) -> Option<u8> {
        match self {
            IntersectionShape::Empty => None,
            IntersectionShape::SinglePoint(_) => Some(0),
            IntersectionShape::Segment(_) => Some(1),
            IntersectionShape::Region(_) => Some(2),
        }
    }

    /// Short stable label for summaries.
    pub fn kind_name(&self) -> &'static str {
        match self {
            IntersectionShape::Empty => "empty",
            IntersectionShape::SinglePoint(_) => "single point",
            IntersectionShape::Segment(_) => "segment",
            IntersectionShape::Region(_) => "region",
        }
    }
}

impl fmt::Display for IntersectionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntersectionShape::Empty => write!(f, "empty"),
            IntersectionShape::SinglePoint(p) => write!(f, "point {:?}", p),
            IntersectionShape::Segment(s) => write!(f, "segment {:?} {:?}", s.a, s.b),
            IntersectionShape::Region(vs) => {
                write!(f, "region")?;
                for v in vs {
                    write!(f, " {:?}", v)?;
                }
                Ok(())
            }
        }
    }
}

/// Where a point lies relative to a convex planar polygon. Edge `i` joins
/// vertex `i` to vertex `i+1` (cyclically).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PointLocation {
    Outside,
    Vertex(usize),
    EdgeInterior(usize),
    RelativeInterior,
}

/// Locates `p` relative to the polygon `verts` lying in `plane`.
pub fn point_polygon_location(p: &Point3, verts: &[Point3], plane: &Plane) -> PointLocation {
    if !plane.contains(p) {
        return PointLocation::Outside;
    }
    let n = plane.normal();
    let k = verts.len();
    let mut on_edge = None;
    for i in 0..k {
        let a = &verts[i];
        let b = &verts[(i + 1) % k];
        if p == a {
            return PointLocation::Vertex(i);
        }
        let side = sgn(&b.sub(a).cross(&p.sub(a)).dot(n));
        match side {
            -1 => return PointLocation::Outside,
            0 => on_edge = Some(i),
            _ => {}
        }
    }
    match on_edge {
        // Not outside and on the line of edge `i`: strictly between its
        // endpoints (the vertex cases returned above, and a point on the edge
        // line beyond the edge is strictly right of an adjacent edge).
        Some(i) => PointLocation::EdgeInterior(i),
        None => PointLocation::RelativeInterior,
    }
}

/// Intersection of two segments in 3-space.
pub fn segment_segment_intersection(s1: &Segment, s2: &Segment) -> IntersectionShape {
    let u = s1.b.sub(&s1.a);
    let v = s2.b.sub(&s2.a);
    let w = s2.a.sub(&s1.a);
    let n = u.cross(&v);
    if !n.is_zero() {
        // Non-parallel lines; they meet only if coplanar.
        if !w.dot(&n).is_zero() {
            return IntersectionShape::Empty;
        }
        let nn = n.norm_sq();
        let s = w.cross(&v).dot(&n) / &nn;
        let t = w.cross(&u).dot(&n) / &nn;
        let zero = Scalar::zero();
        let one = Scalar::one();
        if s < zero || s > one || t < zero || t > one {
            return IntersectionShape::Empty;
        }
        return IntersectionShape::SinglePoint(s1.a.lerp(&s1.b, &s));
    }
    // Parallel lines: either disjoint or collinear.
    if !w.cross(&u).is_zero() {
        return IntersectionShape::Empty;
    }
    // Collinear: compare parameters along u.
    let uu = u.norm_sq();
    let t2a = w.dot(&u) / &uu;
    let t2b = s2.b.sub(&s1.a).dot(&u) / &uu;
    let (lo2, hi2) = if t2a <= t2b { (t2a, t2b) } else { (t2b, t2a) };
    let lo = if lo2 > Scalar::zero() { lo2 } else { Scalar::zero() };
    let hi = if hi2 < Scalar::one() { hi2 } else { Scalar::one() };
    if lo > hi {
        IntersectionShape::Empty
    } else if lo == hi {
        IntersectionShape::SinglePoint(s1.a.lerp(&s1.b, &lo))
    } else {
        let a = s1.a.lerp(&s1.b, &lo);
        let b = s1.a.lerp(&s1.b, &hi);
        IntersectionShape::Segment(Segment::sorted(a, b).expect("lo < hi"))
    }
}

/// Squared cosine of the angle between two nonzero vectors, together with the
/// sign of their dot product. The pair determines the angle exactly:
/// `cos = sign * sqrt(value)`.
pub fn squared_cosine(u: &Vec3, v: &Vec3) -> Result<(Scalar, i8), KernelError> {
    if u.is_zero() || v.is_zero() {
        return Err(KernelError::ZeroVector);
    }
    let d = u.dot(v);
    let value = &d * &d / (u.norm_sq() * v.norm_sq());
    Ok((value, sgn(&d)))
}

/// Drops the dominant coordinate of the plane normal, returning for each point
/// a pair of coordinates such that counterclockwise in the pair plane matches
/// counterclockwise around `plane.normal()`.
fn project_to_plane_coords(points: &[Point3], plane: &Plane) -> Vec<(Scalar, Scalar)> {
    let n = plane.normal();
    let ax = n.x.abs();
    let ay = n.y.abs();
    let az = n.z.abs();
    // (axis index, its sign): drop that axis, cyclic order of the other two.
    let (pick, positive) = if az >= ax && az >= ay {
        (2, !n.z.is_negative())
    } else if ay >= ax {
        (1, !n.y.is_negative())
    } else {
        (0, !n.x.is_negative())
    };
    points
        .iter()
        .map(|p| {
            let (a, b) = match pick {
                2 => (p.x.clone(), p.y.clone()),
                1 => (p.z.clone(), p.x.clone()),
                _ => (p.y.clone(), p.z.clone()),
            };
            if positive {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}

fn cross2(o: &(Scalar, Scalar), a: &(Scalar, Scalar), b: &(Scalar, Scalar)) -> Scalar {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Convex hull of coplanar points, counterclockwise with respect to the
/// canonical normal of `plane`, lexicographically least vertex first.
/// Collinear input yields the two extreme points; a single distinct point
/// yields itself.
pub fn planar_hull(points: &[Point3], plane: &Plane) -> Vec<Point3> {
    let coords = project_to_plane_coords(points, plane);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| coords[i].cmp(&coords[j]));
    order.dedup_by(|&mut i, &mut j| coords[i] == coords[j]);
    if order.len() <= 2 {
        return order.into_iter().map(|i| points[i].clone()).collect();
    }
    // Andrew's monotone chain with strict turns.
    let build = |idxs: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut chain: Vec<usize> = Vec::new();
        for i in idxs {
            while chain.len() >= 2 {
                let o = &coords[chain[chain.len() - 2]];
                let a = &coords[chain[chain.len() - 1]];
                if sgn(&cross2(o, a, &coords[i])) <= 0 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        chain
    };
    let lower = build(&mut order.iter().copied());
    let upper = build(&mut order.iter().rev().copied());
    let mut hull: Vec<usize> = lower;
    hull.pop();
    hull.extend(upper.iter().take(upper.len().saturating_sub(1)));
    if hull.len() < 2 {
        // All points collinear after strict-turn pruning.
        return vec![
            points[*order.first().unwrap()].clone(),
            points[*order.last().unwrap()].clone(),
        ];
    }
    // Monotone chain over sorted input already starts at the least vertex.
    hull.into_iter().map(|i| points[i].clone()).collect()
}

/// Classifies a coplanar point cloud known to be the vertex walk of a convex
/// intersection into its canonical shape.
fn shape_from_cloud(points: Vec<Point3>, plane: &Plane) -> IntersectionShape {
    if points.is_empty() {
        return IntersectionShape::Empty;
    }
    let hull = planar_hull(&points, plane);
    match hull.len() {
        0 => IntersectionShape::Empty,
        1 => IntersectionShape::SinglePoint(hull.into_iter().next().unwrap()),
        2 => {
            let mut it = hull.into_iter();
            let a = it.next().unwrap();
            let b = it.next().unwrap();
            IntersectionShape::Segment(Segment::sorted(a, b).expect("distinct hull points"))
        }
        _ => IntersectionShape::Region(hull),
    }
}

/// Clips the line `p0 + t·dir` (lying in the polygon's plane) against the
/// polygon, returning the parameter interval of the intersection.
fn clip_line_to_polygon(
    p0: &Point3,
    dir: &Vec3,
    verts: &[Point3],
    plane: &Plane,
) -> Option<(Scalar, Scalar)> {
    let n = plane.normal();
    let mut lo: Option<Scalar> = None;
    let mut hi: Option<Scalar> = None;
    let k = verts.len();
    for i in 0..k {
        let a = &verts[i];
        let e = verts[(i + 1) % k].sub(a);
        // Interior side: e × (x - a) · n >= 0. Along the line this is
        // c0 + t*c1 >= 0.
        let c0 = e.cross(&p0.sub(a)).dot(n);
        let c1 = e.cross(dir).dot(n);
        match sgn(&c1) {
            0 => {
                if c0.is_negative() {
                    return None;
                }
            }
            1 => {
                let bound = -c0 / &c1;
                if lo.as_ref().map_or(true, |l| bound > *l) {
                    lo = Some(bound);
                }
            }
            _ => {
                let bound = -c0 / &c1;
                if hi.as_ref().map_or(true, |h| bound < *h) {
                    hi = Some(bound);
                }
            }
        }
    }
    let lo = lo?;
    let hi = hi?;
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Sutherland–Hodgman clip of subject polygon `p` by the edges of `q`
/// (both counterclockwise in the same plane). Returns the clipped vertex walk.
fn clip_polygon_by_polygon(p: &[Point3], q: &[Point3], plane: &Plane) -> Vec<Point3> {
    let n = plane.normal();
    let mut subject: Vec<Point3> = p.to_vec();
    let kq = q.len();
    for i in 0..kq {
        if subject.is_empty() {
            break;
        }
        let a = &q[i];
        let e = q[(i + 1) % kq].sub(a);
        let eval = |x: &Point3| -> Scalar { e.cross(&x.sub(a)).dot(n) };
        let mut output: Vec<Point3> = Vec::with_capacity(subject.len() + 2);
        for j in 0..subject.len() {
            let s = &subject[j];
            let t = &subject[(j + 1) % subject.len()];
            let cs = eval(s);
            let ct = eval(t);
            let s_in = !cs.is_negative();
            let t_in = !ct.is_negative();
            if s_in {
                output.push(s.clone());
            }
            if s_in != t_in {
                // The crossing point of the edge with the clip line.
                let t_par = &cs / (&cs - &ct);
                output.push(s.lerp(t, &t_par));
            }
        }
        subject = output;
    }
    subject
}

/// Exact intersection of the convex hulls of two strictly convex planar
/// polygons in 3-space. Both vertex lists must be counterclockwise with
/// respect to the canonical normals of their supporting planes.
pub fn convex_polygon_intersection(
    p: &[Point3],
    p_plane: &Plane,
    q: &[Point3],
    q_plane: &Plane,
) -> IntersectionShape {
    if p_plane == q_plane {
        let cloud = clip_polygon_by_polygon(p, q, p_plane);
        return shape_from_cloud(cloud, p_plane);
    }
    if p_plane.parallel_to(q_plane) {
        return IntersectionShape::Empty;
    }
    // Distinct non-parallel planes: the hulls can only meet on the common line.
    let dir = p_plane.normal().cross(q_plane.normal());
    let p0 = point_on_both_planes(p_plane, q_plane, &dir);
    let ip = match clip_line_to_polygon(&p0, &dir, p, p_plane) {
        Some(iv) => iv,
        None => return IntersectionShape::Empty,
    };
    let iq = match clip_line_to_polygon(&p0, &dir, q, q_plane) {
        Some(iv) => iv,
        None => return IntersectionShape::Empty,
    };
    let lo = if ip.0 >= iq.0 { ip.0 } else { iq.0 };
    let hi = if ip.1 <= iq.1 { ip.1 } else { iq.1 };
    if lo > hi {
        IntersectionShape::Empty
    } else if lo == hi {
        IntersectionShape::SinglePoint(p0.add(&dir.scaled(&lo)))
    } else {
        let a = p0.add(&dir.scaled(&lo));
        let b = p0.add(&dir.scaled(&hi));
        IntersectionShape::Segment(Segment::sorted(a, b).expect("lo < hi"))
    }
}

/// A point on the intersection line of two non-parallel planes whose common
/// direction is `dir`.
fn point_on_both_planes(p: &Plane, q: &Plane, dir: &Vec3) -> Point3 {
    // Fix the coordinate of the largest |dir| component to zero and solve the
    // remaining 2x2 system; its determinant is (up to sign) that component.
    let np = p.normal();
    let nq = q.normal();
    let (i, _) = [&dir.x, &dir.y, &dir.z]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().cmp(&b.1.abs()))
        .unwrap();
    let solve = |a1: &Scalar, b1: &Scalar, c1: &Scalar, a2: &Scalar, b2: &Scalar, c2: &Scalar| {
        let det = a1 * b2 - a2 * b1;
        debug_assert!(!det.is_zero());
        let u = (c1 * b2 - c2 * b1) / &det;
        let v = (a1 * c2 - a2 * c1) / &det;
        (u, v)
    };
    match i {
        0 => {
            let (y, z) = solve(&np.y, &np.z, p.offset(), &nq.y, &nq.z, q.offset());
            Point3::new(Scalar::zero(), y, z)
        }
        1 => {
            let (x, z) = solve(&np.x, &np.z, p.offset(), &nq.x, &nq.z, q.offset());
            Point3::new(x, Scalar::zero(), z)
        }
        _ => {
            let (x, y) = solve(&np.x, &np.y, p.offset(), &nq.x, &nq.y, q.offset());
            Point3::new(x, y, Scalar::zero())
        }
    }
}
