//! Pairwise classification of polygons and the three compatibility relations.
//!
//! A pair classification records everything the relations need: the shared
//! vertex indices, the number of full common edges, the exact intersection of
//! the two convex hulls, and whether that intersection reaches the relative
//! interior of either polygon (*interior contact*).
//!
//! The three relations, from strictest to most permissive:
//!
//! * [`is_almost_disjoint`]: hulls disjoint or sharing exactly one common
//!   vertex;
//! * [`is_vertex_or_edge_compatible`]: additionally allows a full common edge;
//! * [`is_no_bad_intersection`]: forbids only pairs that share a vertex while
//!   also having interior contact.

use crate::kernel::{
    convex_polygon_intersection, point_polygon_location, IntersectionShape, Point3, PointLocation,
    Segment,
};
use crate::model::{ConvexPlanarPolygon, Family, PointSet};
#[cfg(debug_assertions)]
use num_traits::Signed;
use rayon::prelude::*;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("cannot classify a polygon against itself")]
    SamePolygon,
}

/// The three compatibility relations on polygon pairs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    AlmostDisjoint,
    VertexOrEdge,
    NoBadIntersection,
}

impl Relation {
    pub const ALL: [Relation; 3] = [
        Relation::AlmostDisjoint,
        Relation::VertexOrEdge,
        Relation::NoBadIntersection,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Relation::AlmostDisjoint => "almost-disjoint",
            Relation::VertexOrEdge => "vertex-or-edge",
            Relation::NoBadIntersection => "no-bad",
        }
    }

    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "almost-disjoint" => Some(Relation::AlmostDisjoint),
            "vertex-or-edge" => Some(Relation::VertexOrEdge),
            "no-bad" => Some(Relation::NoBadIntersection),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact classification of an unordered polygon pair over a shared point set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairClassification {
    /// Point indices that are vertices of both polygons, ascending.
    pub shared_vertices: Vec<usize>,
    /// Number of edges (as unordered index pairs) common to both polygons.
    pub shared_full_edges: usize,
    /// The exact intersection of the two convex hulls.
    pub shape: IntersectionShape,
    /// Whether the hull intersection contains a point in the relative
    /// interior of at least one of the two polygons.
    pub interior_contact: bool,
}

impl fmt::Display for PairClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "shared_vertices={:?} shared_full_edges={} interior_contact={} shape={}",
            self.shared_vertices, self.shared_full_edges, self.interior_contact, self.shape
        )
    }
}

/// True when `p` is in the relative interior of the polygon.
fn in_relative_interior(p: &Point3, verts: &[Point3], poly: &ConvexPlanarPolygon) -> bool {
    matches!(
        point_polygon_location(p, verts, poly.plane()),
        PointLocation::RelativeInterior
    )
}

#[cfg(debug_assertions)]
fn segment_contains(s: &Segment, p: &Point3) -> bool {
    let d = s.b.sub(&s.a);
    let w = p.sub(&s.a);
    if !w.cross(&d).is_zero() {
        return false;
    }
    let t = w.dot(&d);
    !t.is_negative() && t <= d.norm_sq()
}

/// Decides interior contact from the intersection shape. A segment needs only
/// its endpoints and midpoint tested: within either polygon's plane, a line
/// not supporting an edge crosses the boundary at most twice, so a segment of
/// the hull intersection that reaches the relative interior does so at one of
/// those three points; a segment along an edge line never does.
fn decide_interior_contact(
    shape: &IntersectionShape,
    p_pts: &[Point3],
    p: &ConvexPlanarPolygon,
    q_pts: &[Point3],
    q: &ConvexPlanarPolygon,
) -> bool {
    let test = |x: &Point3| -> bool {
        in_relative_interior(x, p_pts, p) || in_relative_interior(x, q_pts, q)
    };
    match shape {
        IntersectionShape::Empty => false,
        IntersectionShape::SinglePoint(x) => test(x),
        IntersectionShape::Segment(Segment { a, b }) => {
            test(a) || test(b) || test(&a.lerp(b, &crate::scalar::ratio(1, 2)))
        }
        IntersectionShape::Region(vs) => {
            // A two-dimensional overlap always has interior contact; verify on
            // the vertex centroid in debug builds.
            debug_assert!({
                let n = crate::scalar::int(vs.len() as i64);
                let mut x = crate::scalar::Scalar::from_integer(0.into());
                let mut y = x.clone();
                let mut z = x.clone();
                for v in vs {
                    x += &v.x;
                    y += &v.y;
                    z += &v.z;
                }
                test(&Point3::new(x / &n, y / &n, z / &n))
            });
            true
        }
    }
}

/// Classifies the unordered pair `(p, q)` of distinct polygons over `ps`.
pub fn classify_pair(
    ps: &PointSet,
    p: &ConvexPlanarPolygon,
    q: &ConvexPlanarPolygon,
) -> Result<PairClassification, ClassifyError> {
    if p == q {
        return Err(ClassifyError::SamePolygon);
    }
    let mut shared_vertices: Vec<usize> = p
        .vertices()
        .iter()
        .filter(|v| q.vertices().contains(v))
        .copied()
        .collect();
    shared_vertices.sort_unstable();
    let shared_full_edges = p.edge_set().intersection(&q.edge_set()).count();
    let p_pts = p.points(ps);
    let q_pts = q.points(ps);
    let shape = convex_polygon_intersection(&p_pts, p.plane(), &q_pts, q.plane());
    let interior_contact = decide_interior_contact(&shape, &p_pts, p, &q_pts, q);
    // Every shared vertex lies in the hull intersection.
    debug_assert!(shared_vertices.iter().all(|&v| {
        let pt = ps.get(v);
        match &shape {
            IntersectionShape::Empty => false,
            IntersectionShape::SinglePoint(x) => x == pt,
            IntersectionShape::Segment(s) => segment_contains(s, pt),
            IntersectionShape::Region(_) => true,
        }
    }));
    Ok(PairClassification {
        shared_vertices,
        shared_full_edges,
        shape,
        interior_contact,
    })
}

/// Hulls disjoint, or exactly one shared vertex and nothing else.
pub fn is_almost_disjoint(c: &PairClassification) -> bool {
    match &c.shape {
        IntersectionShape::Empty => true,
        IntersectionShape::SinglePoint(_) => c.shared_vertices.len() == 1,
        _ => false,
    }
}

/// Almost disjoint, or the hulls meet in exactly a full common edge. When the
/// intersection is a segment and some edge is common to both polygons, that
/// segment is necessarily the common edge: a strictly convex polygon meets an
/// edge's line in exactly the edge.
pub fn is_vertex_or_edge_compatible(c: &PairClassification) -> bool {
    is_almost_disjoint(c)
        || (matches!(c.shape, IntersectionShape::Segment(_)) && c.shared_full_edges >= 1)
}

/// No *bad* intersection: a pair is bad when the polygons share at least one
/// vertex and their hulls also reach the relative interior of one of them.
pub fn is_no_bad_intersection(c: &PairClassification) -> bool {
    !intersects_badly(c)
}

/// The pair shares at least one vertex *and* the hull intersection reaches
/// the relative interior of one of the two polygons.
pub fn intersects_badly(c: &PairClassification) -> bool {
    !c.shared_vertices.is_empty() && c.interior_contact
}

pub fn satisfies(relation: Relation, c: &PairClassification) -> bool {
    match relation {
        Relation::AlmostDisjoint => is_almost_disjoint(c),
        Relation::VertexOrEdge => is_vertex_or_edge_compatible(c),
        Relation::NoBadIntersection => is_no_bad_intersection(c),
    }
}

/// A pair violating the relation under which a family was verified.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub classification: PairClassification,
}

/// Classifies every unordered pair of the family and returns the pairs
/// violating `relation`, ordered by `(i, j)`.
pub fn verify_family(family: &Family, relation: Relation) -> Vec<Violation> {
    let polys = family.polygons();
    let pairs: Vec<(usize, usize)> = (0..polys.len())
        .flat_map(|i| ((i + 1)..polys.len()).map(move |j| (i, j)))
        .collect();
    let mut violations: Vec<Violation> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let c = classify_pair(family.point_set(), &polys[i], &polys[j])
                .expect("family polygons are pairwise distinct");
            (!satisfies(relation, &c)).then_some(Violation {
                i,
                j,
                classification: c,
            })
        })
        .collect();
    violations.sort_by_key(|v| (v.i, v.j));
    violations
}
