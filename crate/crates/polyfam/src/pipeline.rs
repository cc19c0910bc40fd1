//! The projection pipeline: an executable version of the argument that a
//! large family of fat hexagons must contain a badly intersecting pair.
//!
//! Stages, in order:
//!
//! 1. choose a projection direction that is generic for the family
//!    ([`choose_projection`]);
//! 2. keep the hexagons that are fat and whose planes are close enough to the
//!    image plane, and transfer the fatness bounds through the projection
//!    ([`fatness_transfer`]);
//! 3. label each projected hexagon `A..F` with the fat angles at `B, D, F`
//!    ([`label_hexagon`]);
//! 4. bucket hexagons by the inclinations of their corner diagonals `AC, CE,
//!    EA`, cut into cells of width `phi` ([`bucket_by_slope`]);
//! 5. build the graph of corner diagonals over the largest bucket
//!    ([`build_triangle_graph`]);
//! 6. search it for a *rainbow* triangle — three edges from three different
//!    hexagons ([`find_rainbow_triangle`]);
//! 7. classify the three source hexagons pairwise in 3-space and return a
//!    verified badly intersecting pair ([`extract_bad_pair`]).
//!
//! Every numeric comparison is exact or certified: rational quantities are
//! computed exactly, irrational ones (square roots, arctangents) through
//! adaptive-precision interval enclosures. A reported witness is always
//! re-verified by the exact classifier; failures are reported stage by stage,
//! never silently.

use crate::certified::{atan_interval, line_inclination, sqrt_interval, CertifiedError, Interval};
use crate::classify::{classify_pair, intersects_badly, ClassifyError, PairClassification};
use crate::kernel::{orient3d, squared_cosine, supporting_plane, Point3, Vec3};
use crate::model::{
    is_fat_hexagon, validate_polygon, Family, FatnessParams, ModelError, PointSet,
};
use crate::scalar::{int, sgn, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

/// Adaptive refinement stops once interval endpoints carry this many
/// fractional bits; a cell assignment still unresolved at that point falls
/// back to the interval midpoint (deterministically).
const PRECISION_CAP: u32 = 512;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("the pipeline needs a family of hexagons; polygon {0} has {1} vertices")]
    NotHexagonFamily(usize, usize),
    #[error("no generic projection direction found in {0} candidate draws")]
    NoGenericDirection(usize),
    #[error("projection direction lies in the plane of hexagon {0}")]
    DegenerateProjection(usize),
    #[error("invalid projection spec: {0}")]
    InvalidProjection(String),
    #[error("bucket width must be a positive angle, got {0}")]
    InvalidPhi(Scalar),
    #[error("invalid tilt threshold: {0}")]
    InvalidThreshold(String),
    #[error("hexagons {0} and {1} share the diagonal between points {2} and {3}")]
    SharedDiagonal(usize, usize, usize, usize),
    #[error("projected hexagon {0} has no alternating vertex triple inside the transferred angle window")]
    NotFat(usize),
    #[error("the rainbow triangle's corners are collinear")]
    DegenerateRainbow,
    #[error("no badly intersecting pair among the rainbow source hexagons")]
    NoBadPairFound(Box<ExtractionDiagnostics>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Certified(#[from] CertifiedError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// An orthogonal projection onto the plane spanned by `basis_u, basis_w`,
/// along `direction`. The basis vectors are orthogonal with equal (squared)
/// lengths, so the image coordinates `(p . u, p . w)` reproduce the true
/// image up to a similarity — angles and length ratios are faithful.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProjectionSpec {
    direction: Vec3,
    basis_u: Vec3,
    basis_w: Vec3,
}

impl ProjectionSpec {
    pub fn new(direction: Vec3, basis_u: Vec3, basis_w: Vec3) -> Result<Self, PipelineError> {
        if direction.is_zero() || basis_u.is_zero() || basis_w.is_zero() {
            return Err(PipelineError::InvalidProjection(
                "zero vector in projection spec".into(),
            ));
        }
        if !basis_u.dot(&basis_w).is_zero()
            || !basis_u.dot(&direction).is_zero()
            || !basis_w.dot(&direction).is_zero()
        {
            return Err(PipelineError::InvalidProjection(
                "direction and basis must be pairwise orthogonal".into(),
            ));
        }
        if basis_u.norm_sq() != basis_w.norm_sq() {
            return Err(PipelineError::InvalidProjection(
                "basis vectors must have equal length".into(),
            ));
        }
        Ok(ProjectionSpec {
            direction,
            basis_u,
            basis_w,
        })
    }

    /// The vertical view: direction `(0,0,1)`, image coordinates `(x, y)`.
    pub fn vertical() -> Self {
        ProjectionSpec {
            direction: Vec3::from_i64(0, 0, 1),
            basis_u: Vec3::from_i64(1, 0, 0),
            basis_w: Vec3::from_i64(0, 1, 0),
        }
    }

    pub fn direction(&self) -> &Vec3 {
        &self.direction
    }

    pub fn basis(&self) -> (&Vec3, &Vec3) {
        (&self.basis_u, &self.basis_w)
    }

    /// Image coordinates of a point.
    pub fn project(&self, p: &Point3) -> (Scalar, Scalar) {
        let v = p.sub(&Point3::origin());
        (v.dot(&self.basis_u), v.dot(&self.basis_w))
    }

    /// Sign of `n . (u x w)`: positive when a polygon with canonical normal
    /// `n` keeps its counter-clockwise orientation in the image.
    fn orientation_sign(&self, normal: &Vec3) -> i8 {
        sgn(&normal.dot(&self.basis_u.cross(&self.basis_w)))
    }
}

/// Draws rational directions from a seeded generator until one is generic for
/// the family: all projected points pairwise distinct, no hexagon plane
/// containing the direction, and (for families of three or more) at least
/// three hexagons with `cos^2 theta >= min_cos_sq_theta`. The first candidate
/// is always the vertical view, so flat families are handled deterministically.
/// Returns the spec together with each polygon's exact `cos^2 theta`.
pub fn choose_projection(
    family: &Family,
    seed: u64,
    min_cos_sq_theta: &Scalar,
    max_attempts: usize,
) -> Result<(ProjectionSpec, Vec<Scalar>), PipelineError> {
    let needed = family.len().min(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..max_attempts.max(1) {
        let (v, norm) = if attempt == 0 {
            (Vec3::from_i64(0, 0, 1), Scalar::one())
        } else {
            // Unit rational directions via the quaternion parametrization:
            // the image of (0,0,1) under the rotation of (a,b,c,d) has
            // integer coordinates with norm a^2+b^2+c^2+d^2.
            let (a, b, c, d) = loop {
                let q: Vec<i64> = (0..4).map(|_| rng.gen_range(-9i64..=9)).collect();
                if q.iter().any(|x| *x != 0) {
                    break (q[0], q[1], q[2], q[3]);
                }
            };
            let v = Vec3::from_i64(
                2 * (b * d + a * c),
                2 * (c * d - a * b),
                a * a - b * b - c * c + d * d,
            );
            if v.is_zero() {
                continue; // a*a+b*b = c*c+d*d = 0 is impossible, but 2D-degenerate quaternions can zero two coords
            }
            (v, int(a * a + b * b + c * c + d * d))
        };
        let cos_sqs: Vec<Scalar> = match family
            .polygons()
            .iter()
            .map(|poly| {
                let (c_sq, _) = squared_cosine(poly.plane().normal(), &v)
                    .expect("plane normals and direction are nonzero");
                if c_sq.is_zero() {
                    None // plane contains the direction
                } else {
                    Some(c_sq)
                }
            })
            .collect::<Option<Vec<_>>>()
        {
            Some(cs) => cs,
            None => continue,
        };
        if cos_sqs.iter().filter(|c| *c >= min_cos_sq_theta).count() < needed {
            continue;
        }
        let spec = make_spec(v, norm);
        let mut images: BTreeSet<(Scalar, Scalar)> = BTreeSet::new();
        if family
            .point_set()
            .points()
            .iter()
            .all(|p| images.insert(spec.project(p)))
        {
            return Ok((spec, cos_sqs));
        }
    }
    Err(PipelineError::NoGenericDirection(max_attempts.max(1)))
}

/// Builds an equal-length orthogonal basis for the plane normal to `v`,
/// where `norm` is the exact length of `v` (rational by construction).
fn make_spec(v: Vec3, norm: Scalar) -> ProjectionSpec {
    debug_assert_eq!(&v.norm_sq(), &(&norm * &norm));
    let u = if v.x.is_zero() && v.y.is_zero() {
        Vec3::from_i64(1, 0, 0)
    } else {
        Vec3::new(-v.y.clone(), v.x.clone(), Scalar::zero())
    };
    let w = v.cross(&u).scaled(&norm.recip());
    ProjectionSpec::new(v, u, w).expect("constructed basis is orthogonal")
}

/// The exact transferred fatness bounds plus a certified bracket for
/// `tan(phi_max) = sin(alpha') / (c' + cos(alpha'))`, the tangent of the
/// angle below which every bucketing width is safe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FatnessTransferResult {
    pub c_prime_sq: Scalar,
    pub cos_alpha_prime: Scalar,
    pub tan_phi_max_bounds: Interval,
}

pub fn fatness_transfer(
    params: &FatnessParams,
    cos_theta_sq: &Scalar,
    prec_bits: u32,
) -> Result<FatnessTransferResult, PipelineError> {
    let t = params.transfer(cos_theta_sq)?;
    let ca = t.cos_alpha().clone();
    let sin_iv = sqrt_interval(&(Scalar::one() - &ca * &ca), prec_bits)?;
    let c_iv = sqrt_interval(t.c_sq(), prec_bits)?;
    let tan = Interval::new(
        sin_iv.lo() / (c_iv.hi() + &ca),
        sin_iv.hi() / (c_iv.lo() + &ca),
    );
    Ok(FatnessTransferResult {
        c_prime_sq: t.c_sq().clone(),
        cos_alpha_prime: ca,
        tan_phi_max_bounds: tan,
    })
}

/// A projected hexagon relabeled `A..F` counter-clockwise so that the fat
/// angle triple sits at `B, D, F`, together with its corner diagonal data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledHexagon {
    /// Index of the source hexagon in the family.
    pub source: usize,
    /// Image coordinates of `A, B, C, D, E, F`.
    pub vertices: [(Scalar, Scalar); 6],
    /// Family point indices of the corners `A, C, E`.
    pub corner_points: [usize; 3],
    /// Family point indices of the fat vertices `B, D, F`.
    pub ear_points: [usize; 3],
    /// Exact image directions of the diagonals `AC`, `CE`, `EA`.
    pub diagonal_dirs: [(Scalar, Scalar); 3],
    /// Certified enclosures of the three diagonal inclinations in `[0, pi)`.
    pub inclinations: [Interval; 3],
}

/// Squared cosine of the interior angle at position `i` of a 2D polygon.
fn angle_sq_cos_2d(verts: &[(Scalar, Scalar)], i: usize) -> Scalar {
    let k = verts.len();
    let v = &verts[i];
    let p = &verts[(i + k - 1) % k];
    let n = &verts[(i + 1) % k];
    let a = (&p.0 - &v.0, &p.1 - &v.1);
    let b = (&n.0 - &v.0, &n.1 - &v.1);
    let dot = &a.0 * &b.0 + &a.1 * &b.1;
    let na = &a.0 * &a.0 + &a.1 * &a.1;
    let nb = &b.0 * &b.0 + &b.1 * &b.1;
    (&dot * &dot) / (na * nb)
}

/// Labels a projected hexagon given counter-clockwise image vertices and
/// their family point indices. The alternating triple whose angles satisfy
/// `|cos| <= cos_alpha_prime` becomes `B, D, F` (ties toward the triple
/// containing position 0); among the three corners, `A` is the one whose
/// diagonal to the next corner has the smallest inclination, decided exactly.
pub fn label_hexagon(
    source: usize,
    points: &[usize],
    vertices: &[(Scalar, Scalar)],
    cos_alpha_prime: &Scalar,
    prec_bits: u32,
) -> Result<LabeledHexagon, PipelineError> {
    assert_eq!(points.len(), 6, "labeling needs a hexagon");
    assert_eq!(vertices.len(), 6, "labeling needs a hexagon");
    let ca_sq = cos_alpha_prime * cos_alpha_prime;
    let triple_fat =
        |start: usize| (0..3).all(|t| angle_sq_cos_2d(vertices, (start + 2 * t) % 6) <= ca_sq);
    let fat_start = if triple_fat(0) {
        0 // on a tie both triples qualify; position 0 wins
    } else if triple_fat(1) {
        1
    } else {
        return Err(PipelineError::NotFat(source));
    };
    let corner_start = 1 - fat_start;
    let corner_pos = [corner_start, corner_start + 2, corner_start + 4];
    let diag_dir = |k: usize| {
        let a = &vertices[corner_pos[k]];
        let b = &vertices[corner_pos[(k + 1) % 3]];
        (&b.0 - &a.0, &b.1 - &a.1)
    };
    let mut a_choice = 0usize;
    for k in 1..3 {
        let best = diag_dir(a_choice);
        let cand = diag_dir(k);
        if crate::certified::compare_inclinations(&cand.0, &cand.1, &best.0, &best.1)
            == std::cmp::Ordering::Less
        {
            a_choice = k;
        }
    }
    let shift = corner_pos[a_choice];
    let at = |i: usize| (shift + i) % 6;
    let vertices_out: [(Scalar, Scalar); 6] = std::array::from_fn(|i| vertices[at(i)].clone());
    let corner_points = [points[at(0)], points[at(2)], points[at(4)]];
    let ear_points = [points[at(1)], points[at(3)], points[at(5)]];
    let diagonal_dirs: [(Scalar, Scalar); 3] = std::array::from_fn(|k| {
        let a = &vertices_out[2 * k];
        let b = &vertices_out[(2 * k + 2) % 6];
        (&b.0 - &a.0, &b.1 - &a.1)
    });
    let inclinations: [Interval; 3] =
        std::array::from_fn(|k| line_inclination(&diagonal_dirs[k].0, &diagonal_dirs[k].1, prec_bits));
    Ok(LabeledHexagon {
        source,
        vertices: vertices_out,
        corner_points,
        ear_points,
        diagonal_dirs,
        inclinations,
    })
}

/// Recomputes the three diagonal inclination enclosures at the requested
/// precision (intervals shrink as `prec_bits` grows).
pub fn diagonal_inclinations(labeled: &LabeledHexagon, prec_bits: u32) -> [Interval; 3] {
    std::array::from_fn(|k| {
        line_inclination(
            &labeled.diagonal_dirs[k].0,
            &labeled.diagonal_dirs[k].1,
            prec_bits,
        )
    })
}

/// Projects one hexagon and returns `(point indices, image vertices)` in
/// counter-clockwise image order (reversing when the projection flips
/// orientation, keeping the first vertex first).
fn project_hexagon(
    family: &Family,
    index: usize,
    spec: &ProjectionSpec,
) -> Result<(Vec<usize>, Vec<(Scalar, Scalar)>), PipelineError> {
    let poly = &family.polygons()[index];
    let sign = spec.orientation_sign(poly.plane().normal());
    if sign == 0 {
        return Err(PipelineError::DegenerateProjection(index));
    }
    let mut idxs: Vec<usize> = poly.vertices().to_vec();
    let mut verts: Vec<(Scalar, Scalar)> = idxs
        .iter()
        .map(|&i| spec.project(family.point_set().get(i)))
        .collect();
    if sign < 0 {
        idxs[1..].reverse();
        verts[1..].reverse();
    }
    Ok((idxs, verts))
}

/// Cell index of a diagonal's inclination under cells `[k*phi, (k+1)*phi)`,
/// certified by refining the enclosure until it fits inside one cell. If the
/// precision cap is hit (the inclination sits immeasurably close to a
/// boundary), the midpoint of the final enclosure decides, deterministically.
fn inclination_cell(dx: &Scalar, dy: &Scalar, phi: &Scalar, start_bits: u32) -> BigInt {
    let mut bits = start_bits.clamp(16, PRECISION_CAP);
    loop {
        let iv = line_inclination(dx, dy, bits);
        let k_lo = (iv.lo() / phi).floor();
        let k_hi = (iv.hi() / phi).floor();
        if k_lo == k_hi {
            return k_lo.to_integer();
        }
        if bits >= PRECISION_CAP {
            return (iv.midpoint() / phi).floor().to_integer();
        }
        bits = (bits * 2).min(PRECISION_CAP);
    }
}

/// Buckets hexagons by the cell triple of their `AC, CE, EA` inclinations and
/// returns the most populated bucket (ties toward the bucket containing the
/// smallest index) as indices into `hexes`, with its cell key.
pub fn bucket_by_slope(
    hexes: &[LabeledHexagon],
    phi: &Scalar,
    prec_bits: u32,
) -> Result<(Vec<usize>, [BigInt; 3]), PipelineError> {
    if !phi.is_positive() {
        return Err(PipelineError::InvalidPhi(phi.clone()));
    }
    let keys: Vec<[BigInt; 3]> = hexes
        .par_iter()
        .map(|h| {
            std::array::from_fn(|k| {
                inclination_cell(&h.diagonal_dirs[k].0, &h.diagonal_dirs[k].1, phi, prec_bits)
            })
        })
        .collect();
    let mut buckets: BTreeMap<&[BigInt; 3], Vec<usize>> = BTreeMap::new();
    for (i, key) in keys.iter().enumerate() {
        buckets.entry(key).or_default().push(i);
    }
    let best = buckets
        .values()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .expect("bucketing a nonempty list");
    let key = keys[best[0]].clone();
    Ok((best.clone(), key))
}

/// An edge of the diagonal graph: a corner diagonal of one hexagon, with the
/// hexagon's third corner recorded for the extraction stage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphEdge {
    /// Endpoint family point indices, ascending.
    pub endpoints: (usize, usize),
    /// Source hexagon index in the family.
    pub source: usize,
    /// The source hexagon's corner not on this diagonal.
    pub opposite: usize,
}

/// Graph on projected corner points whose edges are the hexagons' corner
/// diagonals; the per-hexagon triangles are pairwise edge-disjoint.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiagonalTriangleGraph {
    /// All endpoint family point indices, ascending.
    pub vertices: Vec<usize>,
    pub edges: Vec<GraphEdge>,
}

/// Builds the diagonal graph over a bucket of labeled hexagons, rejecting
/// inputs where two hexagons share a diagonal (as an unordered endpoint
/// pair) — the pipeline's arguments need the triangles edge-disjoint.
pub fn build_triangle_graph(
    hexes: &[&LabeledHexagon],
) -> Result<DiagonalTriangleGraph, PipelineError> {
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut edges = Vec::with_capacity(3 * hexes.len());
    for h in hexes {
        for k in 0..3 {
            let a = h.corner_points[k];
            let b = h.corner_points[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            if let Some(&other) = seen.get(&key) {
                return Err(PipelineError::SharedDiagonal(other, h.source, key.0, key.1));
            }
            seen.insert(key, h.source);
            edges.push(GraphEdge {
                endpoints: key,
                source: h.source,
                opposite: h.corner_points[(k + 2) % 3],
            });
        }
    }
    let vertices: BTreeSet<usize> = edges
        .iter()
        .flat_map(|e| [e.endpoints.0, e.endpoints.1])
        .collect();
    Ok(DiagonalTriangleGraph {
        vertices: vertices.into_iter().collect(),
        edges,
    })
}

/// A triangle in the diagonal graph whose three edges come from three
/// different hexagons. Edge `k` joins `vertices[k]` and `vertices[(k+1)%3]`;
/// `sources[k]` and `apexes[k]` describe that edge's hexagon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RainbowTriangle {
    pub vertices: [usize; 3],
    pub sources: [usize; 3],
    pub apexes: [usize; 3],
}

/// Exhaustively searches the graph for a rainbow triangle and returns the
/// lexicographically least vertex triple carrying three distinct sources.
pub fn find_rainbow_triangle(g: &DiagonalTriangleGraph) -> Option<RainbowTriangle> {
    let lookup: BTreeMap<(usize, usize), &GraphEdge> =
        g.edges.iter().map(|e| (e.endpoints, e)).collect();
    let vs = &g.vertices;
    for (iu, &u) in vs.iter().enumerate() {
        for (iv, &v) in vs.iter().enumerate().skip(iu + 1) {
            let Some(e_uv) = lookup.get(&(u, v)) else {
                continue;
            };
            for &w in vs.iter().skip(iv + 1) {
                let (Some(e_vw), Some(e_uw)) = (lookup.get(&(v, w)), lookup.get(&(u, w))) else {
                    continue;
                };
                if e_uv.source != e_vw.source
                    && e_vw.source != e_uw.source
                    && e_uv.source != e_uw.source
                {
                    // Edge order (u,v), (v,w), (w,u) to match the vertex cycle.
                    return Some(RainbowTriangle {
                        vertices: [u, v, w],
                        sources: [e_uv.source, e_vw.source, e_uw.source],
                        apexes: [e_uv.opposite, e_vw.opposite, e_uw.opposite],
                    });
                }
            }
        }
    }
    None
}

/// Which side of the rainbow triangle's plane each source hexagon's apex
/// corner lies on, and how steeply the hexagon's plane is tilted against it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SideAngleRecord {
    pub source: usize,
    pub apex_point: usize,
    /// Sign of the apex against the triangle's plane (0 = coplanar).
    pub side: i8,
    /// Squared cosine of the dihedral angle between the hexagon's plane and
    /// the triangle's plane; smaller means a steeper tilt.
    pub cos_sq_dihedral: Scalar,
}

/// Diagnostics of the extraction stage: the argument predicts that of the two
/// hexagons whose apexes lie on the same side of the triangle, the more
/// steeply tilted pair intersects badly; the exact classifier decides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtractionDiagnostics {
    pub triangle_points: [usize; 3],
    /// One record per source hexagon, ascending by source index.
    pub records: Vec<SideAngleRecord>,
    /// The same-side steepest pair, when one exists.
    pub predicted_pair: Option<(usize, usize)>,
    /// Classification results for all three source pairs.
    pub checked_pairs: Vec<(usize, usize, bool)>,
}

/// A verified badly intersecting pair with the stage diagnostics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BadPairWitness {
    pub i: usize,
    pub j: usize,
    pub classification: PairClassification,
    pub diagnostics: ExtractionDiagnostics,
}

/// Classifies the three rainbow source pairs in 3-space and returns the
/// lexicographically least badly intersecting one. The side/tilt prediction
/// is recorded for comparison but the exact classifier makes the decision.
pub fn extract_bad_pair(
    t: &RainbowTriangle,
    family: &Family,
) -> Result<BadPairWitness, PipelineError> {
    let ps = family.point_set();
    let tri = [
        ps.get(t.vertices[0]).clone(),
        ps.get(t.vertices[1]).clone(),
        ps.get(t.vertices[2]).clone(),
    ];
    let plane = supporting_plane(&tri).map_err(|_| PipelineError::DegenerateRainbow)?;

    let mut by_source: Vec<(usize, usize)> = (0..3).map(|k| (t.sources[k], t.apexes[k])).collect();
    by_source.sort_unstable();
    let records: Vec<SideAngleRecord> = by_source
        .iter()
        .map(|&(source, apex_point)| {
            let side = orient3d(&tri[0], &tri[1], &tri[2], ps.get(apex_point));
            let (cos_sq_dihedral, _) = squared_cosine(
                plane.normal(),
                family.polygons()[source].plane().normal(),
            )
            .expect("plane normals are nonzero");
            SideAngleRecord {
                source,
                apex_point,
                side,
                cos_sq_dihedral,
            }
        })
        .collect();

    // Prediction: among pairs whose apexes lie strictly on the same side,
    // take the two steepest hexagons (exact comparison, index tie-break).
    let mut same_side: Vec<(usize, usize)> = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            if records[i].side != 0 && records[i].side == records[j].side {
                same_side.push((i, j));
            }
        }
    }
    let predicted_pair = if same_side.is_empty() {
        None
    } else {
        let mut ranked: Vec<usize> = same_side
            .iter()
            .flat_map(|&(i, j)| [i, j])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        ranked.sort_by(|&i, &j| {
            records[i]
                .cos_sq_dihedral
                .cmp(&records[j].cos_sq_dihedral)
                .then(records[i].source.cmp(&records[j].source))
        });
        let (a, b) = (records[ranked[0]].source, records[ranked[1]].source);
        Some((a.min(b), a.max(b)))
    };

    let sources: Vec<usize> = records.iter().map(|r| r.source).collect();
    let mut checked_pairs = Vec::with_capacity(3);
    let mut witness: Option<(usize, usize, PairClassification)> = None;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (a, b) = (sources[i], sources[j]);
            let c = classify_pair(ps, &family.polygons()[a], &family.polygons()[b])?;
            let bad = intersects_badly(&c);
            checked_pairs.push((a, b, bad));
            if bad && witness.is_none() {
                witness = Some((a, b, c));
            }
        }
    }
    let diagnostics = ExtractionDiagnostics {
        triangle_points: t.vertices,
        records,
        predicted_pair,
        checked_pairs,
    };
    match witness {
        Some((i, j, classification)) => Ok(BadPairWitness {
            i,
            j,
            classification,
            diagnostics,
        }),
        None => Err(PipelineError::NoBadPairFound(Box::new(diagnostics))),
    }
}

/// Pipeline configuration; `Default` gives the standard run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PipelineConfig {
    /// Bucket cell width in radians; `None` derives half the certified
    /// angle bound from the worst-case transfer.
    pub phi: Option<Scalar>,
    /// Keep hexagons with `cos^2 theta` at least this; `None` uses
    /// `(3 + cos_alpha)/4`, which always satisfies the transfer domain.
    pub min_cos_sq_theta: Option<Scalar>,
    pub seed: u64,
    /// Projection candidates to try before giving up.
    pub max_attempts: usize,
    /// Starting precision for certified enclosures, in fractional bits.
    pub precision_bits: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            phi: None,
            min_cos_sq_theta: None,
            seed: 0,
            max_attempts: 64,
            precision_bits: 96,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageRecord {
    pub stage: &'static str,
    pub summary: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    /// A verified badly intersecting pair was found.
    Witness { i: usize, j: usize },
    /// Every stage ran to completion, including an exhaustive rainbow
    /// search over the selected bucket, and no rainbow triangle exists.
    /// This run certifies the absence of pipeline-detectable bad pairs.
    NoRainbow { reason: String },
    /// A stage could not complete, or too few hexagons remained for a
    /// rainbow to be possible at all. Nothing is certified either way.
    Failed { stage: &'static str, message: String },
}

/// The full stage-by-stage trace of one pipeline run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PipelineReport {
    pub stages: Vec<StageRecord>,
    pub projection: Option<ProjectionSpec>,
    /// Exact `cos^2 theta` per input hexagon, aligned with the family.
    pub cos_sq_theta: Vec<Scalar>,
    /// Indices of hexagons that are fat and tilt within the threshold.
    pub survivors: Vec<usize>,
    /// Worst-case transfer over the survivors.
    pub transfer: Option<FatnessTransferResult>,
    /// The bucket width actually used.
    pub phi: Option<Scalar>,
    /// Family indices in the most populated bucket.
    pub bucket: Vec<usize>,
    pub bucket_cells: Option<[BigInt; 3]>,
    pub graph: Option<DiagonalTriangleGraph>,
    pub rainbow: Option<RainbowTriangle>,
    pub witness: Option<(usize, usize, PairClassification)>,
    pub diagnostics: Option<ExtractionDiagnostics>,
    pub outcome: Outcome,
}

impl PipelineReport {
    fn empty() -> Self {
        PipelineReport {
            stages: Vec::new(),
            projection: None,
            cos_sq_theta: Vec::new(),
            survivors: Vec::new(),
            transfer: None,
            phi: None,
            bucket: Vec::new(),
            bucket_cells: None,
            graph: None,
            rainbow: None,
            witness: None,
            diagnostics: None,
            outcome: Outcome::Failed {
                stage: "init",
                message: "pipeline not run".into(),
            },
        }
    }

    fn record(&mut self, stage: &'static str, summary: String) {
        self.stages.push(StageRecord { stage, summary });
    }

    fn fail(mut self, stage: &'static str, message: String) -> Self {
        self.record(stage, format!("failed: {message}"));
        self.outcome = Outcome::Failed { stage, message };
        self
    }

    /// Multi-line human-readable rendering of the trace and outcome.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.stages {
            let _ = writeln!(out, "stage {}: {}", s.stage, s.summary);
        }
        match &self.outcome {
            Outcome::Witness { i, j } => {
                let _ = writeln!(out, "outcome: witness ({i}, {j})");
                if let Some((_, _, c)) = &self.witness {
                    let _ = writeln!(out, "witness classification: {c}");
                }
            }
            Outcome::NoRainbow { reason } => {
                let _ = writeln!(out, "outcome: no-rainbow ({reason})");
            }
            Outcome::Failed { stage, message } => {
                let _ = writeln!(out, "outcome: failed at {stage} ({message})");
            }
        }
        out
    }
}

/// Runs the full pipeline. Hard precondition violations (not a hexagon
/// family, nonsensical configuration) surface as `Err`; stage failures are
/// embedded in the report's outcome.
pub fn run_pipeline(
    family: &Family,
    params: &FatnessParams,
    config: &PipelineConfig,
) -> Result<PipelineReport, PipelineError> {
    for (i, poly) in family.polygons().iter().enumerate() {
        if poly.len() != 6 {
            return Err(PipelineError::NotHexagonFamily(i, poly.len()));
        }
    }
    let min_cos = config
        .min_cos_sq_theta
        .clone()
        .unwrap_or_else(|| (int(3) + params.cos_alpha()) / int(4));
    if !min_cos.is_positive() || min_cos > Scalar::one() {
        return Err(PipelineError::InvalidThreshold(format!(
            "cos^2 theta threshold must lie in (0, 1], got {min_cos}"
        )));
    }
    if params.cos_alpha() > &(int(2) * &min_cos - Scalar::one()) {
        return Err(PipelineError::InvalidThreshold(format!(
            "threshold {min_cos} leaves the transfer domain for cos_alpha = {}",
            params.cos_alpha()
        )));
    }
    if let Some(phi) = &config.phi {
        if !phi.is_positive() {
            return Err(PipelineError::InvalidPhi(phi.clone()));
        }
    }
    let bits = config.precision_bits.clamp(16, PRECISION_CAP);

    let mut report = PipelineReport::empty();
    if family.is_empty() {
        return Ok(report.fail(
            "projection",
            "the family has no hexagons; a rainbow needs three sources".into(),
        ));
    }

    // Stage 1: projection.
    let (spec, cos_sqs) =
        match choose_projection(family, config.seed, &min_cos, config.max_attempts) {
            Ok(ok) => ok,
            Err(e) => return Ok(report.fail("projection", e.to_string())),
        };
    report.record(
        "projection",
        format!(
            "direction ({}, {}, {}); all {} projected points distinct",
            spec.direction().x,
            spec.direction().y,
            spec.direction().z,
            family.point_set().len()
        ),
    );
    report.projection = Some(spec.clone());
    report.cos_sq_theta = cos_sqs.clone();

    // Stage 2: fatness filtering.
    let mut survivors = Vec::new();
    let mut fat_count = 0usize;
    for (i, poly) in family.polygons().iter().enumerate() {
        if is_fat_hexagon(family.point_set(), poly, params)? {
            fat_count += 1;
            if cos_sqs[i] >= min_cos {
                survivors.push(i);
            }
        }
    }
    report.record(
        "fatness-filter",
        format!(
            "{} of {} hexagons are fat; {} also have cos^2 theta >= {}",
            fat_count,
            family.len(),
            survivors.len(),
            min_cos
        ),
    );
    report.survivors = survivors.clone();
    if survivors.len() < 3 {
        return Ok(report.fail(
            "fatness-filter",
            format!(
                "only {} hexagon(s) survive fatness filtering; a rainbow needs 3",
                survivors.len()
            ),
        ));
    }

    // Stage 3: worst-case transfer and bucket width.
    let worst = survivors
        .iter()
        .map(|&i| &cos_sqs[i])
        .min()
        .expect("survivors nonempty")
        .clone();
    let transfer = match fatness_transfer(params, &worst, bits) {
        Ok(t) => t,
        Err(e) => return Ok(report.fail("transfer", e.to_string())),
    };
    report.record(
        "transfer",
        format!(
            "worst cos^2 theta = {}; c'^2 = {}, cos_alpha' = {}, tan(phi_max) in [{}, {}]",
            worst,
            transfer.c_prime_sq,
            transfer.cos_alpha_prime,
            transfer.tan_phi_max_bounds.lo(),
            transfer.tan_phi_max_bounds.hi()
        ),
    );
    report.transfer = Some(transfer.clone());

    let phi_lower = atan_interval(transfer.tan_phi_max_bounds.lo(), bits)
        .lo()
        .clone();
    let phi = match &config.phi {
        Some(phi) => {
            if phi < &phi_lower {
                phi.clone()
            } else {
                // Conservative: accept only widths certified below the bound.
                return Ok(report.fail(
                    "phi-validation",
                    format!(
                        "bucket width {phi} is not certified below the angle bound (certified lower bound {phi_lower})"
                    ),
                ));
            }
        }
        None => {
            let auto = phi_lower / int(2);
            if !auto.is_positive() {
                return Ok(report.fail(
                    "phi-validation",
                    "the transferred angle bound is degenerate (phi_max = 0)".into(),
                ));
            }
            auto
        }
    };
    report.record("phi", format!("bucket width phi = {phi} rad"));
    report.phi = Some(phi.clone());

    // Stage 4: per-hexagon transfer, projection, fatness check, labeling.
    let labeled: Vec<Result<LabeledHexagon, PipelineError>> = survivors
        .par_iter()
        .map(|&i| -> Result<LabeledHexagon, PipelineError> {
            let own = params.transfer(&cos_sqs[i])?;
            let (idxs, verts) = project_hexagon(family, i, &spec)?;
            // Verify the transferred guarantee on the actual image.
            let embedded: Vec<Point3> = verts
                .iter()
                .map(|(x, y)| Point3::new(x.clone(), y.clone(), Scalar::zero()))
                .collect();
            let ps = PointSet::new(embedded)?;
            let poly = validate_polygon(&ps, &(0..6).collect::<Vec<_>>())?;
            if !is_fat_hexagon(&ps, &poly, &own)? {
                return Err(PipelineError::NotFat(i));
            }
            label_hexagon(i, &idxs, &verts, own.cos_alpha(), bits)
        })
        .collect();
    let mut labeled_ok = Vec::with_capacity(labeled.len());
    for r in labeled {
        match r {
            Ok(l) => labeled_ok.push(l),
            Err(e) => return Ok(report.fail("labeling", e.to_string())),
        }
    }
    report.record(
        "labeling",
        format!(
            "{} hexagons labeled; fat angles at B, D, F",
            labeled_ok.len()
        ),
    );

    // Stage 5: bucketing.
    let (bucket_local, cells) = match bucket_by_slope(&labeled_ok, &phi, bits) {
        Ok(ok) => ok,
        Err(e) => return Ok(report.fail("bucketing", e.to_string())),
    };
    let bucket: Vec<usize> = bucket_local.iter().map(|&k| labeled_ok[k].source).collect();
    report.record(
        "bucketing",
        format!(
            "largest bucket holds {} of {} hexagons at cells ({}, {}, {})",
            bucket.len(),
            labeled_ok.len(),
            cells[0],
            cells[1],
            cells[2]
        ),
    );
    report.bucket = bucket.clone();
    report.bucket_cells = Some(cells);
    if bucket.len() < 3 {
        return Ok(report.fail(
            "bucketing",
            format!(
                "largest slope bucket holds {} hexagon(s); a rainbow needs 3",
                bucket.len()
            ),
        ));
    }

    // Stage 6: diagonal graph.
    let refs: Vec<&LabeledHexagon> = bucket_local.iter().map(|&k| &labeled_ok[k]).collect();
    let graph = match build_triangle_graph(&refs) {
        Ok(g) => g,
        Err(e) => return Ok(report.fail("graph", e.to_string())),
    };
    report.record(
        "graph",
        format!(
            "{} corner points, {} diagonal edges; per-hexagon triangles edge-disjoint",
            graph.vertices.len(),
            graph.edges.len()
        ),
    );
    report.graph = Some(graph.clone());

    // Stage 7: rainbow triangle.
    let rainbow = match find_rainbow_triangle(&graph) {
        Some(t) => t,
        None => {
            report.record("rainbow", "no triangle with three distinct sources".into());
            report.outcome = Outcome::NoRainbow {
                reason: "the diagonal graph has no rainbow triangle".into(),
            };
            return Ok(report);
        }
    };
    report.record(
        "rainbow",
        format!(
            "triangle on points ({}, {}, {}) with sources ({}, {}, {})",
            rainbow.vertices[0],
            rainbow.vertices[1],
            rainbow.vertices[2],
            rainbow.sources[0],
            rainbow.sources[1],
            rainbow.sources[2]
        ),
    );
    report.rainbow = Some(rainbow.clone());

    // Stage 8: extraction, decided by the exact classifier.
    match extract_bad_pair(&rainbow, family) {
        Ok(w) => {
            debug_assert!(intersects_badly(&w.classification));
            let matched = w.diagnostics.predicted_pair == Some((w.i, w.j));
            report.record(
                "extraction",
                format!(
                    "pair ({}, {}) intersects badly (verified); side/tilt prediction {}",
                    w.i,
                    w.j,
                    if matched { "matched" } else { "differed" }
                ),
            );
            report.witness = Some((w.i, w.j, w.classification));
            report.diagnostics = Some(w.diagnostics);
            report.outcome = Outcome::Witness { i: w.i, j: w.j };
            Ok(report)
        }
        Err(PipelineError::NoBadPairFound(diag)) => {
            report.diagnostics = Some(*diag);
            Ok(report.fail(
                "extraction",
                "no badly intersecting pair among the rainbow sources".into(),
            ))
        }
        Err(e) => Ok(report.fail("extraction", e.to_string())),
    }
}
