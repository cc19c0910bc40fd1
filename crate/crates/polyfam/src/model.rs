//! Families of convex planar polygons over a shared point set, and the
//! fat-hexagon vocabulary: fatness parameters and their exact transfer
//! through a projection at bounded plane angle.

use crate::kernel::{supporting_plane, squared_cosine, KernelError, Plane, Point3, Vec3};
use crate::scalar::{int, Scalar};
use num_traits::{One, Signed};
use std::collections::{BTreeMap, HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("point index {0} out of range for {1} points")]
    IndexOutOfRange(usize, usize),
    #[error("polygon repeats point index {0}")]
    RepeatedVertex(usize),
    #[error("polygon needs at least three vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertices are not coplanar")]
    NotCoplanar,
    #[error("polygon vertices are collinear")]
    Collinear,
    #[error("polygon is not strictly convex in cyclic order")]
    NotConvex,
    #[error("polygon {0} duplicates polygon {1}")]
    DuplicatePolygon(usize, usize),
    #[error("operation requires a hexagon, got a polygon with {0} vertices")]
    NotHexagon(usize),
    #[error("invalid fatness parameters: {0}")]
    InvalidParams(String),
    #[error(
        "projection angle out of the transfer domain: need cos_alpha <= 2 cos^2(theta) - 1, \
         got cos_alpha = {cos_alpha} with cos^2(theta) = {cos_sq_theta}"
    )]
    OutOfDomain {
        cos_alpha: Scalar,
        cos_sq_theta: Scalar,
    },
}

impl From<KernelError> for ModelError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::NotCoplanar => ModelError::NotCoplanar,
            _ => ModelError::Collinear,
        }
    }
}

/// A finite set of pairwise distinct labelled points; polygons reference
/// points by index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    points: Vec<Point3>,
}

impl PointSet {
    pub fn new(points: Vec<Point3>) -> Result<PointSet, ModelError> {
        let mut seen: HashMap<&Point3, usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if let Some(&j) = seen.get(p) {
                return Err(ModelError::DuplicatePoint(j, i));
            }
            seen.insert(p, i);
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> &Point3 {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }
}

/// A strictly convex planar polygon over a point set, stored as vertex
/// indices in counterclockwise order with respect to the canonical normal of
/// its supporting plane, rotated so the smallest index comes first. Built only
/// through [`validate_polygon`], so a value of this type is always valid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConvexPlanarPolygon {
    vertices: Vec<usize>,
    plane: Plane,
}

impl ConvexPlanarPolygon {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    #[allow(clippy::len_without_is_empty)] // a polygon has at least 3 vertices
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn points(&self, ps: &PointSet) -> Vec<Point3> {
        self.vertices.iter().map(|&i| ps.get(i).clone()).collect()
    }

    /// Unordered vertex-index pairs forming the polygon's edges.
    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % k];
                (a.min(b), a.max(b))
            })
            .collect()
    }
}

/// Validates a cyclic vertex-index list as a strictly convex planar polygon.
///
/// Clockwise input is accepted and reversed; the stored order is always
/// counterclockwise around the canonical plane normal, starting at the
/// smallest vertex index. Strict convexity means every vertex is strictly on
/// the interior side of every non-incident edge, which also rules out
/// repeated or collinear vertices and self-crossing orders.
pub fn validate_polygon(ps: &PointSet, indices: &[usize]) -> Result<ConvexPlanarPolygon, ModelError> {
    if indices.len() < 3 {
        return Err(ModelError::TooFewVertices(indices.len()));
    }
    let mut seen = HashSet::new();
    for &i in indices {
        if i >= ps.len() {
            return Err(ModelError::IndexOutOfRange(i, ps.len()));
        }
        if !seen.insert(i) {
            return Err(ModelError::RepeatedVertex(i));
        }
    }
    let pts: Vec<Point3> = indices.iter().map(|&i| ps.get(i).clone()).collect();
    let plane = supporting_plane(&pts)?;
    let orientation = convexity_orientation(&pts, &plane).ok_or(ModelError::NotConvex)?;
    let mut vertices: Vec<usize> = indices.to_vec();
    if orientation < 0 {
        vertices.reverse();
    }
    let min_pos = vertices
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(i, _)| i)
        .unwrap();
    vertices.rotate_left(min_pos);
    Ok(ConvexPlanarPolygon { vertices, plane })
}

/// Returns `1` if the cyclic order is strictly convex counterclockwise around
/// the plane normal, `-1` if strictly convex clockwise, `None` otherwise.
fn convexity_orientation(pts: &[Point3], plane: &Plane) -> Option<i8> {
    let n = plane.normal();
    let k = pts.len();
    let mut sign = 0i8;
    for i in 0..k {
        let a = &pts[i];
        let e = pts[(i + 1) % k].sub(a);
        for (j, p) in pts.iter().enumerate() {
            if j == i || j == (i + 1) % k {
                continue;
            }
            let s = crate::scalar::sgn(&e.cross(&p.sub(a)).dot(n));
            if s == 0 {
                return None;
            }
            if sign == 0 {
                sign = s;
            } else if sign != s {
                return None;
            }
        }
    }
    Some(sign)
}

/// A family of polygons over one shared point set. Polygons are pairwise
/// distinct as vertex sets in cyclic order; the metadata travels with the
/// family through the text format.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Family {
    point_set: PointSet,
    polygons: Vec<ConvexPlanarPolygon>,
    metadata: BTreeMap<String, String>,
}

impl Family {
    pub fn new(point_set: PointSet, index_lists: &[Vec<usize>]) -> Result<Family, ModelError> {
        let mut polygons = Vec::with_capacity(index_lists.len());
        for list in index_lists {
            polygons.push(validate_polygon(&point_set, list)?);
        }
        for i in 0..polygons.len() {
            for j in (i + 1)..polygons.len() {
                if polygons[i] == polygons[j] {
                    return Err(ModelError::DuplicatePolygon(j, i));
                }
            }
        }
        Ok(Family {
            point_set,
            polygons,
            metadata: BTreeMap::new(),
        })
    }

    pub fn point_set(&self) -> &PointSet {
        &self.point_set
    }

    pub fn polygons(&self) -> &[ConvexPlanarPolygon] {
        &self.polygons
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: &str, value: &str) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// The common vertex count if every polygon has the same number of
    /// vertices; `None` for an empty or mixed family.
    pub fn uniform_k(&self) -> Option<usize> {
        let first = self.polygons.first()?.len();
        self.polygons
            .iter()
            .all(|p| p.len() == first)
            .then_some(first)
    }
}

/// Translates every point of the family by `v`. Validity of all polygons is
/// preserved exactly.
pub fn translate_family(family: &Family, v: &Vec3) -> Family {
    let points = family
        .point_set
        .points()
        .iter()
        .map(|p| p.add(v))
        .collect();
    let mut out = Family {
        point_set: PointSet { points },
        polygons: family.polygons.clone(),
        metadata: family.metadata.clone(),
    };
    // Planes move with the translation; recompute the canonical forms.
    for poly in out.polygons.iter_mut() {
        let pts: Vec<Point3> = poly.vertices.iter().map(|&i| out.point_set.get(i).clone()).collect();
        poly.plane = supporting_plane(&pts).expect("translation preserves planarity");
    }
    out
}

/// Fatness bounds for hexagons: sides within ratio `c` of one another (stored
/// as `c^2` so transfers stay rational) and an alternating vertex triple whose
/// interior angles lie within `[alpha, pi - alpha]`, with `alpha` given by its
/// cosine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FatnessParams {
    c_sq: Scalar,
    cos_alpha: Scalar,
}

impl FatnessParams {
    /// Builds parameters from the side-ratio bound `c >= 1` and
    /// `cos_alpha in (0, 1]`.
    pub fn new(c: &Scalar, cos_alpha: &Scalar) -> Result<FatnessParams, ModelError> {
        Self::from_c_sq(&(c * c), cos_alpha.clone()).and_then(|p| {
            if c < &Scalar::one() {
                Err(ModelError::InvalidParams(format!("c must be >= 1, got {c}")))
            } else {
                Ok(p)
            }
        })
    }

    /// Builds parameters from `c^2 >= 1` directly; this is the form projection
    /// transfers produce.
    pub fn from_c_sq(c_sq: &Scalar, cos_alpha: Scalar) -> Result<FatnessParams, ModelError> {
        if c_sq < &Scalar::one() {
            return Err(ModelError::InvalidParams(format!(
                "c^2 must be >= 1, got {c_sq}"
            )));
        }
        if !cos_alpha.is_positive() || cos_alpha > Scalar::one() {
            return Err(ModelError::InvalidParams(format!(
                "cos_alpha must lie in (0, 1], got {cos_alpha}"
            )));
        }
        Ok(FatnessParams {
            c_sq: c_sq.clone(),
            cos_alpha,
        })
    }

    pub fn c_sq(&self) -> &Scalar {
        &self.c_sq
    }

    pub fn cos_alpha(&self) -> &Scalar {
        &self.cos_alpha
    }

    /// Exact transfer of the bounds through an orthogonal projection onto a
    /// plane whose angle `theta` with the hexagon plane satisfies
    /// `cos^2(theta) = cos_sq_theta`: the projected hexagon of a
    /// `(c, alpha)`-fat hexagon is `(c', alpha')`-fat with
    /// `c'^2 = c^2 / cos^2(theta)` and
    /// `cos(alpha') = (cos(alpha) + sin^2(theta)) / cos^2(theta)`.
    /// Errors outside the domain `cos_alpha <= 2 cos^2(theta) - 1`.
    pub fn transfer(&self, cos_sq_theta: &Scalar) -> Result<FatnessParams, ModelError> {
        if !cos_sq_theta.is_positive() || cos_sq_theta > &Scalar::one() {
            return Err(ModelError::InvalidParams(format!(
                "cos^2(theta) must lie in (0, 1], got {cos_sq_theta}"
            )));
        }
        let bound = int(2) * cos_sq_theta - Scalar::one();
        if self.cos_alpha > bound {
            return Err(ModelError::OutOfDomain {
                cos_alpha: self.cos_alpha.clone(),
                cos_sq_theta: cos_sq_theta.clone(),
            });
        }
        let c_sq = &self.c_sq / cos_sq_theta;
        let cos_alpha = (&self.cos_alpha + Scalar::one() - cos_sq_theta) / cos_sq_theta;
        FatnessParams::from_c_sq(&c_sq, cos_alpha)
    }
}

/// Squared cosine and cosine sign of the interior angle at vertex position
/// `i` of the polygon.
pub fn interior_angle_sq_cos(
    ps: &PointSet,
    poly: &ConvexPlanarPolygon,
    i: usize,
) -> (Scalar, i8) {
    let k = poly.len();
    let v = ps.get(poly.vertices()[i]);
    let prev = ps.get(poly.vertices()[(i + k - 1) % k]);
    let next = ps.get(poly.vertices()[(i + 1) % k]);
    squared_cosine(&prev.sub(v), &next.sub(v)).expect("polygon vertices are distinct")
}

/// Whether the alternating vertex triple at positions `{start, start+2,
/// start+4}` has all three interior angles within `[alpha, pi - alpha]`,
/// i.e. `|cos| <= cos_alpha` at each of the three vertices.
fn triple_is_fat(
    ps: &PointSet,
    poly: &ConvexPlanarPolygon,
    params: &FatnessParams,
    start: usize,
) -> bool {
    let cos_alpha_sq = params.cos_alpha() * params.cos_alpha();
    (0..3).all(|t| {
        let (sq, _) = interior_angle_sq_cos(ps, poly, (start + 2 * t) % 6);
        sq <= cos_alpha_sq
    })
}

/// Which of the two alternating vertex triples (positions `{0,2,4}` and
/// `{1,3,5}`) satisfy the angle condition of `params`.
pub fn fat_triples(
    ps: &PointSet,
    poly: &ConvexPlanarPolygon,
    params: &FatnessParams,
) -> Result<(bool, bool), ModelError> {
    if poly.len() != 6 {
        return Err(ModelError::NotHexagon(poly.len()));
    }
    Ok((
        triple_is_fat(ps, poly, params, 0),
        triple_is_fat(ps, poly, params, 1),
    ))
}

/// Whether all side-length ratios are within the `c` bound, compared exactly
/// on squares: `max |e|^2 / min |e|^2 <= (c^2)^2`.
fn sides_within_ratio(ps: &PointSet, poly: &ConvexPlanarPolygon, c_sq: &Scalar) -> bool {
    let k = poly.len();
    let mut min_sq: Option<Scalar> = None;
    let mut max_sq: Option<Scalar> = None;
    for i in 0..k {
        let a = ps.get(poly.vertices()[i]);
        let b = ps.get(poly.vertices()[(i + 1) % k]);
        let len_sq = b.sub(a).norm_sq();
        if min_sq.as_ref().map_or(true, |m| &len_sq < m) {
            min_sq = Some(len_sq.clone());
        }
        if max_sq.as_ref().map_or(true, |m| &len_sq > m) {
            max_sq = Some(len_sq);
        }
    }
    let min_sq = min_sq.unwrap();
    let max_sq = max_sq.unwrap();
    // ratio^2 = max_sq/min_sq <= (c^2)^2
    max_sq / min_sq <= c_sq * c_sq
}

/// Whether the hexagon is `(c, alpha)`-fat: all side ratios at most `c` and at
/// least one alternating vertex triple with interior angles in
/// `[alpha, pi - alpha]`.
pub fn is_fat_hexagon(
    ps: &PointSet,
    poly: &ConvexPlanarPolygon,
    params: &FatnessParams,
) -> Result<bool, ModelError> {
    let (t024, t135) = fat_triples(ps, poly, params)?;
    Ok((t024 || t135) && sides_within_ratio(ps, poly, params.c_sq()))
}
