//! Exact geometry for families of convex planar polygons in 3-space.
//!
//! Everything is computed over arbitrary-precision rationals: polygon
//! validation, pairwise hull intersections, and the classification of a pair
//! under three compatibility relations of increasing permissiveness:
//!
//! * **almost disjoint** — the hulls are disjoint or share exactly one common
//!   vertex of both polygons;
//! * **vertex- or edge-compatible** — additionally allows the hulls to meet in
//!   a full common edge;
//! * **no bad intersection** — forbids only *bad* pairs, i.e. pairs that share
//!   at least one vertex while their hulls also meet a point in the relative
//!   interior of one of the polygons.
//!
//! On top of the exact kernel the crate provides:
//!
//! * reference families meeting the known size guarantees
//!   ([`construct::christmas_tree`], [`construct::prism_quads`],
//!   [`construct::fat_hexagon_stack`]);
//! * the *fat hexagon* machinery: fatness parameters, the exact transfer of
//!   fatness bounds through a projection at bounded plane angle, and certified
//!   interval evaluation of the irrational quantities involved
//!   ([`model`], [`certified`]);
//! * an executable witness-finding pipeline that projects a family of fat
//!   hexagons to a generic plane, buckets them by certified diagonal
//!   inclinations, looks for a rainbow triangle of diagonals, and extracts a
//!   re-verified badly intersecting pair ([`pipeline`]);
//! * an exact branch-and-bound search for maximum compatible subfamilies over a
//!   given point set, with checks against the theoretical size bounds
//!   ([`search`]);
//! * a canonical text format for families plus SVG/OBJ exporters
//!   ([`doc`], [`export`]).
//!
//! The `polyfam` binary exposes the same operations as subcommands; the Cargo
//! examples directory walks through each major capability.

pub mod certified;
pub mod classify;
pub mod construct;
pub mod doc;
pub mod export;
pub mod kernel;
pub mod model;
pub mod pipeline;
pub mod scalar;
pub mod search;

pub use classify::{classify_pair, satisfies, verify_family, PairClassification, Relation};
pub use kernel::{IntersectionShape, Plane, Point3, PointLocation, Segment, Vec3};
pub use model::{ConvexPlanarPolygon, Family, FatnessParams, PointSet};
pub use scalar::Scalar;
