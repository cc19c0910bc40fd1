//! Classifies hand-built polygon pairs exactly: the intersection shape of
//! the two convex hulls, the shared vertices and edges, and whether the
//! contact reaches a relative interior. Three pairs illustrate the three
//! compatibility relations drifting apart.
//!
//! Run with: cargo run --example classify_pair

use polyfam::classify::{classify_pair, satisfies, Relation};
use polyfam::model::validate_polygon;
use polyfam::{Point3, PointSet};

fn show(label: &str, raw: &[[i64; 3]], a: &[usize], b: &[usize]) {
    let ps = PointSet::new(
        raw.iter()
            .map(|p| Point3::from_i64(p[0], p[1], p[2]))
            .collect(),
    )
    .unwrap();
    let pa = validate_polygon(&ps, a).unwrap();
    let pb = validate_polygon(&ps, b).unwrap();
    let c = classify_pair(&ps, &pa, &pb).unwrap();
    println!("{label}:\n  {c}");
    for r in Relation::ALL {
        println!(
            "  {r}: {}",
            if satisfies(r, &c) { "satisfied" } else { "violated" }
        );
    }
    println!();
}

fn main() {
    // Two triangles touching at one shared vertex: the tamest possible
    // contact, fine under every relation.
    show(
        "shared vertex only",
        &[[0, 0, 0], [4, 0, 0], [0, 4, 0], [-4, 0, 1], [0, -4, 1]],
        &[0, 1, 2],
        &[0, 3, 4],
    );

    // Two triangles glued along a whole common edge: too much contact to be
    // almost disjoint, but exactly what vertex-or-edge compatibility allows.
    show(
        "fully shared edge",
        &[[0, 0, 0], [4, 0, 0], [0, 4, 0], [1, -4, 2]],
        &[0, 1, 2],
        &[0, 1, 3],
    );

    // One triangle stabbing through the other's interior: the intersection
    // is a segment that enters a relative interior, so even the weakest
    // relation rejects the pair.
    show(
        "interior penetration",
        &[
            [0, 0, 0],
            [4, 0, 0],
            [0, 4, 0],
            [4, 4, 2],
            [-1, -1, -3],
        ],
        &[0, 1, 2],
        &[0, 3, 4],
    );
}
