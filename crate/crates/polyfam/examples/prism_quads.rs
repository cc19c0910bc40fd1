//! Builds quadrilateral "wall" families inside a prism: one parallelogram
//! per pair of base points, m(m-1)/2 quads on 2m points, with no bad
//! intersections anywhere.
//!
//! Run with: cargo run --example prism_quads

use polyfam::classify::{verify_family, Relation};
use polyfam::construct::prism_quads;
use polyfam::Vec3;

fn main() {
    for (m, seed) in [(4usize, 0u64), (6, 1), (9, 7)] {
        let family = prism_quads(m, seed, None).unwrap();
        println!(
            "m = {m}, seed {seed}: {} quads on {} points",
            family.len(),
            family.point_set().len()
        );
        assert_eq!(family.len(), m * (m - 1) / 2);

        let violations = verify_family(&family, Relation::NoBadIntersection);
        println!("  no-bad check: {} violation(s)", violations.len());
        assert!(violations.is_empty());
    }

    // The sweep axis is configurable; any non-zero direction works, and the
    // family stays clean because the walls still pairwise share one whole
    // vertical edge or nothing.
    let axis = Vec3::from_i64(1, 1, 3);
    let slanted = prism_quads(5, 2, Some(axis)).unwrap();
    println!(
        "slanted axis (1, 1, 3): {} quads on {} points, {} violation(s)",
        slanted.len(),
        slanted.point_set().len(),
        verify_family(&slanted, Relation::NoBadIntersection).len()
    );
}
