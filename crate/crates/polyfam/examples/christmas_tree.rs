//! Builds the triangle construction that packs m^2 pairwise compatible
//! triangles onto only 2m+1 points, then verifies every pair exactly.
//!
//! Run with: cargo run --example christmas_tree

use polyfam::classify::{verify_family, Relation};
use polyfam::construct::christmas_tree;
use polyfam::doc::FamilyDocument;

fn main() {
    for m in [2usize, 4, 8] {
        let family = christmas_tree(m).unwrap();
        let n = family.point_set().len();
        let pairs = family.len() * (family.len() - 1) / 2;
        println!(
            "m = {m}: {} triangles on {n} points ({pairs} pairs)",
            family.len()
        );
        assert_eq!(family.len(), m * m);
        assert_eq!(n, 2 * m + 1);

        // Every pair of members meets in at most a shared vertex or a fully
        // shared edge; the exact checker confirms there are no violations.
        let violations = verify_family(&family, Relation::VertexOrEdge);
        println!(
            "  vertex-or-edge check: {} violation(s)",
            violations.len()
        );
        assert!(violations.is_empty());

        // m^2 members on 2m+1 points: quadratically many triangles from
        // linearly many points, which is why the family is interesting.
        println!("  density: {} triangles per point", family.len() / n);
    }

    // The family serializes to a plain, line-oriented document.
    let text = FamilyDocument::from_family(&christmas_tree(2).unwrap())
        .serialize()
        .unwrap();
    println!("\ndocument for m = 2:\n{text}");
}
