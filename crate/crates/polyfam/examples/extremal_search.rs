//! Exhaustively searches a small point set for the largest polygon family
//! compatible under each relation, then checks the counting bounds those
//! maxima must obey.
//!
//! Run with: cargo run --example extremal_search

use polyfam::classify::Relation;
use polyfam::search::{check_counting_bounds, max_family, SearchLimits, SearchProblem};
use polyfam::{Point3, PointSet};

fn main() {
    // The eight corners of a cube.
    let cube = PointSet::new(
        [
            [0, 0, 0],
            [2, 0, 0],
            [0, 2, 0],
            [2, 2, 0],
            [0, 0, 2],
            [2, 0, 2],
            [0, 2, 2],
            [2, 2, 2],
        ]
        .iter()
        .map(|p| Point3::from_i64(p[0], p[1], p[2]))
        .collect(),
    )
    .unwrap();

    let mut maxima = Vec::new();
    for relation in Relation::ALL {
        let result = max_family(&SearchProblem {
            point_set: cube.clone(),
            k: 3,
            relation,
            limits: SearchLimits::default(),
        })
        .unwrap();
        assert!(result.exhausted, "the default budget covers 8 points");
        println!(
            "{relation}: maximum {} of {} candidate triangles ({} nodes explored)",
            result.max_size, result.candidates_count, result.nodes_explored
        );
        for poly in result.witness_family.polygons() {
            println!("  member {:?}", poly.vertices());
        }
        let bounds = check_counting_bounds(&result).unwrap();
        print!("{}", bounds.render());
        maxima.push(result.max_size);
        println!();
    }

    // The relations nest, so the maxima must be monotone.
    assert!(maxima[0] <= maxima[1] && maxima[1] <= maxima[2]);
    println!("maxima {maxima:?} are monotone across the nested relations");
}
