//! Runs the projection screening pipeline: project a family of fat
//! hexagons to a plane, keep the gently tilted ones, transfer the fatness
//! parameters, bucket the hexagons by the inclination of a leading
//! diagonal, and look for a rainbow triangle in the diagonal graph — whose
//! existence forces some pair to intersect badly. Every reported witness
//! is re-checked with the exact classifier.
//!
//! Run with: cargo run --example projection_pipeline

use polyfam::classify::{classify_pair, intersects_badly};
use polyfam::construct::{fat_hexagon_stack, scattered_hexagons};
use polyfam::model::FatnessParams;
use polyfam::pipeline::{run_pipeline, Outcome, PipelineConfig};
use polyfam::scalar::{int, ratio};

fn main() {
    let params = FatnessParams::new(&int(2), &ratio(3, 5)).unwrap();
    let config = PipelineConfig::default();

    // A stack of overlapping fat hexagons: the pipeline should surface a
    // bad pair.
    let stack = fat_hexagon_stack(3, &params, 0).unwrap();
    let report = run_pipeline(&stack, &params, &config).unwrap();
    println!("=== stack of 3 ===");
    print!("{}", report.render());
    match &report.outcome {
        Outcome::Witness { i, j } => {
            let fresh = classify_pair(
                stack.point_set(),
                &stack.polygons()[*i],
                &stack.polygons()[*j],
            )
            .unwrap();
            assert!(intersects_badly(&fresh));
            println!("re-checked witness ({i}, {j}) with the exact classifier: bad\n");
        }
        other => panic!("expected a witness, got {other:?}"),
    }

    // Far-apart hexagons: the pipeline completes and certifies that its
    // screening found no rainbow triangle, hence no witness this way.
    let scattered = scattered_hexagons(6, &params, 0).unwrap();
    let report = run_pipeline(&scattered, &params, &config).unwrap();
    println!("=== scattered 6 ===");
    print!("{}", report.render());
    assert!(matches!(report.outcome, Outcome::NoRainbow { .. }));
}
