//! Works with fat hexagons: side ratios bounded by c, and one alternating
//! vertex triple whose interior angles stay at least alpha away from 0 and
//! pi. Also demonstrates the exact transfer map that converts fatness
//! parameters through a tilted orthogonal projection.
//!
//! Run with: cargo run --example fat_hexagons

use polyfam::construct::fat_hexagon_stack;
use polyfam::model::{fat_triples, interior_angle_sq_cos, is_fat_hexagon, FatnessParams};
use polyfam::scalar::{int, ratio};

fn main() {
    // c = 2 (no side more than twice another), cos(alpha) = 3/5.
    let params = FatnessParams::new(&int(2), &ratio(3, 5)).unwrap();
    println!(
        "fatness parameters: c^2 = {}, cos(alpha) = {}",
        params.c_sq(),
        params.cos_alpha()
    );

    let family = fat_hexagon_stack(4, &params, 0).unwrap();
    println!("\nstack of {} hexagons:", family.len());
    for (i, poly) in family.polygons().iter().enumerate() {
        let fat = is_fat_hexagon(family.point_set(), poly, &params).unwrap();
        let (even, odd) = fat_triples(family.point_set(), poly, &params).unwrap();
        println!(
            "  hexagon {i}: fat = {fat} (triple at 0,2,4: {even}; triple at 1,3,5: {odd})"
        );
        assert!(fat);
    }

    // The exact squared cosine at each corner of the first hexagon, next to
    // the threshold cos^2(alpha) it must beat on a fat triple.
    let poly = &family.polygons()[0];
    let threshold = params.cos_alpha() * params.cos_alpha();
    println!("\ncorner |cos|^2 values of hexagon 0 (threshold {threshold}):");
    for i in 0..6 {
        let (sq, sign) = interior_angle_sq_cos(family.point_set(), poly, i);
        println!(
            "  corner {i}: cos^2 = {sq} ({})",
            if sign >= 0 { "acute side" } else { "obtuse side" }
        );
    }

    // Projecting a fat hexagon along a direction tilted by theta against
    // its plane normal keeps it fat for transferred parameters, computed
    // exactly from cos^2(theta).
    let gentle = FatnessParams::new(&int(1), &ratio(1, 2)).unwrap();
    let t = gentle.transfer(&ratio(9, 10)).unwrap();
    println!(
        "\ntransfer of (c^2 = 1, cos(alpha) = 1/2) through cos^2(theta) = 9/10:"
    );
    println!("  c'^2 = {}, cos(alpha') = {}", t.c_sq(), t.cos_alpha());

    // Tilt too far and the angle guarantee evaporates; the map refuses
    // instead of returning something unsound.
    match gentle.transfer(&ratio(7, 10)) {
        Err(e) => println!("  at cos^2(theta) = 7/10 the transfer refuses: {e}"),
        Ok(_) => unreachable!("7/10 lies outside the transfer domain"),
    }
}
