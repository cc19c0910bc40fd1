//! Renders a polygon family two ways: an SVG line drawing of an orthogonal
//! projection (exact geometry, rounded only at the final print) and an OBJ
//! mesh for 3-D viewers.
//!
//! Run with: cargo run --example export_figures

use polyfam::construct::fat_hexagon_stack;
use polyfam::export::{export_obj, export_svg, DEFAULT_OBJ_DIGITS};
use polyfam::model::FatnessParams;
use polyfam::scalar::{int, ratio};

fn main() {
    let params = FatnessParams::new(&int(2), &ratio(3, 5)).unwrap();
    let family = fat_hexagon_stack(3, &params, 0).unwrap();

    let dir = std::env::temp_dir().join("polyfam-figures");
    std::fs::create_dir_all(&dir).unwrap();

    // SVG: picks a generic projection direction automatically so no member
    // degenerates to a line segment in the drawing.
    let svg = export_svg(&family, None).unwrap();
    let svg_path = dir.join("stack.svg");
    std::fs::write(&svg_path, &svg).unwrap();
    println!("wrote {}", svg_path.display());
    println!("  first line: {}", svg.lines().next().unwrap());
    println!(
        "  {} polygon element(s)",
        svg.matches("<polygon").count()
    );

    // OBJ: one `v` line per point, one `f` line per polygon.
    let obj = export_obj(&family, DEFAULT_OBJ_DIGITS).unwrap();
    let obj_path = dir.join("stack.obj");
    std::fs::write(&obj_path, &obj).unwrap();
    println!("wrote {}", obj_path.display());
    for line in obj.lines().take(3) {
        println!("  {line}");
    }
    println!(
        "  {} vertex line(s), {} face line(s)",
        obj.lines().filter(|l| l.starts_with("v ")).count(),
        obj.lines().filter(|l| l.starts_with("f ")).count()
    );
}
