//! Renders a scene3d program. With an output path the cubes are written as
//! Wavefront OBJ (or JSON for a `.json` path); without one only a summary
//! is printed.
//!
//! cargo run --example render_scene -- corpus/helix.s3d helix.obj

use std::fs::File;
use std::io::BufWriter;

use asgen::scene3d;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let input = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/snail.s3d").into());
    let output = args.next();

    let source = std::fs::read_to_string(&input)?;
    let graph = scene3d::language()?.graph(&source)?;
    let cubes = scene3d::evaluate(&graph)?;

    let Some(output) = output else {
        let alpha = cubes.iter().map(|c| c.color[3]).fold(f64::INFINITY, f64::min);
        println!("{input}: {} cubes, lowest alpha {alpha:.3}", cubes.len());
        return Ok(());
    };
    let mut out = BufWriter::new(File::create(&output)?);
    if output.ends_with(".json") {
        scene3d::export_json(&cubes, &mut out)?;
    } else {
        scene3d::export_obj(&cubes, &mut out)?;
    }
    println!("{input}: {} cubes written to {output}", cubes.len());
    Ok(())
}
