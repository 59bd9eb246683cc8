use std::io::{self, Write};

use nalgebra::Vector4;

use super::CubeInstance;

/// Triangles of the unit cube, as corner indices. Corner `i` has x, y, z of
/// +0.5 where bits 0, 1, 2 of `i` are set and -0.5 elsewhere. Faces wind
/// counter-clockwise seen from outside.
const FACES: [[usize; 3]; 12] = [
    [0, 4, 6],
    [0, 6, 2],
    [1, 3, 7],
    [1, 7, 5],
    [0, 1, 5],
    [0, 5, 4],
    [2, 6, 7],
    [2, 7, 3],
    [0, 2, 3],
    [0, 3, 1],
    [4, 5, 7],
    [4, 7, 6],
];

fn corner(i: usize) -> Vector4<f64> {
    let c = |bit: usize| if i & (1 << bit) != 0 { 0.5 } else { -0.5 };
    Vector4::new(c(0), c(1), c(2), 1.0)
}

/// Wavefront OBJ: 8 vertices and 12 triangles per cube. OBJ has no RGBA
/// faces, so each cube's color goes in a comment line before its vertices.
pub fn export_obj(cubes: &[CubeInstance], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "# asgen scene: {} cubes", cubes.len())?;
    for (n, cube) in cubes.iter().enumerate() {
        let [r, g, b, a] = cube.color;
        writeln!(out, "# cube {n} color {r} {g} {b} {a}")?;
        for i in 0..8 {
            let v = cube.transform * corner(i);
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        let base = n * 8 + 1;
        for [a, b, c] in FACES {
            writeln!(out, "f {} {} {}", base + a, base + b, base + c)?;
        }
    }
    Ok(())
}

/// `[{"transform": [16 numbers, row-major], "color": [r, g, b, a]}, ...]`,
/// one cube per line.
pub fn export_json(cubes: &[CubeInstance], out: &mut impl Write) -> io::Result<()> {
    out.write_all(b"[")?;
    for (n, cube) in cubes.iter().enumerate() {
        let transform: Vec<f64> = (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).map(|rc| cube.transform[rc]).collect();
        let value = serde_json::json!({ "transform": transform, "color": cube.color });
        out.write_all(if n == 0 { b"\n  " } else { b",\n  " })?;
        serde_json::to_writer(&mut *out, &value)?;
    }
    out.write_all(if cubes.is_empty() { b"]\n" } else { b"\n]\n" })?;
    Ok(())
}
