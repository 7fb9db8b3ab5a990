//! Median smoothing on a triangle mesh: weighted-median face normals pull a
//! spiked vertex back toward the surrounding surface.
//!
//! Run with: cargo run --example mesh_median

use rangeface::{smooth_mesh, Point3, TriangleMesh};

/// Builds a height-field mesh over an `n x n` vertex grid with two
/// triangles per cell.
fn grid_mesh(n: usize, height: impl Fn(usize, usize) -> f64) -> TriangleMesh {
    let mut vertices = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            vertices.push(Point3::new(col as f64, row as f64, height(row, col)));
        }
    }
    let mut faces = Vec::with_capacity(2 * (n - 1) * (n - 1));
    for row in 0..n - 1 {
        for col in 0..n - 1 {
            let v00 = row * n + col;
            let v01 = v00 + 1;
            let v10 = v00 + n;
            let v11 = v10 + 1;
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    TriangleMesh::new(vertices, faces).expect("grid meshes are watertight by construction")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    const N: usize = 9;
    let spike = (N / 2) * N + N / 2;
    // A gentle dome with one vertex kicked far off the surface.
    let mesh = grid_mesh(N, |row, col| {
        let (dr, dc) = (row as f64 - 4.0, col as f64 - 4.0);
        let dome = 3.0 - 0.1 * (dr * dr + dc * dc);
        if (row, col) == (N / 2, N / 2) { dome + 25.0 } else { dome }
    });

    println!(
        "{} vertices, {} faces; spike vertex z = {:.2}",
        mesh.vertex_count(),
        mesh.face_count(),
        mesh.vertices()[spike].z
    );
    for iterations in [1, 3, 10] {
        let smoothed = smooth_mesh(&mesh, iterations)?;
        println!(
            "after {iterations:>2} iteration(s): spike vertex z = {:.3}",
            smoothed.vertices()[spike].z
        );
    }
    Ok(())
}
