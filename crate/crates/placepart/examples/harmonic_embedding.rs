//! Region embedding: triangulate an L-shaped set of grid centers, pin its
//! boundary to a rectangle and solve the interior harmonically. Writes
//! before/after SVG meshes to the temp directory.

use placepart::embedding::{delaunay, harmonic_embed, map_point};
use placepart::geom::Point;
use placepart::render::mesh_svg;

fn main() {
    // Grid centers of an L-shaped region.
    let mut centers = Vec::new();
    for j in 0..12 {
        for i in 0..12 {
            if i < 5 || j < 5 {
                centers.push(Point::new(i as f64 + 0.5, j as f64 + 0.5));
            }
        }
    }
    let mesh = delaunay(&centers).unwrap();
    println!(
        "L-region: {} vertices, {} triangles, boundary loop of {}",
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.boundary_loop.len()
    );

    let (w, h) = (10.0, 8.0);
    let emb = harmonic_embed(&mesh, w, h).unwrap();
    let interior = mesh.vertices.len() - mesh.boundary_loop.len();
    println!("embedded into {w} x {h}: {interior} interior vertices solved");

    // A cell inside the region follows its containing triangle.
    let cell = Point::new(2.3, 9.7);
    let mapped = map_point(&emb, &mesh, cell).unwrap();
    println!("cell at {cell:?} maps to ({:.3}, {:.3})", mapped.x, mapped.y);

    let edges: Vec<(usize, usize)> = mesh
        .triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .collect();
    let dir = std::env::temp_dir();
    let before = dir.join("placepart_mesh_before.svg");
    let after = dir.join("placepart_mesh_after.svg");
    std::fs::write(&before, mesh_svg(&mesh.vertices, &edges, 24.0)).unwrap();
    std::fs::write(&after, mesh_svg(&emb.positions, &edges, 24.0)).unwrap();
    println!("wrote {} and {}", before.display(), after.display());
}
