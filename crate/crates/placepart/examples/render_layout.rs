//! Render a partitioned layout as SVG: colored grid regions, Steiner trees
//! and the winning fan boundary polyline.

use placepart::annealer::SAConfig;
use placepart::kway::{kway_partition_detailed, KWayConfig};
use placepart::render::{render_svg, spec_with_boundary, RenderSpec};
use placepart::synth::uniform_instance;
use placepart::{best_of_corners, Boundary};

fn main() {
    let netlist = uniform_instance(23, 1500, 600, 64.0, 64.0);
    let cfg = KWayConfig {
        k: 4,
        epsilon: 0.1,
        nx: 64,
        ny: 64,
        sa: SAConfig::defaults(netlist.layout_diag()).with_seed(4),
        critical_threshold: 0.0,
        mesh_svg_dir: None,
    };
    let (result, grid, trees) = kway_partition_detailed(&netlist, &cfg).unwrap();
    println!(
        "4-way result: cut {:.1}, fragments {}",
        result.cut_size, result.fragments
    );

    let dir = std::env::temp_dir();
    let plain = dir.join("placepart_partition.svg");
    let spec = RenderSpec {
        trees: true,
        ..RenderSpec::default()
    };
    render_svg(&netlist, &grid, &result, &spec, Some(&trees), &plain).unwrap();
    println!("wrote {}", plain.display());

    // Overlay the root-level winning boundary on a 2-way map.
    let root = best_of_corners(&grid, &cfg.sa).unwrap();
    let boundary: &Boundary = &root.result.boundary;
    let with_boundary = dir.join("placepart_boundary.svg");
    let mut result2 = result.clone();
    result2.grid_label = root
        .result
        .labels
        .labels
        .iter()
        .map(|&l| l as usize)
        .collect();
    render_svg(
        &netlist,
        &grid,
        &result2,
        &spec_with_boundary(boundary),
        None,
        &with_boundary,
    )
    .unwrap();
    println!("wrote {}", with_boundary.display());
}
