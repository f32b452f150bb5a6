//! Score an externally produced assignment on the grid model and compare
//! it against the partitioner's own result.

use placepart::annealer::SAConfig;
use placepart::gridgraph::build_grid_graph;
use placepart::kway::{kway_partition, score_labels, KWayConfig};
use placepart::steiner::route_all;
use placepart::synth::uniform_instance;

fn main() {
    let netlist = uniform_instance(19, 2000, 800, 32.0, 32.0);
    let trees = route_all(&netlist);
    let grid = build_grid_graph(&netlist, 16, 16, &trees).unwrap();

    // A topology-blind external "partitioner": split by cell index parity.
    let scattered: Vec<usize> = (0..netlist.cells.len()).map(|c| c % 2).collect();
    let ext = score_labels(&netlist, &grid, &trees, scattered, 2, 0.1, 0.0).unwrap();
    println!(
        "index-parity labels: cut {:.1}, fragments {}, critical crossings {}",
        ext.cut_size, ext.fragments, ext.critical_crossings
    );

    let cfg = KWayConfig {
        k: 2,
        epsilon: 0.1,
        nx: 16,
        ny: 16,
        sa: SAConfig::defaults(netlist.layout_diag()).with_seed(2),
        critical_threshold: 0.0,
        mesh_svg_dir: None,
    };
    let ours = kway_partition(&netlist, &cfg).unwrap();
    println!(
        "spatial partitioner:  cut {:.1}, fragments {}, critical crossings {}",
        ours.cut_size, ours.fragments, ours.critical_crossings
    );
    println!(
        "cut ratio external/spatial: {:.1}x",
        ext.cut_size / ours.cut_size
    );
}
