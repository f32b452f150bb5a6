//! Grid-based layout formation: pin weights, Steiner-crossing edge weights
//! and the Laplacian quadratic-form identity for cut sizes.

use placepart::boundary::{cut_size, PartitionVector};
use placepart::gridgraph::{build_grid_graph, laplacian};
use placepart::steiner::route_all;
use placepart::synth::uniform_instance;

fn main() {
    let netlist = uniform_instance(3, 1000, 400, 32.0, 32.0);
    let trees = route_all(&netlist);
    let grid = build_grid_graph(&netlist, 16, 16, &trees).unwrap();

    println!(
        "16x16 grid over {} cells / {} nets: W_v = {:.0}, W_e = {:.1}",
        netlist.cells.len(),
        netlist.nets.len(),
        grid.total_node_weight,
        grid.total_edge_weight
    );
    let occupied = grid.cells_in_grid.iter().filter(|c| !c.is_empty()).count();
    println!("occupied grids: {occupied}/256");

    // A vertical half split, evaluated through the Laplacian and checked
    // against the direct cut-edge sum.
    let labels: Vec<u8> = (0..256).map(|v| ((v % 16) < 8) as u8).collect();
    let p = PartitionVector { labels };
    let l = laplacian(&grid);
    let quad = cut_size(&p, &l).unwrap();
    let direct: f64 = grid
        .edges()
        .filter(|&(u, v, _)| p.labels[u] != p.labels[v])
        .map(|(_, _, w)| w)
        .sum();
    println!("half-split cut via P L P^T: {quad:.3}");
    println!("half-split cut via edge sum: {direct:.3}");
    println!("difference: {:.2e}", (quad - direct).abs());
}
