//! 2-way partitioning end to end: synthesize a placed netlist, route nets,
//! form the grid, run the corner-trial annealer and report the result.

use placepart::annealer::{best_of_corners, SAConfig};
use placepart::gridgraph::build_grid_graph;
use placepart::steiner::route_all;
use placepart::synth::uniform_instance;

fn main() {
    let netlist = uniform_instance(7, 4000, 1600, 100.0, 80.0);
    let trees = route_all(&netlist);
    let grid = build_grid_graph(&netlist, 64, 64, &trees).unwrap();
    println!(
        "grid 64x64: total pin weight {:.0}, total edge weight {:.1}",
        grid.total_node_weight, grid.total_edge_weight
    );

    let cfg = SAConfig::defaults(netlist.layout_diag()).with_seed(1);
    let outcome = best_of_corners(&grid, &cfg).unwrap();
    let labels = &outcome.result.labels.labels;
    let cut: f64 = grid
        .edges()
        .filter(|&(u, v, _)| labels[u] != labels[v])
        .map(|(_, _, w)| w)
        .sum();
    let side1: f64 = labels
        .iter()
        .zip(&grid.node_weight)
        .filter(|(&l, _)| l == 1)
        .map(|(_, &w)| w)
        .sum();
    println!(
        "best corner {:?}: cost {:.4}, spatial cut {:.1}, side weights {:.0} / {:.0}",
        outcome.corner,
        outcome.result.best_cost,
        cut,
        side1,
        grid.total_node_weight - side1
    );
    println!(
        "boundary polyline has {} points; first {:?}",
        outcome.result.boundary.polyline_layout().len(),
        outcome.result.boundary.polyline_layout()[0]
    );
}
