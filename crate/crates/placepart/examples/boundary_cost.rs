//! The polar fan boundary model: how triangle coverage turns radii into a
//! partition, and how cut size and imbalance combine into the cost.

use placepart::boundary::{cost, partition_vector, Boundary, Corner, CostParams};
use placepart::gridgraph::build_grid_graph;
use placepart::steiner::route_all;
use placepart::synth::uniform_instance;

fn main() {
    let netlist = uniform_instance(5, 800, 320, 32.0, 32.0);
    let trees = route_all(&netlist);
    let grid = build_grid_graph(&netlist, 16, 16, &trees).unwrap();
    let params = CostParams {
        alpha_c: 1.0,
        alpha_b: 4.0,
    };

    // Quarter-circle fans of growing radius from the bottom-left corner.
    let m = 64;
    println!("radius  covered  cost");
    for step in 0..=8 {
        let r = netlist.layout_diag() * step as f64 / 8.0;
        let boundary = Boundary::new(Corner::BottomLeft, m, vec![r; m + 1], 32.0, 32.0);
        let p = partition_vector(&boundary, &grid);
        let covered = p.labels.iter().filter(|&&l| l == 1).count();
        let c = cost(&boundary, &grid, params).unwrap();
        println!("{r:6.1}  {covered:7}  {c:.4}");
    }

    // The same fan from each corner covers a different region.
    let r = 0.45 * netlist.layout_diag();
    for corner in [
        Corner::BottomLeft,
        Corner::BottomRight,
        Corner::TopLeft,
        Corner::TopRight,
    ] {
        let boundary = Boundary::new(corner, m, vec![r; m + 1], 32.0, 32.0);
        let c = cost(&boundary, &grid, params).unwrap();
        println!("corner {corner:?}: cost {c:.4}");
    }
}
