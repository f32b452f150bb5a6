//! Recursive 4-way partitioning of a clustered layout: each separated
//! cluster should end in its own partition with zero spatial cut.

use placepart::annealer::SAConfig;
use placepart::kway::{kway_partition, KWayConfig};
use placepart::synth::clustered_instance;

fn main() {
    let netlist = clustered_instance(400, 120, 180, 64.0, 64.0);
    let cfg = KWayConfig {
        k: 4,
        epsilon: 0.1,
        nx: 64,
        ny: 64,
        sa: SAConfig::defaults(netlist.layout_diag()).with_seed(0),
        critical_threshold: 0.0,
        mesh_svg_dir: None,
    };
    let result = kway_partition(&netlist, &cfg).unwrap();
    println!(
        "k = {}: cut {:.1}, fragments {}, feasible {}",
        result.k, result.cut_size, result.fragments, result.feasible
    );
    for (label, weight) in result.per_partition_weight.iter().enumerate() {
        let cells = result.cell_label.iter().filter(|&&l| l == label).count();
        println!("  partition {label}: {cells} cells, pin weight {weight:.0}");
    }
}
