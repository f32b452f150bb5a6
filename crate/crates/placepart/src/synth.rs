//! Synthetic placed-netlist generators for examples, benchmarks and tests.
//!
//! Nets are local by construction (pins cluster around an anchor cell),
//! which mirrors how placed designs behave and keeps recursive partitioning
//! meaningful: a share of nets stays internal to any spatially compact
//! region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gridgraph::GridGraph;
use crate::netlist::{Cell, Net, PlacedNetlist};

/// Uniform random cells with spatially local nets.
pub fn uniform_instance(
    seed: u64,
    n_cells: usize,
    n_nets: usize,
    layout_w: f64,
    layout_h: f64,
) -> PlacedNetlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: Vec<Cell> = (0..n_cells)
        .map(|i| Cell {
            id: format!("c{i}"),
            x: rng.gen_range(0.0..layout_w),
            y: rng.gen_range(0.0..layout_h),
        })
        .collect();

    // Bucket cells for local pin sampling.
    let nb = 16usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); nb * nb];
    for (i, c) in cells.iter().enumerate() {
        let bx = ((c.x * nb as f64 / layout_w) as usize).min(nb - 1);
        let by = ((c.y * nb as f64 / layout_h) as usize).min(nb - 1);
        buckets[by * nb + bx].push(i);
    }
    let neighborhood = |cell: usize, buckets: &[Vec<usize>]| -> Vec<usize> {
        let c = &cells[cell];
        let bx = ((c.x * nb as f64 / layout_w) as usize).min(nb - 1) as i64;
        let by = ((c.y * nb as f64 / layout_h) as usize).min(nb - 1) as i64;
        let mut out = Vec::new();
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (x, y) = (bx + dx, by + dy);
                if x >= 0 && y >= 0 && x < nb as i64 && y < nb as i64 {
                    out.extend_from_slice(&buckets[y as usize * nb + x as usize]);
                }
            }
        }
        out
    };

    let mut nets = Vec::with_capacity(n_nets);
    for i in 0..n_nets {
        let anchor = rng.gen_range(0..n_cells);
        let pool = neighborhood(anchor, &buckets);
        let extra = rng.gen_range(1..=3usize);
        let mut pins = vec![anchor];
        let mut tries = 0;
        while pins.len() < 1 + extra && tries < 50 {
            tries += 1;
            let cand = if pool.len() > 1 {
                pool[rng.gen_range(0..pool.len())]
            } else {
                rng.gen_range(0..n_cells)
            };
            if !pins.contains(&cand) {
                pins.push(cand);
            }
        }
        if pins.len() < 2 {
            let mut cand = rng.gen_range(0..n_cells);
            while pins.contains(&cand) {
                cand = rng.gen_range(0..n_cells);
            }
            pins.push(cand);
        }
        // Mostly light nets, a few heavy (timing-critical) ones.
        let weight = if rng.gen_bool(0.05) {
            rng.gen_range(5.0..10.0)
        } else {
            rng.gen_range(0.5..2.0)
        };
        nets.push(Net {
            id: format!("n{i}"),
            weight,
            pins,
        });
    }

    PlacedNetlist {
        layout_width: layout_w,
        layout_height: layout_h,
        cells,
        nets,
    }
}

/// Four well-separated clusters near the layout quadrant centers, with
/// intra-cluster nets only. Every cluster carries the same number of
/// two-pin nets, so cluster pin weights are identical and the zero-cut
/// 4-way solution is also perfectly balanced.
pub fn clustered_instance(
    seed: u64,
    cells_per_cluster: usize,
    nets_per_cluster: usize,
    layout_w: f64,
    layout_h: f64,
) -> PlacedNetlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [
        (0.25 * layout_w, 0.25 * layout_h),
        (0.75 * layout_w, 0.25 * layout_h),
        (0.25 * layout_w, 0.75 * layout_h),
        (0.75 * layout_w, 0.75 * layout_h),
    ];
    let radius = 0.08 * layout_w.min(layout_h);
    let mut cells = Vec::new();
    let mut nets = Vec::new();
    for (cl, &(cx, cy)) in centers.iter().enumerate() {
        let base = cells.len();
        for i in 0..cells_per_cluster {
            cells.push(Cell {
                id: format!("q{cl}c{i}"),
                x: (cx + rng.gen_range(-radius..radius)).clamp(0.0, layout_w),
                y: (cy + rng.gen_range(-radius..radius)).clamp(0.0, layout_h),
            });
        }
        for i in 0..nets_per_cluster {
            let a = base + rng.gen_range(0..cells_per_cluster);
            let mut b = base + rng.gen_range(0..cells_per_cluster);
            while b == a {
                b = base + rng.gen_range(0..cells_per_cluster);
            }
            nets.push(Net {
                id: format!("q{cl}n{i}"),
                weight: rng.gen_range(0.5..2.0),
                pins: vec![a, b],
            });
        }
    }
    PlacedNetlist {
        layout_width: layout_w,
        layout_height: layout_h,
        cells,
        nets,
    }
}

/// Random grid graph with weights drawn uniformly from the given ranges.
pub fn random_grid(
    seed: u64,
    nx: usize,
    ny: usize,
    node_range: (f64, f64),
    edge_range: (f64, f64),
) -> GridGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_weight = (0..nx * ny)
        .map(|_| rng.gen_range(node_range.0..node_range.1))
        .collect();
    let h_edge_weight = (0..(nx - 1) * ny)
        .map(|_| rng.gen_range(edge_range.0..edge_range.1))
        .collect();
    let v_edge_weight = (0..nx * (ny - 1))
        .map(|_| rng.gen_range(edge_range.0..edge_range.1))
        .collect();
    GridGraph::from_weights(
        nx,
        ny,
        nx as f64,
        ny as f64,
        node_weight,
        h_edge_weight,
        v_edge_weight,
    )
    .expect("valid dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_instance_is_valid() {
        let nl = uniform_instance(1, 500, 200, 100.0, 80.0);
        assert_eq!(nl.cells.len(), 500);
        assert_eq!(nl.nets.len(), 200);
        for net in &nl.nets {
            assert!(net.pins.len() >= 2);
            assert!(net.weight > 0.0);
        }
        for cell in &nl.cells {
            assert!(cell.x >= 0.0 && cell.x <= 100.0);
            assert!(cell.y >= 0.0 && cell.y <= 80.0);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = uniform_instance(7, 100, 50, 10.0, 10.0);
        let b = uniform_instance(7, 100, 50, 10.0, 10.0);
        assert_eq!(a, b);
    }

    #[test]
    fn clusters_are_separated() {
        let nl = clustered_instance(3, 40, 60, 100.0, 100.0);
        assert_eq!(nl.cells.len(), 160);
        // No net spans two clusters.
        for net in &nl.nets {
            let cluster = |c: usize| (nl.cells[c].x > 50.0) as u8 + 2 * (nl.cells[c].y > 50.0) as u8;
            let c0 = cluster(net.pins[0]);
            assert!(net.pins.iter().all(|&p| cluster(p) == c0));
        }
    }
}
