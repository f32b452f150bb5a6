//! Evaluation metrics: spatial weighted cut size, fragment count, balance
//! and critical-net crossing count, all over the root grid in original
//! layout coordinates.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::gridgraph::GridGraph;
use crate::netlist::{Net, PlacedNetlist};
use crate::steiner::RectTree;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("labels cover {got} grids, expected {expected}")]
    LabelMismatch { got: usize, expected: usize },
}

/// Final partitioning output: per-cell and per-root-grid labels plus the
/// reported metrics.
#[derive(Debug, Clone)]
pub struct PartitionResult {
    pub k: usize,
    pub epsilon: f64,
    /// Partition per cell, indexed like `PlacedNetlist::cells`.
    pub cell_label: Vec<usize>,
    /// Partition per root grid (total, after empty-grid fill).
    pub grid_label: Vec<usize>,
    pub cut_size: f64,
    pub fragments: usize,
    pub per_partition_weight: Vec<f64>,
    pub critical_crossings: usize,
    pub feasible: bool,
}

/// Total weight of grid edges whose endpoints carry different labels. Edge
/// weights already accumulate per-crossing net weights, so this realizes
/// the weighted multi-crossing cut on the grid model.
pub fn spatial_cut_size(grid_label: &[usize], g: &GridGraph) -> Result<f64, MetricsError> {
    if grid_label.len() != g.node_count() {
        return Err(MetricsError::LabelMismatch {
            got: grid_label.len(),
            expected: g.node_count(),
        });
    }
    Ok(g.edges()
        .filter(|&(u, v, _)| grid_label[u] != grid_label[v])
        .map(|(_, _, w)| w)
        .sum())
}

/// Number of 4-connected same-label components over the whole grid.
pub fn fragments(grid_label: &[usize], g: &GridGraph) -> Result<usize, MetricsError> {
    if grid_label.len() != g.node_count() {
        return Err(MetricsError::LabelMismatch {
            got: grid_label.len(),
            expected: g.node_count(),
        });
    }
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            let col = v % g.nx;
            let row = v / g.nx;
            let mut push = |u: usize| {
                if !seen[u] && grid_label[u] == grid_label[start] {
                    seen[u] = true;
                    stack.push(u);
                }
            };
            if col > 0 {
                push(v - 1);
            }
            if col + 1 < g.nx {
                push(v + 1);
            }
            if row > 0 {
                push(v - g.nx);
            }
            if row + 1 < g.ny {
                push(v + g.nx);
            }
        }
    }
    Ok(components)
}

/// Complete a partial labeling: unlabeled grids take the label of the
/// nearest labeled grid by 4-connected graph distance; ties break toward
/// the lower-index labeled grid.
pub fn fill_empty_labels(partial: &[Option<usize>], g: &GridGraph) -> Vec<usize> {
    assert_eq!(partial.len(), g.node_count());
    let n = g.node_count();
    let mut assigned: Vec<Option<(u32, usize)>> = vec![None; n]; // (dist, source idx)
    let mut heap: BinaryHeap<Reverse<(u32, usize, usize)>> = BinaryHeap::new();
    for (idx, lab) in partial.iter().enumerate() {
        if lab.is_some() {
            heap.push(Reverse((0, idx, idx)));
        }
    }
    while let Some(Reverse((dist, src, node))) = heap.pop() {
        if let Some((d0, s0)) = assigned[node] {
            if (d0, s0) <= (dist, src) {
                continue;
            }
        }
        assigned[node] = Some((dist, src));
        let col = node % g.nx;
        let row = node / g.nx;
        let mut push = |u: usize| {
            if assigned[u].is_none() {
                heap.push(Reverse((dist + 1, src, u)));
            }
        };
        if col > 0 {
            push(node - 1);
        }
        if col + 1 < g.nx {
            push(node + 1);
        }
        if row > 0 {
            push(node - g.nx);
        }
        if row + 1 < g.ny {
            push(node + g.nx);
        }
    }
    (0..n)
        .map(|idx| {
            let (_, src) = assigned[idx].expect("at least one grid must be labeled");
            partial[src].expect("sources are labeled")
        })
        .collect()
}

/// Crossings of grid borders with differing side labels, summed over the
/// tree segments of every net whose weight reaches the threshold. Multiple
/// crossings of one net accumulate.
pub fn critical_crossings(
    grid_label: &[usize],
    g: &GridGraph,
    nets: &[Net],
    trees: &[RectTree],
    weight_threshold: f64,
) -> Result<usize, MetricsError> {
    if grid_label.len() != g.node_count() {
        return Err(MetricsError::LabelMismatch {
            got: grid_label.len(),
            expected: g.node_count(),
        });
    }
    let mut count = 0usize;
    for tree in trees {
        if nets[tree.net].weight < weight_threshold {
            continue;
        }
        for seg in &tree.segments {
            if seg.y1 == seg.y2 {
                let row = g.bin_row(seg.y1);
                let (a, b) = (g.bin_col(seg.x1), g.bin_col(seg.x2));
                for col in a..b {
                    let u = g.index(col, row);
                    let v = g.index(col + 1, row);
                    if grid_label[u] != grid_label[v] {
                        count += 1;
                    }
                }
            } else {
                let col = g.bin_col(seg.x1);
                let (a, b) = (g.bin_row(seg.y1), g.bin_row(seg.y2));
                for row in a..b {
                    let u = g.index(col, row);
                    let v = g.index(col, row + 1);
                    if grid_label[u] != grid_label[v] {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Per-partition node weight: each cell contributes one pin per net
/// membership to its partition.
pub fn per_partition_weight(netlist: &PlacedNetlist, cell_label: &[usize], k: usize) -> Vec<f64> {
    let pins = netlist.cell_pin_counts();
    let mut weights = vec![0.0; k];
    for (cell, &label) in cell_label.iter().enumerate() {
        weights[label] += pins[cell];
    }
    weights
}

/// Check every partition weight against the band
/// `[(1/k - eps) W, (1/k + eps) W]`.
pub fn balance_satisfied(weights: &[f64], epsilon: f64) -> bool {
    let k = weights.len() as f64;
    let total: f64 = weights.iter().sum();
    let lo = (1.0 / k - epsilon) * total;
    let hi = (1.0 / k + epsilon) * total;
    weights.iter().all(|&w| w >= lo - 1e-9 && w <= hi + 1e-9)
}

/// Root-grid labels for occupied grids (grids holding at least one cell):
/// majority by pin weight, then by cell count, then the lower label.
pub fn grid_labels_from_cells(
    g: &GridGraph,
    netlist: &PlacedNetlist,
    cell_label: &[usize],
    k: usize,
) -> Vec<Option<usize>> {
    let pins = netlist.cell_pin_counts();
    let mut out = vec![None; g.node_count()];
    for (idx, cells) in g.cells_in_grid.iter().enumerate() {
        if cells.is_empty() {
            continue;
        }
        let mut pin_score = vec![0.0; k];
        let mut cell_score = vec![0usize; k];
        for &c in cells {
            pin_score[cell_label[c]] += pins[c];
            cell_score[cell_label[c]] += 1;
        }
        let mut best = 0usize;
        for l in 1..k {
            if pin_score[l] > pin_score[best]
                || (pin_score[l] == pin_score[best] && cell_score[l] > cell_score[best])
            {
                best = l;
            }
        }
        out[idx] = Some(best);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::{build_grid_graph, laplacian};
    use crate::netlist::parse_netlist_str;
    use crate::steiner::route_all;

    fn uniform_grid(nx: usize, ny: usize) -> GridGraph {
        GridGraph::from_weights(
            nx,
            ny,
            nx as f64,
            ny as f64,
            vec![1.0; nx * ny],
            vec![1.0; (nx - 1) * ny],
            vec![1.0; nx * (ny - 1)],
        )
        .unwrap()
    }

    #[test]
    fn uniform_labels_have_zero_cut() {
        let g = uniform_grid(4, 4);
        assert_eq!(spatial_cut_size(&vec![0; 16], &g).unwrap(), 0.0);
    }

    #[test]
    fn four_unit_nets_crossing_once_cut_four() {
        // Four 2-pin nets, each crossing the central vertical border once.
        let mut cells = Vec::new();
        let mut nets = Vec::new();
        for i in 0..4 {
            let y = 0.5 + i as f64;
            cells.push(format!(r#"{{"id": "l{i}", "x": 0.5, "y": {y}}}"#));
            cells.push(format!(r#"{{"id": "r{i}", "x": 3.5, "y": {y}}}"#));
            nets.push(format!(
                r#"{{"id": "n{i}", "w": 1.0, "cells": ["l{i}", "r{i}"]}}"#
            ));
        }
        let doc = format!(
            r#"{{"layout": {{"w": 4.0, "h": 4.0}}, "cells": [{}], "nets": [{}]}}"#,
            cells.join(","),
            nets.join(",")
        );
        let nl = parse_netlist_str(&doc).unwrap();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 2, 4, &trees).unwrap();
        // Vertical split: left column label 0, right column label 1.
        let labels: Vec<usize> = (0..8).map(|i| i % 2).collect();
        assert_eq!(spatial_cut_size(&labels, &g).unwrap(), 4.0);
    }

    #[test]
    fn cut_equals_laplacian_quadratic_form_for_binary_labels() {
        use crate::boundary::{cut_size, PartitionVector};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let nx = rng.gen_range(2..9);
            let ny = rng.gen_range(2..9);
            let g = GridGraph::from_weights(
                nx,
                ny,
                nx as f64,
                ny as f64,
                (0..nx * ny).map(|_| rng.gen_range(0.0..5.0)).collect(),
                (0..(nx - 1) * ny).map(|_| rng.gen_range(0.0..5.0)).collect(),
                (0..nx * (ny - 1)).map(|_| rng.gen_range(0.0..5.0)).collect(),
            )
            .unwrap();
            let labels: Vec<usize> = (0..nx * ny).map(|_| rng.gen_range(0..2)).collect();
            let p = PartitionVector {
                labels: labels.iter().map(|&l| l as u8).collect(),
            };
            let a = spatial_cut_size(&labels, &g).unwrap();
            let b = cut_size(&p, &laplacian(&g)).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_split_has_two_fragments() {
        let g = uniform_grid(6, 6);
        // Staircase boundary.
        let labels: Vec<usize> = (0..36)
            .map(|v| {
                let (i, j) = (v % 6, v / 6);
                ((i + j) < 6) as usize
            })
            .collect();
        assert_eq!(fragments(&labels, &g).unwrap(), 2);
    }

    #[test]
    fn checkerboard_is_all_isolated() {
        let g = uniform_grid(4, 4);
        let labels: Vec<usize> = (0..16).map(|v| (v % 4 + v / 4) % 2).collect();
        assert_eq!(fragments(&labels, &g).unwrap(), 16);
    }

    #[test]
    fn fragments_invariant_under_relabeling() {
        let g = uniform_grid(5, 5);
        let labels: Vec<usize> = (0..25).map(|v| (v % 5 < 2) as usize).collect();
        let swapped: Vec<usize> = labels.iter().map(|&l| 1 - l).collect();
        assert_eq!(
            fragments(&labels, &g).unwrap(),
            fragments(&swapped, &g).unwrap()
        );
    }

    #[test]
    fn empty_grid_fill_nearest_with_low_index_tie_break() {
        let g = uniform_grid(3, 3);
        // Labeled corners: grid 0 -> 0, grid 8 -> 1; center equidistant.
        let mut partial = vec![None; 9];
        partial[0] = Some(0);
        partial[8] = Some(1);
        let filled = fill_empty_labels(&partial, &g);
        assert_eq!(filled[0], 0);
        assert_eq!(filled[8], 1);
        // Grid 4 (center) is at distance 2 from both sources; source 0 wins.
        assert_eq!(filled[4], 0);
        // Grid 2 is distance 2 from both corners as well; source 0 wins.
        assert_eq!(filled[2], 0);
    }

    #[test]
    fn fill_preserves_labeled_connectivity() {
        let g = uniform_grid(4, 4);
        let mut partial = vec![None; 16];
        partial[0] = Some(0);
        partial[15] = Some(1);
        let filled = fill_empty_labels(&partial, &g);
        assert_eq!(fragments(&filled, &g).unwrap(), 2);
    }

    #[test]
    fn critical_crossings_thresholds_and_accumulation() {
        // The heavy net's tree runs right along the bottom then up the right
        // side; against the diagonal labeling it crosses the boundary twice.
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 4.0, "h": 4.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 3.5, "y": 0.5},
                    {"id": "c", "x": 3.5, "y": 2.5},
                    {"id": "d", "x": 1.5, "y": 2.5},
                    {"id": "e", "x": 2.5, "y": 2.5}
                ],
                "nets": [
                    {"id": "heavy", "w": 10.0, "cells": ["a", "b", "c"]},
                    {"id": "light", "w": 1.0, "cells": ["d", "e"]}
                ]
            }"#,
        )
        .unwrap();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 2, 2, &trees).unwrap();
        let labels = vec![0, 1, 1, 0];
        let all = critical_crossings(&labels, &g, &nl.nets, &trees, 0.0).unwrap();
        let heavy_only = critical_crossings(&labels, &g, &nl.nets, &trees, 5.0).unwrap();
        let none = critical_crossings(&labels, &g, &nl.nets, &trees, 100.0).unwrap();
        assert_eq!(none, 0);
        assert_eq!(heavy_only, 2);
        assert_eq!(all, 3);
    }

    #[test]
    fn crossings_match_segment_walk_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let n_cells = rng.gen_range(6..24);
            let cells: Vec<String> = (0..n_cells)
                .map(|i| {
                    format!(
                        r#"{{"id": "c{i}", "x": {}, "y": {}}}"#,
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.0..10.0)
                    )
                })
                .collect();
            let n_nets = rng.gen_range(2..10);
            let nets: Vec<String> = (0..n_nets)
                .map(|i| {
                    let a = rng.gen_range(0..n_cells);
                    let mut b = rng.gen_range(0..n_cells);
                    while b == a {
                        b = rng.gen_range(0..n_cells);
                    }
                    format!(
                        r#"{{"id": "n{i}", "w": {}, "cells": ["c{a}", "c{b}"]}}"#,
                        rng.gen_range(0.5..3.0)
                    )
                })
                .collect();
            let doc = format!(
                r#"{{"layout": {{"w": 10.0, "h": 10.0}}, "cells": [{}], "nets": [{}]}}"#,
                cells.join(","),
                nets.join(",")
            );
            let nl = parse_netlist_str(&doc).unwrap();
            let trees = route_all(&nl);
            let g = build_grid_graph(&nl, 10, 10, &trees).unwrap();
            let labels: Vec<usize> = (0..100).map(|_| rng.gen_range(0..3)).collect();
            let got = critical_crossings(&labels, &g, &nl.nets, &trees, 0.0).unwrap();

            // Independent oracle: test each interior border coordinate
            // against the segment span, then compare side labels.
            let mut want = 0usize;
            for tree in &trees {
                for seg in &tree.segments {
                    if seg.y1 == seg.y2 {
                        let row = ((seg.y1 / 1.0).floor() as usize).min(9);
                        for c in 1..10usize {
                            let bx = c as f64;
                            if seg.x1 < bx && bx <= seg.x2 {
                                let u = row * 10 + (c - 1);
                                let v = row * 10 + c;
                                if labels[u] != labels[v] {
                                    want += 1;
                                }
                            }
                        }
                    } else {
                        let col = ((seg.x1 / 1.0).floor() as usize).min(9);
                        for r in 1..10usize {
                            let by = r as f64;
                            if seg.y1 < by && by <= seg.y2 {
                                let u = (r - 1) * 10 + col;
                                let v = r * 10 + col;
                                if labels[u] != labels[v] {
                                    want += 1;
                                }
                            }
                        }
                    }
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn unit_weight_crossings_decompose_cut() {
        // With unit net weights and threshold 0, the crossing count equals
        // the unweighted spatial cut size.
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 6.0, "h": 6.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 5.5, "y": 0.5},
                    {"id": "c", "x": 0.5, "y": 5.5},
                    {"id": "d", "x": 5.5, "y": 5.5}
                ],
                "nets": [
                    {"id": "n0", "w": 1.0, "cells": ["a", "b"]},
                    {"id": "n1", "w": 1.0, "cells": ["c", "d"]},
                    {"id": "n2", "w": 1.0, "cells": ["a", "c"]}
                ]
            }"#,
        )
        .unwrap();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 3, 3, &trees).unwrap();
        let labels: Vec<usize> = (0..9).map(|v| (v % 3 == 2) as usize).collect();
        let crossings = critical_crossings(&labels, &g, &nl.nets, &trees, 0.0).unwrap();
        let cut = spatial_cut_size(&labels, &g).unwrap();
        assert_eq!(crossings as f64, cut);
    }

    #[test]
    fn balance_band() {
        assert!(balance_satisfied(&[5.0, 5.0], 0.0));
        assert!(balance_satisfied(&[4.0, 6.0], 0.1));
        assert!(!balance_satisfied(&[3.0, 7.0], 0.1));
    }
}
