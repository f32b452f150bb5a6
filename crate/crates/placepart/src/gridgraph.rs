//! Grid-based layout formation: bin cells into an nx-by-ny grid, rasterize
//! Steiner trees onto grid-border crossings, and expose node weights, edge
//! weights and the graph Laplacian.
//!
//! Grid indexing is row-major: grid (i, j) has index `j * nx + i`, with
//! column i in [0, nx) and row j in [0, ny). Binning is half-open
//! (`floor(x * nx / w)`), clamped so the top/right layout edge falls into
//! the last grid. Segment endpoints exactly on a border line follow the same
//! binning rule, and a segment collinear with a border line crosses none of
//! the perpendicular grid edges.

use thiserror::Error;

use crate::geom::Point;
use crate::netlist::PlacedNetlist;
use crate::steiner::RectTree;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid dimensions must be at least 2x2, got {nx}x{ny}")]
    TooFewGrids { nx: usize, ny: usize },
    #[error("tree references unknown net index {0}")]
    UnknownNet(usize),
    #[error("expected exactly one tree per net ({nets} nets, {trees} trees)")]
    TreeCoverage { nets: usize, trees: usize },
    #[error("coordinate ({x}, {y}) outside layout {w} x {h}")]
    OutOfLayout { x: f64, y: f64, w: f64, h: f64 },
}

#[derive(Debug, Clone)]
pub struct GridGraph {
    pub nx: usize,
    pub ny: usize,
    pub layout_w: f64,
    pub layout_h: f64,
    /// Pin count per grid, row-major.
    pub node_weight: Vec<f64>,
    /// Weight of the edge between (i, j) and (i+1, j); index `j*(nx-1)+i`.
    pub h_edge_weight: Vec<f64>,
    /// Weight of the edge between (i, j) and (i, j+1); index `j*nx+i`.
    pub v_edge_weight: Vec<f64>,
    /// Cell indices per grid, row-major.
    pub cells_in_grid: Vec<Vec<usize>>,
    pub total_node_weight: f64,
    pub total_edge_weight: f64,
}

impl GridGraph {
    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.nx + col
    }

    pub fn grid_center(&self, idx: usize) -> Point {
        let col = idx % self.nx;
        let row = idx / self.nx;
        Point::new(
            (col as f64 + 0.5) * self.layout_w / self.nx as f64,
            (row as f64 + 0.5) * self.layout_h / self.ny as f64,
        )
    }

    pub fn layout_diag(&self) -> f64 {
        (self.layout_w * self.layout_w + self.layout_h * self.layout_h).sqrt()
    }

    fn bin(coord: f64, extent: f64, n: usize) -> usize {
        ((coord * n as f64 / extent).floor() as usize).min(n - 1)
    }

    pub fn bin_col(&self, x: f64) -> usize {
        Self::bin(x, self.layout_w, self.nx)
    }

    pub fn bin_row(&self, y: f64) -> usize {
        Self::bin(y, self.layout_h, self.ny)
    }

    /// Iterate all grid edges as (u, v, weight).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let horizontals = (0..self.ny).flat_map(move |j| {
            (0..self.nx - 1).map(move |i| {
                (
                    self.index(i, j),
                    self.index(i + 1, j),
                    self.h_edge_weight[j * (self.nx - 1) + i],
                )
            })
        });
        let verticals = (0..self.ny.saturating_sub(1)).flat_map(move |j| {
            (0..self.nx).map(move |i| {
                (
                    self.index(i, j),
                    self.index(i, j + 1),
                    self.v_edge_weight[j * self.nx + i],
                )
            })
        });
        horizontals.chain(verticals)
    }

    /// Build a grid graph directly from raw weights; used by synthetic
    /// instances and tests. `h_edges` and `v_edges` follow the same layout
    /// as the struct fields.
    pub fn from_weights(
        nx: usize,
        ny: usize,
        layout_w: f64,
        layout_h: f64,
        node_weight: Vec<f64>,
        h_edge_weight: Vec<f64>,
        v_edge_weight: Vec<f64>,
    ) -> Result<Self, GridError> {
        if nx < 2 || ny < 2 {
            return Err(GridError::TooFewGrids { nx, ny });
        }
        assert_eq!(node_weight.len(), nx * ny);
        assert_eq!(h_edge_weight.len(), (nx - 1) * ny);
        assert_eq!(v_edge_weight.len(), nx * (ny - 1));
        let total_node_weight = node_weight.iter().sum();
        let total_edge_weight =
            h_edge_weight.iter().sum::<f64>() + v_edge_weight.iter().sum::<f64>();
        Ok(GridGraph {
            nx,
            ny,
            layout_w,
            layout_h,
            node_weight,
            h_edge_weight,
            v_edge_weight,
            cells_in_grid: vec![Vec::new(); nx * ny],
            total_node_weight,
            total_edge_weight,
        })
    }

    /// Dump node and edge weights as CSV (debug aid, flag-gated in the CLI).
    pub fn weights_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("kind,i,j,weight\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                writeln!(out, "node,{i},{j},{}", self.node_weight[self.index(i, j)]).unwrap();
            }
        }
        for j in 0..self.ny {
            for i in 0..self.nx - 1 {
                writeln!(out, "h_edge,{i},{j},{}", self.h_edge_weight[j * (self.nx - 1) + i])
                    .unwrap();
            }
        }
        for j in 0..self.ny - 1 {
            for i in 0..self.nx {
                writeln!(out, "v_edge,{i},{j},{}", self.v_edge_weight[j * self.nx + i]).unwrap();
            }
        }
        out
    }
}

/// Map a layout coordinate to its grid (column, row).
pub fn assign_cell_to_grid(x: f64, y: f64, g: &GridGraph) -> Result<(usize, usize), GridError> {
    if x < 0.0 || y < 0.0 || x > g.layout_w || y > g.layout_h {
        return Err(GridError::OutOfLayout {
            x,
            y,
            w: g.layout_w,
            h: g.layout_h,
        });
    }
    Ok((g.bin_col(x), g.bin_row(y)))
}

/// Form the grid graph for a placed netlist: node weights are pin counts
/// per grid, and each border crossing of a net's tree adds the net weight
/// to the crossed grid edge (multiple crossings accumulate).
pub fn build_grid_graph(
    netlist: &PlacedNetlist,
    nx: usize,
    ny: usize,
    trees: &[RectTree],
) -> Result<GridGraph, GridError> {
    if nx < 2 || ny < 2 {
        return Err(GridError::TooFewGrids { nx, ny });
    }
    let mut tree_of_net: Vec<Option<&RectTree>> = vec![None; netlist.nets.len()];
    for tree in trees {
        if tree.net >= netlist.nets.len() {
            return Err(GridError::UnknownNet(tree.net));
        }
        if tree_of_net[tree.net].replace(tree).is_some() {
            return Err(GridError::TreeCoverage {
                nets: netlist.nets.len(),
                trees: trees.len(),
            });
        }
    }
    if tree_of_net.iter().any(Option::is_none) {
        return Err(GridError::TreeCoverage {
            nets: netlist.nets.len(),
            trees: trees.len(),
        });
    }

    let mut g = GridGraph {
        nx,
        ny,
        layout_w: netlist.layout_width,
        layout_h: netlist.layout_height,
        node_weight: vec![0.0; nx * ny],
        h_edge_weight: vec![0.0; (nx - 1) * ny],
        v_edge_weight: vec![0.0; nx * (ny - 1)],
        cells_in_grid: vec![Vec::new(); nx * ny],
        total_node_weight: 0.0,
        total_edge_weight: 0.0,
    };

    for (ci, cell) in netlist.cells.iter().enumerate() {
        let (col, row) = assign_cell_to_grid(cell.x, cell.y, &g)
            .expect("validated cells lie inside the layout");
        let idx = g.index(col, row);
        g.cells_in_grid[idx].push(ci);
    }

    // Pins: one per net membership, located at the cell coordinate.
    for net in &netlist.nets {
        for &pin in &net.pins {
            let cell = &netlist.cells[pin];
            let (col, row) = assign_cell_to_grid(cell.x, cell.y, &g).unwrap();
            let idx = g.index(col, row);
            g.node_weight[idx] += 1.0;
        }
    }

    // Crossings accumulate in net-index order so the result is independent
    // of the order trees were supplied in.
    for (net_idx, tree) in tree_of_net.iter().enumerate() {
        let tree = tree.unwrap();
        let w = netlist.nets[net_idx].weight;
        for seg in &tree.segments {
            rasterize_segment(&mut g, seg.x1, seg.y1, seg.x2, seg.y2, w);
        }
    }

    g.total_node_weight = g.node_weight.iter().sum();
    g.total_edge_weight =
        g.h_edge_weight.iter().sum::<f64>() + g.v_edge_weight.iter().sum::<f64>();
    Ok(g)
}

fn rasterize_segment(g: &mut GridGraph, x1: f64, y1: f64, x2: f64, y2: f64, w: f64) {
    if y1 == y2 {
        let row = g.bin_row(y1);
        let (a, b) = (g.bin_col(x1.min(x2)), g.bin_col(x1.max(x2)));
        for col in a..b {
            g.h_edge_weight[row * (g.nx - 1) + col] += w;
        }
    } else {
        let col = g.bin_col(x1);
        let (a, b) = (g.bin_row(y1.min(y2)), g.bin_row(y1.max(y2)));
        for row in a..b {
            g.v_edge_weight[row * g.nx + col] += w;
        }
    }
}

/// Sparse symmetric Laplacian L = D - A of a grid graph, stored in CSR form.
/// Row sums are zero and off-diagonal (u, v) entries equal `-w_e(u, v)`.
#[derive(Debug, Clone)]
pub struct Laplacian {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl Laplacian {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        for k in lo..hi {
            if self.col_idx[k] == col {
                return self.values[k];
            }
        }
        0.0
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.values[lo..hi].iter().sum()
    }
}

/// Diagonal node-weight matrix D_w of the grid graph.
#[derive(Debug, Clone)]
pub struct NodeWeightMatrix {
    pub diag: Vec<f64>,
}

impl NodeWeightMatrix {
    pub fn from_grid(g: &GridGraph) -> Self {
        NodeWeightMatrix {
            diag: g.node_weight.clone(),
        }
    }

    pub fn total(&self) -> f64 {
        self.diag.iter().sum()
    }
}

/// Assemble L = D - A from the grid adjacency.
pub fn laplacian(g: &GridGraph) -> Laplacian {
    let n = g.node_count();
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(4); n];
    for (u, v, w) in g.edges() {
        neighbors[u].push((v, w));
        neighbors[v].push((u, w));
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for (u, nbrs) in neighbors.iter_mut().enumerate() {
        nbrs.sort_by_key(|&(v, _)| v);
        let degree: f64 = nbrs.iter().map(|&(_, w)| w).sum();
        let mut inserted_diag = false;
        for &(v, w) in nbrs.iter() {
            if !inserted_diag && v > u {
                col_idx.push(u);
                values.push(degree);
                inserted_diag = true;
            }
            col_idx.push(v);
            values.push(-w);
        }
        if !inserted_diag {
            col_idx.push(u);
            values.push(degree);
        }
        row_ptr.push(col_idx.len());
    }
    Laplacian {
        n,
        row_ptr,
        col_idx,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist_str;
    use crate::steiner::route_all;

    fn netlist_2x1() -> PlacedNetlist {
        // Two cells in horizontally adjacent grids of a 2x2 grid over 4x4.
        parse_netlist_str(
            r#"{
                "layout": {"w": 4.0, "h": 4.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 3.5, "y": 0.5}
                ],
                "nets": [{"id": "n", "w": 1.0, "cells": ["a", "b"]}]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn single_crossing_weights_one_edge() {
        let nl = netlist_2x1();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 2, 2, &trees).unwrap();
        assert_eq!(g.h_edge_weight, vec![1.0, 0.0]);
        assert_eq!(g.v_edge_weight, vec![0.0, 0.0]);
        assert_eq!(g.node_weight, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(g.total_node_weight, 2.0);
    }

    #[test]
    fn crossings_from_two_nets_accumulate() {
        // Two nets each crossing the same border once: edge weight is the sum.
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 4.0, "h": 4.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 3.5, "y": 0.5},
                    {"id": "c", "x": 1.5, "y": 1.0},
                    {"id": "d", "x": 2.5, "y": 1.0}
                ],
                "nets": [
                    {"id": "n0", "w": 2.5, "cells": ["a", "b"]},
                    {"id": "n2", "w": 1.5, "cells": ["c", "d"]}
                ]
            }"#,
        )
        .unwrap();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 2, 2, &trees).unwrap();
        assert_eq!(g.h_edge_weight[0], 2.5 + 1.5);
    }

    #[test]
    fn net_inside_one_grid_contributes_pins_only() {
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 4.0, "h": 4.0},
                "cells": [
                    {"id": "a", "x": 0.2, "y": 0.2},
                    {"id": "b", "x": 1.0, "y": 1.0}
                ],
                "nets": [{"id": "n", "w": 3.0, "cells": ["a", "b"]}]
            }"#,
        )
        .unwrap();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 2, 2, &trees).unwrap();
        assert!(g.h_edge_weight.iter().all(|&w| w == 0.0));
        assert!(g.v_edge_weight.iter().all(|&w| w == 0.0));
        assert_eq!(g.node_weight[0], 2.0);
    }

    #[test]
    fn binning_rules() {
        let nl = netlist_2x1();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 4, 4, &trees).unwrap();
        assert_eq!(assign_cell_to_grid(0.0, 0.0, &g).unwrap(), (0, 0));
        assert_eq!(assign_cell_to_grid(4.0, 4.0, &g).unwrap(), (3, 3));
        // x exactly on the border between columns 1 and 2 -> column 2.
        assert_eq!(assign_cell_to_grid(2.0, 0.5, &g).unwrap(), (2, 0));
        assert!(assign_cell_to_grid(4.1, 0.0, &g).is_err());
    }

    #[test]
    fn missing_tree_is_an_error() {
        let nl = netlist_2x1();
        assert!(matches!(
            build_grid_graph(&nl, 2, 2, &[]),
            Err(GridError::TreeCoverage { .. })
        ));
    }

    #[test]
    fn laplacian_of_1x2_grid() {
        let g = GridGraph::from_weights(
            2,
            2,
            2.0,
            2.0,
            vec![1.0; 4],
            vec![3.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let l = laplacian(&g);
        assert_eq!(l.entry(0, 0), 3.0);
        assert_eq!(l.entry(0, 1), -3.0);
        assert_eq!(l.entry(1, 0), -3.0);
        assert_eq!(l.entry(1, 1), 3.0);
        for row in 0..4 {
            assert!(l.row_sum(row).abs() < 1e-9);
        }
    }

    #[test]
    fn laplacian_diagonal_is_degree_on_unit_2x2() {
        let g = GridGraph::from_weights(
            2,
            2,
            2.0,
            2.0,
            vec![1.0; 4],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        let l = laplacian(&g);
        for v in 0..4 {
            assert_eq!(l.entry(v, v), 2.0);
        }
    }

    #[test]
    fn laplacian_symmetric_and_zero_row_sums() {
        let nl = netlist_2x1();
        let trees = route_all(&nl);
        let g = build_grid_graph(&nl, 4, 4, &trees).unwrap();
        let l = laplacian(&g);
        for u in 0..l.n {
            assert!(l.row_sum(u).abs() < 1e-9);
            for k in l.row_ptr[u]..l.row_ptr[u + 1] {
                let v = l.col_idx[k];
                assert_eq!(l.entry(v, u), self_entry(&l, u, v));
            }
        }
    }

    fn self_entry(l: &Laplacian, u: usize, v: usize) -> f64 {
        l.entry(u, v)
    }

    #[test]
    fn build_is_independent_of_tree_order() {
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 8.0, "h": 8.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 7.5, "y": 7.0},
                    {"id": "c", "x": 3.5, "y": 6.5},
                    {"id": "d", "x": 6.0, "y": 1.0}
                ],
                "nets": [
                    {"id": "n0", "w": 1.25, "cells": ["a", "b"]},
                    {"id": "n1", "w": 0.75, "cells": ["c", "d"]},
                    {"id": "n2", "w": 2.0, "cells": ["a", "c", "d"]}
                ]
            }"#,
        )
        .unwrap();
        let trees = route_all(&nl);
        let mut shuffled = trees.clone();
        shuffled.reverse();
        let g1 = build_grid_graph(&nl, 4, 4, &trees).unwrap();
        let g2 = build_grid_graph(&nl, 4, 4, &shuffled).unwrap();
        assert_eq!(g1.h_edge_weight, g2.h_edge_weight);
        assert_eq!(g1.v_edge_weight, g2.v_edge_weight);
    }

    // Independent crossing oracle: a border at coordinate b is crossed by a
    // span [lo, hi] when lo < b <= hi, matching the binning rule for
    // endpoints exactly on a border.
    fn crossing_oracle(nl: &PlacedNetlist, trees: &[RectTree], nx: usize, ny: usize) -> Vec<f64> {
        let mut h = vec![0.0; (nx - 1) * ny];
        let mut v = vec![0.0; nx * (ny - 1)];
        let gw = nl.layout_width / nx as f64;
        let gh = nl.layout_height / ny as f64;
        for tree in trees {
            let w = nl.nets[tree.net].weight;
            for seg in &tree.segments {
                if seg.y1 == seg.y2 {
                    let row = ((seg.y1 / gh).floor() as usize).min(ny - 1);
                    for c in 1..nx {
                        let b = c as f64 * gw;
                        if seg.x1 < b && b <= seg.x2 {
                            h[row * (nx - 1) + (c - 1)] += w;
                        }
                    }
                } else {
                    let col = ((seg.x1 / gw).floor() as usize).min(nx - 1);
                    for r in 1..ny {
                        let b = r as f64 * gh;
                        if seg.y1 < b && b <= seg.y2 {
                            v[(r - 1) * nx + col] += w;
                        }
                    }
                }
            }
        }
        h.extend(v);
        h
    }

    #[test]
    fn crossing_count_conservation_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let n_cells = rng.gen_range(4..20);
            let cells: Vec<String> = (0..n_cells)
                .map(|i| {
                    format!(
                        r#"{{"id": "c{i}", "x": {}, "y": {}}}"#,
                        rng.gen_range(0.0..16.0),
                        rng.gen_range(0.0..16.0)
                    )
                })
                .collect();
            let n_nets = rng.gen_range(1..8);
            let nets: Vec<String> = (0..n_nets)
                .map(|i| {
                    let a = rng.gen_range(0..n_cells);
                    let mut b = rng.gen_range(0..n_cells);
                    while b == a {
                        b = rng.gen_range(0..n_cells);
                    }
                    let c = rng.gen_range(0..n_cells);
                    format!(
                        r#"{{"id": "n{i}", "w": {}, "cells": ["c{a}", "c{b}", "c{c}"]}}"#,
                        rng.gen_range(0.5..3.0)
                    )
                })
                .collect();
            let doc = format!(
                r#"{{"layout": {{"w": 16.0, "h": 16.0}}, "cells": [{}], "nets": [{}]}}"#,
                cells.join(","),
                nets.join(",")
            );
            let nl = parse_netlist_str(&doc).unwrap();
            let trees = route_all(&nl);
            let g = build_grid_graph(&nl, 5, 7, &trees).unwrap();
            let mut got = g.h_edge_weight.clone();
            got.extend(g.v_edge_weight.clone());
            let want = crossing_oracle(&nl, &trees, 5, 7);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-9, "crossing mismatch: {a} vs {b}");
            }
        }
    }
}
