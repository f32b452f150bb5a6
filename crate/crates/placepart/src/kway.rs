//! Recursive k-way driver: alternate grid formation, 2-way annealing and
//! region embedding until k partitions exist, then integrate labels back
//! into the original layout and score them on the root grid.
//!
//! The recursion operates on root-grid units. Every root grid carries a
//! forwarded center position through the embeddings, so at each level the
//! 2-way labels of the node grid transfer to root grids by locating those
//! centers, and cells always inherit the label of their root grid. k is
//! restricted to powers of two. Each 2-way split gets the full per-level
//! balance tolerance; the final partitions are re-checked against the
//! global band and flagged (never silently accepted) when violated.
//! Cross-node nets are dropped from child instances: their cut was decided
//! at the ancestor split, and final metrics over the original coordinates
//! still count every crossing.
//!
//! Integration ends with a contiguity projection: stray fragments (label
//! components other than each label's principal one, which arise from
//! quantizing continuous region maps onto grids) are merged into the
//! neighboring label with the longest shared border, so each partition
//! occupies one 4-connected region.

use thiserror::Error;

use crate::annealer::{best_of_corners, AnnealError, SAConfig};
use crate::boundary::PartitionVector;
use crate::embedding::{delaunay, harmonic_embed, EmbedError, PointMapper};
use crate::geom::Point;
use crate::gridgraph::{build_grid_graph, GridError, GridGraph};
use crate::metrics::{
    balance_satisfied, critical_crossings, fill_empty_labels, fragments, grid_labels_from_cells,
    per_partition_weight, spatial_cut_size, MetricsError, PartitionResult,
};
use crate::netlist::{Cell, Net, PlacedNetlist};
use crate::steiner::{route_all, RectTree};

#[derive(Debug, Error)]
pub enum KWayError {
    #[error("k must be a power of two >= 2, got {0}")]
    BadK(usize),
    #[error("epsilon must lie in (0, 1/k], got {epsilon} for k = {k}")]
    BadEpsilon { epsilon: f64, k: usize },
    #[error("node `{path}` has {cells} cells, cannot split")]
    TooFewCells { path: String, cells: usize },
    #[error("balance infeasible at node `{path}`: UB {ub:.3} > bound {bound:.3} after alpha_b escalation")]
    Infeasible { path: String, ub: f64, bound: f64 },
    #[error("embedding failed at node `{path}`: {source}")]
    Embed {
        path: String,
        #[source]
        source: EmbedError,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("annealing failed at node `{path}`: {source}")]
    Anneal {
        path: String,
        #[source]
        source: AnnealError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone)]
pub struct KWayConfig {
    /// Number of partitions; a power of two.
    pub k: usize,
    /// Balance tolerance in (0, 1/k].
    pub epsilon: f64,
    /// Root grid resolution.
    pub nx: usize,
    pub ny: usize,
    pub sa: SAConfig,
    /// Net weight threshold for the critical-crossings metric.
    pub critical_threshold: f64,
    /// Debug: when set, every split dumps its side meshes before and after
    /// embedding as SVG into this directory.
    pub mesh_svg_dir: Option<std::path::PathBuf>,
}

impl KWayConfig {
    pub fn validate(&self) -> Result<(), KWayError> {
        if self.k < 2 || !self.k.is_power_of_two() {
            return Err(KWayError::BadK(self.k));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0 / self.k as f64) {
            return Err(KWayError::BadEpsilon {
                epsilon: self.epsilon,
                k: self.k,
            });
        }
        Ok(())
    }

    fn depth(&self) -> usize {
        self.k.trailing_zeros() as usize
    }
}

/// One node of the bisection tree: a set of root grids plus their cells,
/// with positions forwarded into the node's own rectangle.
#[derive(Debug, Clone)]
pub struct RecursionNode {
    pub depth: usize,
    /// Label prefix accumulated from the 2-way splits above this node.
    pub bits: usize,
    /// Root grid indices owned by this node.
    pub grids: Vec<usize>,
    /// Forwarded root-grid center positions, parallel to `grids`.
    pub grid_pos: Vec<Point>,
    /// Netlist cell indices owned by this node.
    pub cells: Vec<usize>,
    /// Forwarded cell positions, parallel to `cells`.
    pub cell_pos: Vec<Point>,
    pub rect_w: f64,
    pub rect_h: f64,
    /// Grid resolution used when splitting this node.
    pub nx: usize,
    pub ny: usize,
}

impl RecursionNode {
    pub fn root(netlist: &PlacedNetlist, root_grid: &GridGraph, cfg: &KWayConfig) -> Self {
        RecursionNode {
            depth: 0,
            bits: 0,
            grids: (0..root_grid.node_count()).collect(),
            grid_pos: (0..root_grid.node_count())
                .map(|idx| root_grid.grid_center(idx))
                .collect(),
            cells: (0..netlist.cells.len()).collect(),
            cell_pos: netlist
                .cells
                .iter()
                .map(|c| Point::new(c.x, c.y))
                .collect(),
            rect_w: netlist.layout_width,
            rect_h: netlist.layout_height,
            nx: cfg.nx,
            ny: cfg.ny,
        }
    }

    pub fn path(&self) -> String {
        if self.depth == 0 {
            "root".to_string()
        } else {
            format!("{:0width$b}", self.bits, width = self.depth)
        }
    }

    /// Deterministic per-node seed: the configured seed XOR the path bits
    /// (with a leading one marking the depth); the root uses the seed
    /// unchanged.
    pub fn seed(&self, base: u64) -> u64 {
        if self.depth == 0 {
            base
        } else {
            base ^ ((1u64 << self.depth) | self.bits as u64)
        }
    }
}

/// Sub-instance of the netlist restricted to one node: forwarded cell
/// positions, and only the nets whose pins all lie inside the node.
fn node_instance(node: &RecursionNode, netlist: &PlacedNetlist) -> PlacedNetlist {
    let mut local_of = vec![usize::MAX; netlist.cells.len()];
    for (li, &c) in node.cells.iter().enumerate() {
        local_of[c] = li;
    }
    let cells: Vec<Cell> = node
        .cells
        .iter()
        .zip(&node.cell_pos)
        .map(|(&c, p)| Cell {
            id: netlist.cells[c].id.clone(),
            x: p.x.clamp(0.0, node.rect_w),
            y: p.y.clamp(0.0, node.rect_h),
        })
        .collect();
    let nets: Vec<Net> = netlist
        .nets
        .iter()
        .filter(|net| net.pins.iter().all(|&p| local_of[p] != usize::MAX))
        .map(|net| Net {
            id: net.id.clone(),
            weight: net.weight,
            pins: net.pins.iter().map(|&p| local_of[p]).collect(),
        })
        .collect();
    PlacedNetlist {
        layout_width: node.rect_w,
        layout_height: node.rect_h,
        cells,
        nets,
    }
}

/// Run the 2-way annealer on a node's grid, doubling alpha_b (up to three
/// times) while the per-level balance bound is missed.
fn split_labels(
    node: &RecursionNode,
    grid: &GridGraph,
    cfg: &KWayConfig,
) -> Result<PartitionVector, KWayError> {
    let bound = 2.0 * cfg.epsilon * grid.total_node_weight;
    let mut sa = cfg.sa.clone();
    sa.seed = node.seed(cfg.sa.seed);
    let mut last_ub = f64::INFINITY;
    for _attempt in 0..4 {
        let outcome = best_of_corners(grid, &sa).map_err(|source| KWayError::Anneal {
            path: node.path(),
            source,
        })?;
        let side: f64 = outcome
            .result
            .labels
            .labels
            .iter()
            .zip(&grid.node_weight)
            .filter(|(&l, _)| l == 1)
            .map(|(_, &w)| w)
            .sum();
        let ub = (2.0 * side - grid.total_node_weight).abs();
        if ub <= bound + 1e-9 {
            return Ok(outcome.result.labels);
        }
        last_ub = ub;
        sa.params.alpha_b *= 2.0;
    }
    Err(KWayError::Infeasible {
        path: node.path(),
        ub: last_ub,
        bound,
    })
}

fn child_grid_dim(parent: usize) -> usize {
    ((parent as f64 / std::f64::consts::SQRT_2).round() as usize).max(8)
}

/// Split a node into its two children: build the node grid over the
/// forwarded cell positions, run the corner-trial annealer, transfer the
/// labels to root grids via their forwarded centers, then embed each side's
/// node-grid centers into a child rectangle and forward all positions.
pub fn split_level(
    node: &RecursionNode,
    netlist: &PlacedNetlist,
    cfg: &KWayConfig,
) -> Result<(RecursionNode, RecursionNode), KWayError> {
    split_level_inner(node, netlist, cfg, true)
}

fn split_level_inner(
    node: &RecursionNode,
    netlist: &PlacedNetlist,
    cfg: &KWayConfig,
    embed_children: bool,
) -> Result<(RecursionNode, RecursionNode), KWayError> {
    if node.cells.len() < 2 {
        return Err(KWayError::TooFewCells {
            path: node.path(),
            cells: node.cells.len(),
        });
    }
    let instance = node_instance(node, netlist);
    let trees = route_all(&instance);
    let grid = build_grid_graph(&instance, node.nx, node.ny, &trees)?;
    let labels = split_labels(node, &grid, cfg)?;

    // Side of each root grid in this node: the label of the node grid its
    // forwarded center falls into.
    let grid_side: Vec<u8> = node
        .grid_pos
        .iter()
        .map(|p| {
            let col = grid.bin_col(p.x.clamp(0.0, node.rect_w));
            let row = grid.bin_row(p.y.clamp(0.0, node.rect_h));
            labels.labels[grid.index(col, row)]
        })
        .collect();
    // Cells inherit the side of their root grid.
    let mut side_of_root = vec![u8::MAX; cfg.nx * cfg.ny];
    for (gi, &g) in node.grids.iter().enumerate() {
        side_of_root[g] = grid_side[gi];
    }

    let mut children = Vec::with_capacity(2);
    for side in 0..2u8 {
        let grids: Vec<usize> = node
            .grids
            .iter()
            .enumerate()
            .filter(|&(gi, _)| grid_side[gi] == side)
            .map(|(_, &g)| g)
            .collect();
        let cell_sel: Vec<usize> = (0..node.cells.len())
            .filter(|&ci| side_of_root[root_grid_of(netlist, cfg, node.cells[ci])] == side)
            .collect();
        let side_weight: f64 = labels
            .labels
            .iter()
            .zip(&grid.node_weight)
            .filter(|(&l, _)| l == side)
            .map(|(_, &w)| w)
            .sum();
        let share = if grid.total_node_weight > 0.0 {
            side_weight / grid.total_node_weight
        } else {
            0.5
        };
        let rect_w = node.rect_w * share.max(1e-6).sqrt();
        let rect_h = node.rect_h * share.max(1e-6).sqrt();

        let (grid_pos, cell_pos) = if embed_children && !grids.is_empty() {
            let centers: Vec<Point> = (0..grid.node_count())
                .filter(|&idx| labels.labels[idx] == side)
                .map(|idx| grid.grid_center(idx))
                .collect();
            let mesh = delaunay(&centers).map_err(|source| KWayError::Embed {
                path: node.path(),
                source,
            })?;
            let emb = harmonic_embed(&mesh, rect_w, rect_h).map_err(|source| KWayError::Embed {
                path: node.path(),
                source,
            })?;
            if let Some(dir) = &cfg.mesh_svg_dir {
                dump_mesh_svgs(dir, &node.path(), side, &mesh, &emb);
            }
            let mapper = PointMapper::new(&emb, &mesh);
            let fwd = |p: Point| {
                mapper.map(p).map_err(|source| KWayError::Embed {
                    path: node.path(),
                    source,
                })
            };
            let grid_pos: Vec<Point> = node
                .grids
                .iter()
                .enumerate()
                .filter(|&(gi, _)| grid_side[gi] == side)
                .map(|(gi, _)| fwd(node.grid_pos[gi]))
                .collect::<Result<_, _>>()?;
            let cell_pos: Vec<Point> = cell_sel
                .iter()
                .map(|&ci| fwd(node.cell_pos[ci]))
                .collect::<Result<_, _>>()?;
            (grid_pos, cell_pos)
        } else {
            let grid_pos = node
                .grids
                .iter()
                .enumerate()
                .filter(|&(gi, _)| grid_side[gi] == side)
                .map(|(gi, _)| node.grid_pos[gi])
                .collect();
            let cell_pos = cell_sel.iter().map(|&ci| node.cell_pos[ci]).collect();
            (grid_pos, cell_pos)
        };

        children.push(RecursionNode {
            depth: node.depth + 1,
            bits: (node.bits << 1) | side as usize,
            grids,
            grid_pos,
            cells: cell_sel.iter().map(|&ci| node.cells[ci]).collect(),
            cell_pos,
            rect_w,
            rect_h,
            nx: child_grid_dim(node.nx),
            ny: child_grid_dim(node.ny),
        });
    }
    let right = children.pop().unwrap();
    let left = children.pop().unwrap();
    Ok((left, right))
}

fn dump_mesh_svgs(
    dir: &std::path::Path,
    path: &str,
    side: u8,
    mesh: &crate::embedding::TriMesh,
    emb: &crate::embedding::Embedding,
) {
    let edges: Vec<(usize, usize)> = mesh
        .triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .collect();
    let before = crate::render::mesh_svg(&mesh.vertices, &edges, 8.0);
    let after = crate::render::mesh_svg(&emb.positions, &edges, 8.0);
    let stem = format!("mesh_{path}_{side}");
    if let Err(e) = std::fs::write(dir.join(format!("{stem}_before.svg")), before)
        .and_then(|_| std::fs::write(dir.join(format!("{stem}_after.svg")), after))
    {
        log::warn!("mesh svg dump failed: {e}");
    }
}

// Root grid of a cell by its original coordinates.
fn root_grid_of(netlist: &PlacedNetlist, cfg: &KWayConfig, cell: usize) -> usize {
    let c = &netlist.cells[cell];
    let col = (((c.x * cfg.nx as f64 / netlist.layout_width).floor()) as usize).min(cfg.nx - 1);
    let row = (((c.y * cfg.ny as f64 / netlist.layout_height).floor()) as usize).min(cfg.ny - 1);
    row * cfg.nx + col
}

fn recurse(
    node: RecursionNode,
    netlist: &PlacedNetlist,
    cfg: &KWayConfig,
) -> Result<Vec<(usize, usize)>, KWayError> {
    if node.depth == cfg.depth() {
        return Ok(node.grids.iter().map(|&g| (g, node.bits)).collect());
    }
    let embed_children = node.depth + 1 < cfg.depth();
    let (left, right) = split_level_inner(&node, netlist, cfg, embed_children)?;
    let (a, b) = rayon::join(
        || recurse(left, netlist, cfg),
        || recurse(right, netlist, cfg),
    );
    let mut out = a?;
    out.extend(b?);
    Ok(out)
}

/// Merge stray fragments: while any label occupies more than one
/// 4-connected component, flip the smallest non-principal component to the
/// neighboring label with the longest shared border.
pub fn project_contiguous(grid_label: &mut [usize], g: &GridGraph, k: usize) {
    loop {
        let comps = label_components(grid_label, g);
        // Principal component per label: largest, ties toward the lowest
        // grid index.
        let mut principal: Vec<Option<usize>> = vec![None; k];
        for (ci, comp) in comps.iter().enumerate() {
            let label = grid_label[comp[0]];
            let better = match principal[label] {
                None => true,
                Some(pi) => {
                    let p = &comps[pi];
                    (comp.len(), std::cmp::Reverse(comp[0])) > (p.len(), std::cmp::Reverse(p[0]))
                }
            };
            if better {
                principal[label] = Some(ci);
            }
        }
        let mut strays: Vec<usize> = (0..comps.len())
            .filter(|&ci| principal[grid_label[comps[ci][0]]] != Some(ci))
            .collect();
        if strays.is_empty() {
            return;
        }
        strays.sort_by_key(|&ci| (comps[ci].len(), comps[ci][0]));
        let stray = &comps[strays[0]];
        let stray_label = grid_label[stray[0]];
        let mut border = vec![0usize; k];
        for &v in stray {
            let (col, row) = (v % g.nx, v / g.nx);
            let mut tally = |u: usize| {
                if grid_label[u] != stray_label {
                    border[grid_label[u]] += 1;
                }
            };
            if col > 0 {
                tally(v - 1);
            }
            if col + 1 < g.nx {
                tally(v + 1);
            }
            if row > 0 {
                tally(v - g.nx);
            }
            if row + 1 < g.ny {
                tally(v + g.nx);
            }
        }
        let target = (0..k)
            .max_by_key(|&l| (border[l], std::cmp::Reverse(l)))
            .unwrap();
        for &v in stray {
            grid_label[v] = target;
        }
    }
}

/// Greedy integration polish on the root grid: flip border grids toward a
/// neighboring label while the flip strictly lowers
/// `alpha_c * cut / W_e + alpha_b * B / W_v`, where B is the L1 deviation
/// of partition weights from W/k (for k = 2 this is exactly the 2-way
/// imbalance), and both affected labels stay 4-connected. Deterministic
/// first-improvement scans; strictly decreasing cost guarantees
/// termination.
pub fn refine_kway(
    grid_label: &mut [usize],
    g: &GridGraph,
    k: usize,
    params: crate::boundary::CostParams,
) {
    let n = g.node_count();
    let (nx, ny) = (g.nx, g.ny);
    let we = g.total_edge_weight;
    let wv = g.total_node_weight;
    if we <= 0.0 || wv <= 0.0 {
        return;
    }
    let target = wv / k as f64;
    let mut weight = vec![0.0; k];
    for (v, &l) in grid_label.iter().enumerate() {
        weight[l] += g.node_weight[v];
    }
    let edge_w = |a: usize, b: usize| -> f64 {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        let (col, row) = (u % nx, u / nx);
        if v == u + 1 {
            g.h_edge_weight[row * (nx - 1) + col]
        } else {
            g.v_edge_weight[row * nx + col]
        }
    };
    for _pass in 0..64 {
        let mut flipped = false;
        for v in 0..n {
            let from = grid_label[v];
            let (col, row) = (v % nx, v / nx);
            let mut nbrs = [usize::MAX; 4];
            let mut cnt = 0;
            if col > 0 {
                nbrs[cnt] = v - 1;
                cnt += 1;
            }
            if col + 1 < nx {
                nbrs[cnt] = v + 1;
                cnt += 1;
            }
            if row > 0 {
                nbrs[cnt] = v - nx;
                cnt += 1;
            }
            if row + 1 < ny {
                nbrs[cnt] = v + nx;
                cnt += 1;
            }
            let mut candidates: Vec<usize> = nbrs[..cnt]
                .iter()
                .map(|&u| grid_label[u])
                .filter(|&l| l != from)
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            let w_v = g.node_weight[v];
            let mut applied = false;
            for to in candidates {
                let mut delta_cut = 0.0;
                for &u in &nbrs[..cnt] {
                    let w = edge_w(v, u);
                    if grid_label[u] == from {
                        delta_cut += w;
                    } else if grid_label[u] == to {
                        delta_cut -= w;
                    }
                }
                let b_old =
                    (weight[from] - target).abs() + (weight[to] - target).abs();
                let b_new = (weight[from] - w_v - target).abs()
                    + (weight[to] + w_v - target).abs();
                let delta =
                    params.alpha_c * delta_cut / we + params.alpha_b * (b_new - b_old) / wv;
                if delta >= -1e-12 {
                    continue;
                }
                grid_label[v] = to;
                if component_count_of(grid_label, g, from) == 1 {
                    weight[from] -= w_v;
                    weight[to] += w_v;
                    applied = true;
                    break;
                }
                grid_label[v] = from;
            }
            flipped |= applied;
        }
        if !flipped {
            break;
        }
    }
}

fn component_count_of(grid_label: &[usize], g: &GridGraph, label: usize) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut comps = 0;
    for start in 0..n {
        if seen[start] || grid_label[start] != label {
            continue;
        }
        comps += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let (col, row) = (v % g.nx, v / g.nx);
            let mut push = |u: usize, stack: &mut Vec<usize>| {
                if !seen[u] && grid_label[u] == label {
                    seen[u] = true;
                    stack.push(u);
                }
            };
            if col > 0 {
                push(v - 1, &mut stack);
            }
            if col + 1 < g.nx {
                push(v + 1, &mut stack);
            }
            if row > 0 {
                push(v - g.nx, &mut stack);
            }
            if row + 1 < g.ny {
                push(v + g.nx, &mut stack);
            }
        }
    }
    comps
}

fn label_components(grid_label: &[usize], g: &GridGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let (col, row) = (v % g.nx, v / g.nx);
            let mut push = |u: usize, stack: &mut Vec<usize>, comp: &mut Vec<usize>| {
                if !seen[u] && grid_label[u] == grid_label[start] {
                    seen[u] = true;
                    stack.push(u);
                    comp.push(u);
                }
            };
            if col > 0 {
                push(v - 1, &mut stack, &mut comp);
            }
            if col + 1 < g.nx {
                push(v + 1, &mut stack, &mut comp);
            }
            if row > 0 {
                push(v - g.nx, &mut stack, &mut comp);
            }
            if row + 1 < g.ny {
                push(v + g.nx, &mut stack, &mut comp);
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Partition a placed netlist into k spatially contiguous parts.
pub fn kway_partition(
    netlist: &PlacedNetlist,
    cfg: &KWayConfig,
) -> Result<PartitionResult, KWayError> {
    kway_partition_detailed(netlist, cfg).map(|(result, _, _)| result)
}

/// As [`kway_partition`] but also returns the root grid and root trees so
/// callers can render or re-score without rebuilding them.
pub fn kway_partition_detailed(
    netlist: &PlacedNetlist,
    cfg: &KWayConfig,
) -> Result<(PartitionResult, GridGraph, Vec<RectTree>), KWayError> {
    cfg.validate()?;
    let root_trees = route_all(netlist);
    let root_grid = build_grid_graph(netlist, cfg.nx, cfg.ny, &root_trees)?;

    let assignments = recurse(
        RecursionNode::root(netlist, &root_grid, cfg),
        netlist,
        cfg,
    )?;
    let mut grid_label = vec![usize::MAX; root_grid.node_count()];
    for (grid, label) in assignments {
        grid_label[grid] = label;
    }
    debug_assert!(grid_label.iter().all(|&l| l < cfg.k));

    project_contiguous(&mut grid_label, &root_grid, cfg.k);
    refine_kway(&mut grid_label, &root_grid, cfg.k, cfg.sa.params);

    let cell_label: Vec<usize> = (0..netlist.cells.len())
        .map(|c| grid_label[root_grid_of(netlist, cfg, c)])
        .collect();

    let cut_size = spatial_cut_size(&grid_label, &root_grid)?;
    let frag = fragments(&grid_label, &root_grid)?;
    let weights = per_partition_weight(netlist, &cell_label, cfg.k);
    let crossings = critical_crossings(
        &grid_label,
        &root_grid,
        &netlist.nets,
        &root_trees,
        cfg.critical_threshold,
    )?;
    let feasible = balance_satisfied(&weights, cfg.epsilon);
    let result = PartitionResult {
        k: cfg.k,
        epsilon: cfg.epsilon,
        cell_label,
        grid_label,
        cut_size,
        fragments: frag,
        per_partition_weight: weights,
        critical_crossings: crossings,
        feasible,
    };
    Ok((result, root_grid, root_trees))
}

/// Score an external per-cell labeling on the root grid: occupied grids
/// take the majority label of their cells, empty grids the label of the
/// nearest labeled grid.
pub fn score_labels(
    netlist: &PlacedNetlist,
    root_grid: &GridGraph,
    root_trees: &[RectTree],
    cell_label: Vec<usize>,
    k: usize,
    epsilon: f64,
    critical_threshold: f64,
) -> Result<PartitionResult, KWayError> {
    let partial = grid_labels_from_cells(root_grid, netlist, &cell_label, k);
    let grid_label = fill_empty_labels(&partial, root_grid);
    let cut_size = spatial_cut_size(&grid_label, root_grid)?;
    let frag = fragments(&grid_label, root_grid)?;
    let weights = per_partition_weight(netlist, &cell_label, k);
    let crossings = critical_crossings(
        &grid_label,
        root_grid,
        &netlist.nets,
        root_trees,
        critical_threshold,
    )?;
    let feasible = balance_satisfied(&weights, epsilon);
    Ok(PartitionResult {
        k,
        epsilon,
        cell_label,
        grid_label,
        cut_size,
        fragments: frag,
        per_partition_weight: weights,
        critical_crossings: crossings,
        feasible,
    })
}
