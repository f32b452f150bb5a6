//! Regularity-guided simulated annealing for 2-way grid partitioning.
//!
//! The decision variable is a polar fan boundary encoded as a base radius
//! `r_0` plus per-angle differences; radii are rebuilt cumulatively and
//! clamped to `[0, R_max]` each iteration. Differences are perturbed as
//! `beta * (T / T_init) * sin(delta + N(0, sigma^2))`, which bounds every
//! new difference by `beta * T / T_init` and keeps the boundary smooth
//! while the temperature cools. The base radius moves by a uniform draw on
//! the same envelope.
//!
//! The previous cost is overwritten with the candidate cost every
//! iteration, whether or not the candidate was accepted; acceptance only
//! controls which state the next perturbation starts from.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::boundary::{
    combine_cost, cut_size, imbalance, Boundary, BoundaryError, Corner, CostParams, FanContext,
    PartitionVector, ALL_CORNERS,
};
use crate::gridgraph::{laplacian, GridGraph, Laplacian, NodeWeightMatrix};

#[derive(Debug, Error)]
pub enum AnnealError {
    #[error("degenerate grid: total edge weight {we}, total node weight {wv}")]
    DegenerateGrid { we: f64, wv: f64 },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// Annealing schedule and cost weights.
#[derive(Debug, Clone)]
pub struct SAConfig {
    pub t_init: f64,
    pub t_limit: f64,
    pub gamma: f64,
    pub sigma: f64,
    /// Perturbation amplitude in length units; the conventional default is
    /// a tenth of the layout diagonal.
    pub beta: f64,
    /// Number of fan sectors.
    pub m: usize,
    pub params: CostParams,
    pub seed: u64,
}

impl SAConfig {
    /// Defaults for a layout with the given diagonal length.
    pub fn defaults(layout_diag: f64) -> Self {
        SAConfig {
            t_init: 1.0,
            t_limit: 1e-3,
            gamma: 0.995,
            sigma: 0.5,
            beta: 0.1 * layout_diag,
            m: 64,
            params: CostParams {
                alpha_c: 1.0,
                alpha_b: 4.0,
            },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Planned loop evaluations: ceil(log_gamma(T_limit / T_init)).
    pub fn planned_iterations(&self) -> usize {
        ((self.t_limit / self.t_init).ln() / self.gamma.ln()).ceil() as usize
    }
}

/// Mutable annealer state: base radius, differences, temperature and the
/// incumbent record.
#[derive(Debug, Clone)]
pub struct SAState {
    pub r0: f64,
    pub deltas: Vec<f64>,
    pub temperature: f64,
    pub best_r0: f64,
    pub best_deltas: Vec<f64>,
    pub best_cost: f64,
}

/// One record per loop iteration, for traces and instrumentation.
#[derive(Debug, Clone, Copy)]
pub struct IterRecord {
    pub iter: usize,
    pub temperature: f64,
    pub cost: f64,
    pub best_cost: f64,
    pub accepted: bool,
    pub max_abs_delta: f64,
}

/// Result of one 2-way run from a fixed corner.
#[derive(Debug, Clone)]
pub struct TwoWayResult {
    pub labels: PartitionVector,
    pub best_cost: f64,
    pub boundary: Boundary,
}

/// Perturb the base radius and differences at temperature `t`.
pub fn perturb(
    r0: f64,
    deltas: &[f64],
    t: f64,
    cfg: &SAConfig,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<f64>) {
    let envelope = cfg.beta * t / cfg.t_init;
    let normal = Normal::new(0.0, cfg.sigma).expect("sigma must be finite and non-negative");
    let new_deltas = deltas
        .iter()
        .map(|&d| envelope * (d + normal.sample(rng)).sin())
        .collect();
    let new_r0 = r0 + rng.gen_range(-envelope..=envelope);
    (new_r0, new_deltas)
}

/// Rebuild radii from base + differences, clamping each cumulative value.
fn rebuild_radii(r0: f64, deltas: &[f64], r_max: f64) -> Vec<f64> {
    let mut radii = Vec::with_capacity(deltas.len() + 1);
    let mut cur = r0.clamp(0.0, r_max);
    radii.push(cur);
    for &d in deltas {
        cur = (cur + d).clamp(0.0, r_max);
        radii.push(cur);
    }
    radii
}

/// Shared per-grid evaluation state reused across iterations.
struct Evaluator {
    ctx: FanContext,
    lap: Laplacian,
    dw: NodeWeightMatrix,
    we: f64,
    wv: f64,
    params: CostParams,
    scratch: Vec<u8>,
}

impl Evaluator {
    fn new(g: &GridGraph, corner: Corner, cfg: &SAConfig) -> Result<Self, AnnealError> {
        let we = g.total_edge_weight;
        let wv = g.total_node_weight;
        if we <= 0.0 || wv <= 0.0 {
            return Err(AnnealError::DegenerateGrid { we, wv });
        }
        Ok(Evaluator {
            ctx: FanContext::new(g, corner, cfg.m),
            lap: laplacian(g),
            dw: NodeWeightMatrix::from_grid(g),
            we,
            wv,
            params: cfg.params,
            scratch: Vec::new(),
        })
    }

    fn eval(&mut self, radii: &[f64]) -> f64 {
        self.ctx.eval_into(radii, &mut self.scratch);
        let p = PartitionVector {
            labels: std::mem::take(&mut self.scratch),
        };
        let cost = self.eval_labels(&p);
        self.scratch = p.labels;
        cost
    }

    fn eval_labels(&self, p: &PartitionVector) -> f64 {
        let cut = cut_size(p, &self.lap).expect("matching dimensions");
        let ub = imbalance(p, &self.dw, self.wv).expect("matching dimensions");
        combine_cost(cut, ub, self.we, self.wv, self.params)
    }
}

/// Project a binary labeling onto its contiguous core: each side keeps its
/// largest 4-connected component and every stray patch flips to the other
/// side. The fan region is connected in continuous space; this removes the
/// spurious disconnections that center quantization introduces (thin radial
/// spikes covering diagonal center runs).
fn project_two_way(labels: &mut [u8], nx: usize, ny: usize) {
    for side in [1u8, 0u8] {
        let comps = side_components(labels, nx, ny, side);
        if comps.len() <= 1 {
            continue;
        }
        // Keep the largest component; ties break toward the one containing
        // the lowest grid index.
        let keep = comps
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| (c.len(), std::cmp::Reverse(c[0])))
            .map(|(i, _)| i)
            .unwrap();
        for (i, comp) in comps.iter().enumerate() {
            if i != keep {
                for &v in comp {
                    labels[v] = 1 - side;
                }
            }
        }
    }
}

/// 4-connected components of one side; each component lists its grids in
/// ascending index order starting from the lowest.
fn side_components(labels: &[u8], nx: usize, ny: usize, side: u8) -> Vec<Vec<usize>> {
    let n = nx * ny;
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] || labels[start] != side {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let (col, row) = (v % nx, v / nx);
            let mut push = |u: usize, stack: &mut Vec<usize>, comp: &mut Vec<usize>| {
                if !seen[u] && labels[u] == side {
                    seen[u] = true;
                    stack.push(u);
                    comp.push(u);
                }
            };
            if col > 0 {
                push(v - 1, &mut stack, &mut comp);
            }
            if col + 1 < nx {
                push(v + 1, &mut stack, &mut comp);
            }
            if row > 0 {
                push(v - nx, &mut stack, &mut comp);
            }
            if row + 1 < ny {
                push(v + nx, &mut stack, &mut comp);
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

pub fn two_way_spatial_part(
    g: &GridGraph,
    cfg: &SAConfig,
    origin: Corner,
) -> Result<TwoWayResult, AnnealError> {
    two_way_spatial_part_traced(g, cfg, origin, &mut |_| {})
}

/// 2-way partitioning from one corner with a per-iteration observer hook.
pub fn two_way_spatial_part_traced(
    g: &GridGraph,
    cfg: &SAConfig,
    origin: Corner,
    observer: &mut dyn FnMut(IterRecord),
) -> Result<TwoWayResult, AnnealError> {
    let mut eval = Evaluator::new(g, origin, cfg)?;
    let r_max = eval.ctx.r_max();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Base radius starts at zero; initial differences form a modest wedge.
    let r0_init = 0.0;
    let init_span = g.layout_diag() / (2.0 * cfg.m as f64);
    let deltas_init: Vec<f64> = (0..cfg.m).map(|_| rng.gen_range(0.0..=init_span)).collect();

    let mut state = SAState {
        r0: r0_init,
        deltas: deltas_init,
        temperature: cfg.t_init,
        best_r0: r0_init,
        best_deltas: Vec::new(),
        best_cost: f64::INFINITY,
    };
    let mut cost_prev = eval.eval(&rebuild_radii(state.r0, &state.deltas, r_max));
    state.best_cost = cost_prev;
    state.best_r0 = state.r0;
    state.best_deltas = state.deltas.clone();

    let mut iter = 0usize;
    while state.temperature >= cfg.t_limit {
        let (new_r0, new_deltas) = perturb(state.r0, &state.deltas, state.temperature, cfg, &mut rng);
        let radii = rebuild_radii(new_r0, &new_deltas, r_max);
        let cost = eval.eval(&radii);

        let mut accepted = false;
        if cost < cost_prev {
            accepted = true;
            if cost < state.best_cost {
                state.best_cost = cost;
                state.best_r0 = new_r0;
                state.best_deltas = new_deltas.clone();
            }
        } else if ((cost_prev - cost) / state.temperature).exp() > rng.gen::<f64>() {
            accepted = true;
        }
        let max_abs_delta = new_deltas.iter().fold(0.0f64, |a, &d| a.max(d.abs()));
        if accepted {
            state.r0 = new_r0;
            state.deltas = new_deltas;
        }
        cost_prev = cost;
        observer(IterRecord {
            iter,
            temperature: state.temperature,
            cost,
            best_cost: state.best_cost,
            accepted,
            max_abs_delta,
        });
        state.temperature *= cfg.gamma;
        iter += 1;
    }

    let best_radii = rebuild_radii(state.best_r0, &state.best_deltas, r_max);
    let mut labels = Vec::new();
    eval.ctx.eval_into(&best_radii, &mut labels);
    // The quantized label set can contain spurious islands even though the
    // fan region itself is connected; project onto the contiguous core,
    // then walk the boundary downhill with single-grid flips. Both steps
    // are deterministic, the refinement strictly decreases the same cost
    // the annealer optimized, and contiguity of both sides is preserved.
    project_two_way(&mut labels, g.nx, g.ny);
    refine_boundary(&mut labels, g, &eval);
    let labels = PartitionVector { labels };
    let final_cost = eval.eval_labels(&labels);
    let boundary = Boundary::new(origin, cfg.m, best_radii, g.layout_w, g.layout_h);
    Ok(TwoWayResult {
        labels,
        best_cost: final_cost,
        boundary,
    })
}

/// Greedy boundary descent: flip border grids one at a time while the flip
/// strictly lowers the cost and keeps both sides single 4-connected
/// regions. First-improvement scans in grid-index order until a full pass
/// finds nothing, so the result is deterministic.
fn refine_boundary(labels: &mut [u8], g: &GridGraph, eval: &Evaluator) {
    let n = g.node_count();
    let (nx, ny) = (g.nx, g.ny);
    let mut side1: f64 = labels
        .iter()
        .zip(&g.node_weight)
        .filter(|(&l, _)| l == 1)
        .map(|(_, &w)| w)
        .sum();
    let wv = eval.wv;
    let we = eval.we;
    let params = eval.params;
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
            let side = labels[v];
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
            // Only border grids are candidates; the receiving side stays
            // connected because it gains an adjacent grid.
            if !nbrs[..cnt].iter().any(|&u| labels[u] != side) {
                continue;
            }
            let mut delta_cut = 0.0;
            for &u in &nbrs[..cnt] {
                let w = edge_w(v, u);
                if labels[u] == side {
                    delta_cut += w;
                } else {
                    delta_cut -= w;
                }
            }
            let w_v = g.node_weight[v];
            let new_side1 = if side == 1 { side1 - w_v } else { side1 + w_v };
            let ub_old = (2.0 * side1 - wv).abs();
            let ub_new = (2.0 * new_side1 - wv).abs();
            let delta = params.alpha_c * delta_cut / we + params.alpha_b * (ub_new - ub_old) / wv;
            if delta >= -1e-12 {
                continue;
            }
            labels[v] = 1 - side;
            if side_is_connected(labels, nx, ny, side) {
                side1 = new_side1;
                flipped = true;
            } else {
                labels[v] = side;
            }
        }
        if !flipped {
            break;
        }
    }
}

fn side_is_connected(labels: &[u8], nx: usize, ny: usize, side: u8) -> bool {
    let n = nx * ny;
    let Some(start) = (0..n).find(|&v| labels[v] == side) else {
        return false;
    };
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 1usize;
    while let Some(v) = stack.pop() {
        let (col, row) = (v % nx, v / nx);
        let mut push = |u: usize, stack: &mut Vec<usize>, count: &mut usize| {
            if !seen[u] && labels[u] == side {
                seen[u] = true;
                stack.push(u);
                *count += 1;
            }
        };
        if col > 0 {
            push(v - 1, &mut stack, &mut count);
        }
        if col + 1 < nx {
            push(v + 1, &mut stack, &mut count);
        }
        if row > 0 {
            push(v - nx, &mut stack, &mut count);
        }
        if row + 1 < ny {
            push(v + nx, &mut stack, &mut count);
        }
    }
    count == labels.iter().filter(|&&l| l == side).count()
}

/// Outcome of trying all four corners.
#[derive(Debug, Clone)]
pub struct CornerOutcome {
    pub result: TwoWayResult,
    pub corner: Corner,
}

/// Derived seed for one corner run: the shared seed XOR the corner index.
pub fn corner_seed(seed: u64, corner: Corner) -> u64 {
    seed ^ corner.index() as u64
}

/// Run the 2-way annealer from all four layout corners and keep the
/// lowest-cost result; ties break in corner declaration order. Corner runs
/// are independent and execute in parallel inside the ambient rayon pool;
/// each uses a deterministic sub-seed, so results do not depend on thread
/// count.
pub fn best_of_corners(g: &GridGraph, cfg: &SAConfig) -> Result<CornerOutcome, AnnealError> {
    use rayon::prelude::*;
    let runs: Vec<Result<TwoWayResult, AnnealError>> = ALL_CORNERS
        .par_iter()
        .map(|&corner| {
            let sub = SAConfig {
                seed: corner_seed(cfg.seed, corner),
                ..cfg.clone()
            };
            two_way_spatial_part(g, &sub, corner)
        })
        .collect();
    let mut best: Option<CornerOutcome> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let result = run?;
        let replace = match &best {
            None => true,
            Some(b) => result.best_cost < b.result.best_cost,
        };
        if replace {
            best = Some(CornerOutcome {
                result,
                corner: ALL_CORNERS[i],
            });
        }
    }
    Ok(best.expect("four corners evaluated"))
}
