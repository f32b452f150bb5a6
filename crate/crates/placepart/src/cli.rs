//! Command-line driver: `partition`, `eval` and `render` subcommands.
//!
//! Exit codes: 0 success, 2 usage/config error, 3 input parse or data
//! error, 4 infeasible balance, 5 internal error. The log level is
//! controlled by the `RUST_LOG` environment variable only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::annealer::{corner_seed, two_way_spatial_part_traced, SAConfig};
use crate::boundary::{CostParams, ALL_CORNERS};
use crate::gridgraph::build_grid_graph;
use crate::kway::{kway_partition_detailed, score_labels, KWayConfig, KWayError};
use crate::netlist::{parse_netlist, write_result, PlacedNetlist};
use crate::render::{render_svg, RenderSpec};
use crate::steiner::route_all;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "placepart",
    version,
    about = "Spatially contiguous k-way partitioning of placed netlists"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partition a placed netlist into k contiguous regions.
    Partition(PartitionArgs),
    /// Score an externally produced assignment on the grid model.
    Eval(EvalArgs),
    /// Render a partitioned layout as SVG.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Input netlist JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of partitions (a power of two).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Balance tolerance, in (0, 1/k].
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Grid columns.
    #[arg(long, default_value_t = 64)]
    pub nx: usize,
    /// Grid rows.
    #[arg(long, default_value_t = 64)]
    pub ny: usize,
    /// Number of boundary fan angles.
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Cut-size weight in the cost.
    #[arg(long, default_value_t = 1.0)]
    pub alpha_c: f64,
    /// Imbalance weight in the cost.
    #[arg(long, default_value_t = 4.0)]
    pub alpha_b: f64,
    /// Initial annealing temperature.
    #[arg(long, default_value_t = 1.0)]
    pub t_init: f64,
    /// Final annealing temperature.
    #[arg(long, default_value_t = 1e-3)]
    pub t_limit: f64,
    /// Cooling factor per iteration.
    #[arg(long, default_value_t = 0.995)]
    pub gamma: f64,
    /// Gaussian noise level of the perturbation.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    /// Perturbation amplitude; defaults to a tenth of the layout diagonal.
    #[arg(long)]
    pub beta: Option<f64>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for corner trials, net routing and sibling nodes.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Net weight threshold for the critical-crossings metric.
    #[arg(long, default_value_t = 0.0)]
    pub critical_threshold: f64,
    /// Assignment CSV output path.
    #[arg(long, default_value = "assignment.csv")]
    pub out_assignment: PathBuf,
    /// Metrics JSON output path.
    #[arg(long, default_value = "metrics.json")]
    pub out_metrics: PathBuf,
    /// Optional SVG of the partitioned grid.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Optional per-iteration cost trace CSV (root-level corner runs).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Optional debug dump of grid node/edge weights as CSV.
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,
    /// Optional directory for before/after embedding mesh SVGs (debug).
    #[arg(long)]
    pub mesh_svg_dir: Option<PathBuf>,
}

impl PartitionArgs {
    pub fn to_kway_config(&self, netlist: &PlacedNetlist) -> KWayConfig {
        let beta = self.beta.unwrap_or(0.1 * netlist.layout_diag());
        KWayConfig {
            k: self.k,
            epsilon: self.epsilon,
            nx: self.nx,
            ny: self.ny,
            sa: SAConfig {
                t_init: self.t_init,
                t_limit: self.t_limit,
                gamma: self.gamma,
                sigma: self.sigma,
                beta,
                m: self.m,
                params: CostParams {
                    alpha_c: self.alpha_c,
                    alpha_b: self.alpha_b,
                },
                seed: self.seed,
            },
            critical_threshold: self.critical_threshold,
            mesh_svg_dir: self.mesh_svg_dir.clone(),
        }
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Input netlist JSON.
    #[arg(long)]
    pub netlist: PathBuf,
    /// Assignment CSV (`cell_id,partition`) to score.
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub nx: usize,
    #[arg(long, default_value_t = 64)]
    pub ny: usize,
    /// Net weight threshold for the critical-crossings metric.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// Balance tolerance used for the feasibility flag.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value = "metrics.json")]
    pub out_metrics: PathBuf,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Input netlist JSON.
    #[arg(long)]
    pub netlist: PathBuf,
    /// Assignment CSV to visualize.
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub nx: usize,
    #[arg(long, default_value_t = 64)]
    pub ny: usize,
    /// Output SVG path.
    #[arg(long, default_value = "layout.svg")]
    pub out: PathBuf,
    /// Pixels per layout unit.
    #[arg(long, default_value_t = 8.0)]
    pub scale: f64,
    /// Also draw Steiner trees.
    #[arg(long)]
    pub trees: bool,
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors.
            e.exit();
        }
    };
    match cli.command {
        Command::Partition(args) => run_partition(&args),
        Command::Eval(args) => run_eval(&args),
        Command::Render(args) => run_render(&args),
    }
}

fn build_pool(threads: usize) -> Result<rayon::ThreadPool, i32> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| {
            eprintln!("error: failed to build thread pool: {e}");
            EXIT_INTERNAL
        })
}

fn kway_exit_code(err: &KWayError) -> i32 {
    use crate::annealer::AnnealError;
    match err {
        KWayError::BadK(_) | KWayError::BadEpsilon { .. } => EXIT_USAGE,
        KWayError::Infeasible { .. } => EXIT_INFEASIBLE,
        KWayError::Grid(_) => EXIT_USAGE,
        // A grid with no net crossings or no pins cannot be partitioned at
        // the chosen resolution; that is an input condition, not a bug.
        KWayError::Anneal {
            source: AnnealError::DegenerateGrid { .. },
            ..
        } => EXIT_USAGE,
        _ => EXIT_INTERNAL,
    }
}

/// Execute the full partition flow; writes the assignment, metrics and
/// optional artifacts.
pub fn run_partition(args: &PartitionArgs) -> i32 {
    let netlist = match parse_netlist(&args.input) {
        Ok(nl) => nl,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    if netlist.cells.is_empty() {
        eprintln!("error: netlist has no cells");
        return EXIT_PARSE;
    }
    let cfg = args.to_kway_config(&netlist);
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let pool = match build_pool(args.threads) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let outcome = pool.install(|| kway_partition_detailed(&netlist, &cfg));
    let (result, grid, trees) = match outcome {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return kway_exit_code(&e);
        }
    };

    if let Err(e) = write_result(&result, &netlist, &args.out_assignment, &args.out_metrics) {
        eprintln!("error: {e}");
        return EXIT_INTERNAL;
    }
    if let Some(svg_path) = &args.svg {
        let spec = RenderSpec::default();
        if let Err(e) = render_svg(&netlist, &grid, &result, &spec, Some(&trees), svg_path) {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    }
    if let Some(grid_path) = &args.dump_grid {
        if let Err(e) = std::fs::write(grid_path, grid.weights_csv()) {
            eprintln!("error: writing {}: {e}", grid_path.display());
            return EXIT_INTERNAL;
        }
    }
    if let Some(trace_path) = &args.trace {
        let csv = pool.install(|| root_trace_csv(&netlist, &cfg));
        match csv {
            Ok(csv) => {
                if let Err(e) = std::fs::write(trace_path, csv) {
                    eprintln!("error: writing {}: {e}", trace_path.display());
                    return EXIT_INTERNAL;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INTERNAL;
            }
        }
    }

    if result.feasible {
        EXIT_OK
    } else {
        eprintln!(
            "balance violated: weights {:?} outside the epsilon = {} band",
            result.per_partition_weight, result.epsilon
        );
        EXIT_INFEASIBLE
    }
}

/// Cost trace of the root-level corner runs, one row per iteration.
fn root_trace_csv(netlist: &PlacedNetlist, cfg: &KWayConfig) -> Result<String, KWayError> {
    let trees = route_all(netlist);
    let grid = build_grid_graph(netlist, cfg.nx, cfg.ny, &trees)?;
    let mut csv = String::from("corner,iter,temperature,cost,best_cost\n");
    for &corner in &ALL_CORNERS {
        let sub = SAConfig {
            seed: corner_seed(cfg.sa.seed, corner),
            ..cfg.sa.clone()
        };
        let mut rows = Vec::new();
        two_way_spatial_part_traced(&grid, &sub, corner, &mut |rec| {
            rows.push((rec.iter, rec.temperature, rec.cost, rec.best_cost));
        })
        .map_err(|source| KWayError::Anneal {
            path: "root".into(),
            source,
        })?;
        for (iter, t, cost, best) in rows {
            writeln!(csv, "{},{iter},{t},{cost},{best}", corner.index()).expect("string write");
        }
    }
    Ok(csv)
}

/// Read an assignment CSV back into per-cell labels.
pub fn read_assignment(
    path: impl AsRef<Path>,
    netlist: &PlacedNetlist,
) -> Result<Vec<usize>, String> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    let mut labels: Vec<Option<usize>> = vec![None; netlist.cells.len()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line == "cell_id,partition") {
            continue;
        }
        let (id, label) = line
            .split_once(',')
            .ok_or_else(|| format!("line {}: expected `cell_id,partition`", lineno + 1))?;
        let label: usize = label
            .trim()
            .parse()
            .map_err(|e| format!("line {}: bad partition `{label}`: {e}", lineno + 1))?;
        let cell = netlist
            .cell_index(id.trim())
            .ok_or_else(|| format!("line {}: unknown cell `{id}`", lineno + 1))?;
        if labels[cell].replace(label).is_some() {
            return Err(format!("line {}: duplicate assignment for `{id}`", lineno + 1));
        }
    }
    let missing = labels.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        return Err(format!("assignment does not cover {missing} cells"));
    }
    Ok(labels.into_iter().map(Option::unwrap).collect())
}

/// Score an external assignment and write the metrics JSON.
pub fn run_eval(args: &EvalArgs) -> i32 {
    let netlist = match parse_netlist(&args.netlist) {
        Ok(nl) => nl,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let cell_label = match read_assignment(&args.assignment, &netlist) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let k = cell_label.iter().copied().max().unwrap_or(0) + 1;
    let trees = route_all(&netlist);
    let grid = match build_grid_graph(&netlist, args.nx, args.ny, &trees) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match score_labels(
        &netlist,
        &grid,
        &trees,
        cell_label,
        k,
        args.epsilon,
        args.threshold,
    ) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    };
    if let Err(e) = std::fs::write(&args.out_metrics, crate::netlist::metrics_json(&result)) {
        eprintln!("error: writing {}: {e}", args.out_metrics.display());
        return EXIT_INTERNAL;
    }
    EXIT_OK
}

/// Render an assignment as a colored grid map.
pub fn run_render(args: &RenderArgs) -> i32 {
    let netlist = match parse_netlist(&args.netlist) {
        Ok(nl) => nl,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let cell_label = match read_assignment(&args.assignment, &netlist) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    let k = cell_label.iter().copied().max().unwrap_or(0) + 1;
    let trees = route_all(&netlist);
    let grid = match build_grid_graph(&netlist, args.nx, args.ny, &trees) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match score_labels(&netlist, &grid, &trees, cell_label, k, 0.1, 0.0) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let spec = RenderSpec {
        trees: args.trees,
        scale: args.scale,
        ..RenderSpec::default()
    };
    if let Err(e) = render_svg(&netlist, &grid, &result, &spec, Some(&trees), &args.out) {
        eprintln!("error: {e}");
        return EXIT_INTERNAL;
    }
    EXIT_OK
}
