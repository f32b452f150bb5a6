//! Spatially contiguous k-way partitioning of placed VLSI netlists.
//!
//! Given a placed netlist, the library bins cells into a grid, estimates
//! routing with rectilinear Steiner trees, and searches for partition
//! boundaries that minimize the weighted spatial cut size — the number of
//! times the boundary crosses pre-routed nets, weighted per net — while
//! holding every partition inside a balance band and keeping each partition
//! one contiguous region of the layout.
//!
//! The search models a 2-way boundary as a polar fan of triangles anchored
//! at a layout corner and anneals the fan radii under a temperature-scaled,
//! sine-bounded perturbation that keeps the boundary smooth. k-way results
//! come from recursive bisection: after each split, the winning side is
//! embedded into a fresh rectangle via Delaunay triangulation and a
//! discrete harmonic (Tutte) map, and the flow repeats inside it.
//!
//! The `examples/` directory walks through every major capability; the
//! `placepart` binary wires the same pieces into `partition`, `eval` and
//! `render` subcommands.

pub mod annealer;
pub mod boundary;
pub mod cli;
pub mod embedding;
pub mod geom;
pub mod gridgraph;
pub mod kway;
pub mod metrics;
pub mod netlist;
pub mod render;
pub mod steiner;
pub mod synth;

pub use annealer::{best_of_corners, two_way_spatial_part, SAConfig};
pub use boundary::{Boundary, Corner, CostParams, PartitionVector};
pub use gridgraph::{build_grid_graph, laplacian, GridGraph};
pub use kway::{kway_partition, KWayConfig};
pub use metrics::PartitionResult;
pub use netlist::{parse_netlist, PlacedNetlist};
pub use steiner::{steiner_oracle, steiner_tree, RectTree};
