//! Placed-netlist parsing, validation and result serialization.
//!
//! The on-disk netlist format is a single JSON document:
//!
//! ```json
//! {
//!   "layout": { "w": 100.0, "h": 80.0 },
//!   "cells": [ { "id": "c0", "x": 1.5, "y": 2.0 } ],
//!   "nets":  [ { "id": "n0", "w": 1.0, "cells": ["c0", "c1"] } ]
//! }
//! ```
//!
//! See `schemas/netlist.schema.json` at the repository root for the formal
//! schema. Partition results are written as a `cell_id,partition` CSV plus a
//! metrics JSON sidecar; both are byte-stable for identical inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::PartitionResult;

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed netlist JSON: {0}")]
    Syntax(String),
    #[error("layout dimensions must be positive, got {w} x {h}")]
    NonPositiveLayout { w: f64, h: f64 },
    #[error("cell `{cell}` has non-finite coordinates")]
    NonFiniteCoordinate { cell: String },
    #[error("cell `{cell}` at ({x}, {y}) lies outside the layout")]
    OutOfBounds { cell: String, x: f64, y: f64 },
    #[error("duplicate cell id `{0}`")]
    DuplicateCellId(String),
    #[error("duplicate net id `{0}`")]
    DuplicateNetId(String),
    #[error("net `{net}` references unknown cell `{cell}`")]
    DanglingCellRef { net: String, cell: String },
    #[error("net `{net}` has weight {weight}, expected > 0")]
    NonPositiveWeight { net: String, weight: f64 },
    #[error("net `{net}` connects fewer than 2 distinct cells")]
    TooFewPins { net: String },
    #[error("partition result labels do not cover the netlist ({labels} labels for {cells} cells)")]
    LabelCoverage { labels: usize, cells: usize },
}

/// A placed standard cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// A net: a weighted subset of cells. `pins` holds indices into
/// [`PlacedNetlist::cells`], deduplicated, with at least two entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub id: String,
    pub weight: f64,
    pub pins: Vec<usize>,
}

/// A validated placed netlist. Immutable after construction and safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedNetlist {
    pub layout_width: f64,
    pub layout_height: f64,
    pub cells: Vec<Cell>,
    pub nets: Vec<Net>,
}

impl PlacedNetlist {
    /// Number of pins a cell contributes: one per net membership.
    pub fn cell_pin_counts(&self) -> Vec<f64> {
        let mut counts = vec![0.0; self.cells.len()];
        for net in &self.nets {
            for &pin in &net.pins {
                counts[pin] += 1.0;
            }
        }
        counts
    }

    pub fn total_pins(&self) -> f64 {
        self.nets.iter().map(|n| n.pins.len() as f64).sum()
    }

    pub fn layout_diag(&self) -> f64 {
        (self.layout_width * self.layout_width + self.layout_height * self.layout_height).sqrt()
    }

    pub fn cell_index(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }
}

// Raw serde mirror of the JSON document.
#[derive(Serialize, Deserialize)]
struct RawDoc {
    layout: RawLayout,
    cells: Vec<RawCell>,
    nets: Vec<RawNet>,
}

#[derive(Serialize, Deserialize)]
struct RawLayout {
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCell {
    id: String,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct RawNet {
    id: String,
    w: f64,
    cells: Vec<String>,
}

/// Parse and validate a netlist file.
pub fn parse_netlist(path: impl AsRef<Path>) -> Result<PlacedNetlist, NetlistError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| NetlistError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_netlist_str(&text)
}

/// Parse and validate a netlist from an in-memory JSON string.
pub fn parse_netlist_str(text: &str) -> Result<PlacedNetlist, NetlistError> {
    let raw: RawDoc =
        serde_json::from_str(text).map_err(|e| NetlistError::Syntax(e.to_string()))?;
    validate(raw)
}

fn validate(raw: RawDoc) -> Result<PlacedNetlist, NetlistError> {
    let (w, h) = (raw.layout.w, raw.layout.h);
    if !(w.is_finite() && h.is_finite()) || w <= 0.0 || h <= 0.0 {
        return Err(NetlistError::NonPositiveLayout { w, h });
    }

    let mut index = BTreeMap::new();
    let mut cells = Vec::with_capacity(raw.cells.len());
    for (i, c) in raw.cells.into_iter().enumerate() {
        if !(c.x.is_finite() && c.y.is_finite()) {
            return Err(NetlistError::NonFiniteCoordinate { cell: c.id });
        }
        if c.x < 0.0 || c.y < 0.0 || c.x > w || c.y > h {
            return Err(NetlistError::OutOfBounds {
                cell: c.id,
                x: c.x,
                y: c.y,
            });
        }
        if index.insert(c.id.clone(), i).is_some() {
            return Err(NetlistError::DuplicateCellId(c.id));
        }
        cells.push(Cell {
            id: c.id,
            x: c.x,
            y: c.y,
        });
    }

    let mut net_ids = BTreeMap::new();
    let mut nets = Vec::with_capacity(raw.nets.len());
    for (i, n) in raw.nets.into_iter().enumerate() {
        if net_ids.insert(n.id.clone(), i).is_some() {
            return Err(NetlistError::DuplicateNetId(n.id));
        }
        if !n.w.is_finite() || n.w <= 0.0 {
            return Err(NetlistError::NonPositiveWeight {
                net: n.id,
                weight: n.w,
            });
        }
        let mut pins = Vec::with_capacity(n.cells.len());
        for cell_id in &n.cells {
            let &idx = index
                .get(cell_id)
                .ok_or_else(|| NetlistError::DanglingCellRef {
                    net: n.id.clone(),
                    cell: cell_id.clone(),
                })?;
            if pins.contains(&idx) {
                log::warn!("net `{}`: duplicate pin on cell `{}` dropped", n.id, cell_id);
            } else {
                pins.push(idx);
            }
        }
        if pins.len() < 2 {
            return Err(NetlistError::TooFewPins { net: n.id });
        }
        nets.push(Net {
            id: n.id,
            weight: n.w,
            pins,
        });
    }

    Ok(PlacedNetlist {
        layout_width: w,
        layout_height: h,
        cells,
        nets,
    })
}

/// Serialize a netlist back to its JSON document form.
pub fn netlist_to_json(netlist: &PlacedNetlist) -> String {
    let raw = RawDoc {
        layout: RawLayout {
            w: netlist.layout_width,
            h: netlist.layout_height,
        },
        cells: netlist
            .cells
            .iter()
            .map(|c| RawCell {
                id: c.id.clone(),
                x: c.x,
                y: c.y,
            })
            .collect(),
        nets: netlist
            .nets
            .iter()
            .map(|n| RawNet {
                id: n.id.clone(),
                w: n.weight,
                cells: n.pins.iter().map(|&p| netlist.cells[p].id.clone()).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("netlist serialization");
    s.push('\n');
    s
}

pub fn write_netlist(
    netlist: &PlacedNetlist,
    path: impl AsRef<Path>,
) -> Result<(), NetlistError> {
    let path = path.as_ref();
    std::fs::write(path, netlist_to_json(netlist)).map_err(|source| NetlistError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Render the assignment CSV (`cell_id,partition`), rows in netlist order.
pub fn assignment_csv(
    result: &PartitionResult,
    netlist: &PlacedNetlist,
) -> Result<String, NetlistError> {
    if result.cell_label.len() != netlist.cells.len() || netlist.cells.is_empty() {
        return Err(NetlistError::LabelCoverage {
            labels: result.cell_label.len(),
            cells: netlist.cells.len(),
        });
    }
    let mut out = String::from("cell_id,partition\n");
    for (cell, &label) in netlist.cells.iter().zip(&result.cell_label) {
        writeln!(out, "{},{}", cell.id, label).expect("string write");
    }
    Ok(out)
}

/// Render the metrics JSON sidecar.
pub fn metrics_json(result: &PartitionResult) -> String {
    #[derive(Serialize)]
    struct MetricsDoc<'a> {
        cut_size: f64,
        fragments: usize,
        per_partition_weight: &'a [f64],
        critical_crossings: usize,
        feasible: bool,
        epsilon: f64,
        k: usize,
    }
    let doc = MetricsDoc {
        cut_size: result.cut_size,
        fragments: result.fragments,
        per_partition_weight: &result.per_partition_weight,
        critical_crossings: result.critical_crossings,
        feasible: result.feasible,
        epsilon: result.epsilon,
        k: result.k,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("metrics serialization");
    s.push('\n');
    s
}

/// Write the assignment CSV and metrics JSON for a partition result.
pub fn write_result(
    result: &PartitionResult,
    netlist: &PlacedNetlist,
    assignment_path: impl AsRef<Path>,
    metrics_path: impl AsRef<Path>,
) -> Result<(), NetlistError> {
    let csv = assignment_csv(result, netlist)?;
    let assignment_path = assignment_path.as_ref();
    std::fs::write(assignment_path, csv).map_err(|source| NetlistError::Io {
        path: assignment_path.display().to_string(),
        source,
    })?;
    let metrics_path = metrics_path.as_ref();
    std::fs::write(metrics_path, metrics_json(result)).map_err(|source| NetlistError::Io {
        path: metrics_path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "layout": {"w": 10.0, "h": 10.0},
            "cells": [
                {"id": "a", "x": 1.0, "y": 1.0},
                {"id": "b", "x": 9.0, "y": 9.0}
            ],
            "nets": [
                {"id": "n0", "w": 1.0, "cells": ["a", "b"]}
            ]
        }"#
    }

    #[test]
    fn parses_minimal_netlist() {
        let nl = parse_netlist_str(minimal()).unwrap();
        assert_eq!(nl.cells.len(), 2);
        assert_eq!(nl.nets.len(), 1);
        assert_eq!(nl.nets[0].pins, vec![0, 1]);
    }

    #[test]
    fn dangling_reference_is_semantic_error() {
        let text = minimal().replace("\"b\"]", "\"zzz\"]");
        match parse_netlist_str(&text) {
            Err(NetlistError::DanglingCellRef { net, cell }) => {
                assert_eq!(net, "n0");
                assert_eq!(cell, "zzz");
            }
            other => panic!("expected dangling ref, got {other:?}"),
        }
    }

    #[test]
    fn one_pin_net_rejected() {
        let text = minimal().replace("[\"a\", \"b\"]", "[\"a\"]");
        assert!(matches!(
            parse_netlist_str(&text),
            Err(NetlistError::TooFewPins { .. })
        ));
    }

    #[test]
    fn duplicate_pins_deduplicated() {
        let text = minimal().replace("[\"a\", \"b\"]", "[\"a\", \"b\", \"a\"]");
        let nl = parse_netlist_str(&text).unwrap();
        assert_eq!(nl.nets[0].pins, vec![0, 1]);
    }

    #[test]
    fn net_of_duplicates_only_rejected() {
        let text = minimal().replace("[\"a\", \"b\"]", "[\"a\", \"a\"]");
        assert!(matches!(
            parse_netlist_str(&text),
            Err(NetlistError::TooFewPins { .. })
        ));
    }

    #[test]
    fn out_of_bounds_cell_rejected() {
        let text = minimal().replace("\"x\": 9.0", "\"x\": 11.0");
        assert!(matches!(
            parse_netlist_str(&text),
            Err(NetlistError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn non_positive_weight_rejected() {
        let text = minimal().replace("\"w\": 1.0", "\"w\": 0.0");
        assert!(matches!(
            parse_netlist_str(&text),
            Err(NetlistError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = minimal().replace("\"id\": \"b\"", "\"id\": \"a\"");
        assert!(matches!(
            parse_netlist_str(&text),
            Err(NetlistError::DuplicateCellId(_))
        ));
    }

    #[test]
    fn syntax_error_reported() {
        assert!(matches!(
            parse_netlist_str("{ not json"),
            Err(NetlistError::Syntax(_))
        ));
    }

    #[test]
    fn round_trip_is_structurally_equal() {
        let nl = parse_netlist_str(minimal()).unwrap();
        let nl2 = parse_netlist_str(&netlist_to_json(&nl)).unwrap();
        assert_eq!(nl, nl2);
    }

    #[test]
    fn assignment_rows_and_determinism() {
        let nl = parse_netlist_str(minimal()).unwrap();
        let result = PartitionResult {
            k: 2,
            epsilon: 0.1,
            cell_label: vec![0, 1],
            grid_label: vec![],
            cut_size: 0.0,
            fragments: 2,
            per_partition_weight: vec![1.0, 1.0],
            critical_crossings: 0,
            feasible: true,
        };
        let csv = assignment_csv(&result, &nl).unwrap();
        assert_eq!(csv, "cell_id,partition\na,0\nb,1\n");
        assert_eq!(csv, assignment_csv(&result, &nl).unwrap());
    }

    #[test]
    fn empty_labels_rejected() {
        let nl = parse_netlist_str(minimal()).unwrap();
        let result = PartitionResult {
            k: 2,
            epsilon: 0.1,
            cell_label: vec![],
            grid_label: vec![],
            cut_size: 0.0,
            fragments: 0,
            per_partition_weight: vec![],
            critical_crossings: 0,
            feasible: false,
        };
        assert!(matches!(
            assignment_csv(&result, &nl),
            Err(NetlistError::LabelCoverage { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_netlist() -> impl Strategy<Value = PlacedNetlist> {
            (2usize..20, 1usize..12, 1.0f64..200.0, 1.0f64..200.0).prop_flat_map(
                |(n_cells, n_nets, w, h)| {
                    let cells = proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), n_cells);
                    let nets = proptest::collection::vec(
                        (
                            proptest::collection::vec(0usize..n_cells, 2..5),
                            0.01f64..10.0,
                        ),
                        n_nets,
                    );
                    (cells, nets).prop_map(move |(cells, nets)| {
                        let cells: Vec<Cell> = cells
                            .into_iter()
                            .enumerate()
                            .map(|(i, (fx, fy))| Cell {
                                id: format!("c{i}"),
                                x: fx * w,
                                y: fy * h,
                            })
                            .collect();
                        let nets: Vec<Net> = nets
                            .into_iter()
                            .enumerate()
                            .filter_map(|(i, (mut pins, weight))| {
                                pins.sort_unstable();
                                pins.dedup();
                                if pins.len() < 2 {
                                    return None;
                                }
                                Some(Net {
                                    id: format!("n{i}"),
                                    weight,
                                    pins,
                                })
                            })
                            .collect();
                        PlacedNetlist {
                            layout_width: w,
                            layout_height: h,
                            cells,
                            nets,
                        }
                    })
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            // Write-then-parse must reproduce the structure for any valid
            // netlist.
            #[test]
            fn round_trip_identity(nl in arb_netlist()) {
                let parsed = parse_netlist_str(&netlist_to_json(&nl)).unwrap();
                prop_assert_eq!(parsed, nl);
            }
        }
    }
}
