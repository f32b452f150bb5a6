//! End-to-end tests of the `placepart` binary: exit codes, output
//! self-consistency, and determinism.

use std::path::PathBuf;
use std::process::Command;

use placepart::netlist::write_netlist;
use placepart::synth::uniform_instance;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_placepart")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("placepart-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn minimal_netlist(dir: &PathBuf) -> PathBuf {
    let path = dir.join("two_cells.json");
    std::fs::write(
        &path,
        r#"{
            "layout": {"w": 64.0, "h": 64.0},
            "cells": [
                {"id": "a", "x": 4.0, "y": 4.0},
                {"id": "b", "x": 60.0, "y": 60.0}
            ],
            "nets": [{"id": "n", "w": 1.0, "cells": ["a", "b"]}]
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn minimal_two_cell_partition_splits_them() {
    let dir = workdir("minimal");
    let input = minimal_netlist(&dir);
    let assignment = dir.join("assignment.csv");
    let metrics = dir.join("metrics.json");
    let status = Command::new(exe())
        .args([
            "partition",
            "--input",
            input.to_str().unwrap(),
            "--k",
            "2",
            "--epsilon",
            "0.1",
            "--out-assignment",
            assignment.to_str().unwrap(),
            "--out-metrics",
            metrics.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(&assignment).unwrap();
    let mut labels = std::collections::BTreeSet::new();
    for line in csv.lines().skip(1) {
        labels.insert(line.split(',').nth(1).unwrap().to_string());
    }
    assert_eq!(labels.len(), 2, "balance must force a split: {csv}");
    let metrics_text = std::fs::read_to_string(&metrics).unwrap();
    assert!(metrics_text.contains("\"feasible\": true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn non_power_of_two_k_is_usage_error() {
    let dir = workdir("badk");
    let input = minimal_netlist(&dir);
    let status = Command::new(exe())
        .args(["partition", "--input", input.to_str().unwrap(), "--k", "3"])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_flag_is_usage_error() {
    let status = Command::new(exe())
        .args(["partition", "--definitely-not-a-flag"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_netlist_is_parse_error() {
    let dir = workdir("parse");
    let input = dir.join("broken.json");
    std::fs::write(&input, "{ nope").unwrap();
    let status = Command::new(exe())
        .args(["partition", "--input", input.to_str().unwrap()])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn coincident_cells_report_infeasible_balance() {
    let dir = workdir("infeasible");
    let input = dir.join("stacked.json");
    // Cells a and b share a grid, so no boundary separates them; with four
    // pins total and epsilon 0.05 every reachable split misses the balance
    // band. The long a-c net keeps the grid non-degenerate.
    std::fs::write(
        &input,
        r#"{
            "layout": {"w": 64.0, "h": 64.0},
            "cells": [
                {"id": "a", "x": 10.2, "y": 10.2},
                {"id": "b", "x": 10.3, "y": 10.3},
                {"id": "c", "x": 60.0, "y": 60.0}
            ],
            "nets": [
                {"id": "n0", "w": 1.0, "cells": ["a", "b"]},
                {"id": "n1", "w": 1.0, "cells": ["a", "c"]}
            ]
        }"#,
    )
    .unwrap();
    let status = Command::new(exe())
        .args([
            "partition",
            "--input",
            input.to_str().unwrap(),
            "--k",
            "2",
            "--epsilon",
            "0.05",
        ])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_round_trip_reproduces_metrics() {
    // Dense instance: every grid is occupied, so the eval-side grid-label
    // reconstruction matches the partitioner's labels exactly.
    let dir = workdir("roundtrip");
    let input = dir.join("dense.json");
    write_netlist(&uniform_instance(42, 2000, 900, 32.0, 32.0), &input).unwrap();
    let assignment = dir.join("assignment.csv");
    let metrics = dir.join("metrics.json");
    let status = Command::new(exe())
        .args([
            "partition",
            "--input",
            input.to_str().unwrap(),
            "--k",
            "4",
            "--nx",
            "16",
            "--ny",
            "16",
            "--seed",
            "5",
            "--out-assignment",
            assignment.to_str().unwrap(),
            "--out-metrics",
            metrics.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let eval_metrics = dir.join("metrics_eval.json");
    let status = Command::new(exe())
        .args([
            "eval",
            "--netlist",
            input.to_str().unwrap(),
            "--assignment",
            assignment.to_str().unwrap(),
            "--nx",
            "16",
            "--ny",
            "16",
            "--out-metrics",
            eval_metrics.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let a = std::fs::read(&metrics).unwrap();
    let b = std::fs::read(&eval_metrics).unwrap();
    assert_eq!(a, b, "re-scored metrics differ from the partitioner's");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_rejects_incomplete_assignment() {
    let dir = workdir("coverage");
    let input = minimal_netlist(&dir);
    let assignment = dir.join("partial.csv");
    std::fs::write(&assignment, "cell_id,partition\na,0\n").unwrap();
    let status = Command::new(exe())
        .args([
            "eval",
            "--netlist",
            input.to_str().unwrap(),
            "--assignment",
            assignment.to_str().unwrap(),
        ])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_reports_many_fragments_for_scattered_assignment() {
    use rand::{Rng, SeedableRng};
    let dir = workdir("scattered");
    let input = dir.join("grid10.json");
    let nl = uniform_instance(9, 400, 150, 10.0, 10.0);
    write_netlist(&nl, &input).unwrap();
    let assignment = dir.join("random.csv");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut csv = String::from("cell_id,partition\n");
    for cell in &nl.cells {
        csv.push_str(&format!("{},{}\n", cell.id, rng.gen_range(0..2)));
    }
    std::fs::write(&assignment, csv).unwrap();
    let metrics = dir.join("metrics.json");
    let status = Command::new(exe())
        .args([
            "eval",
            "--netlist",
            input.to_str().unwrap(),
            "--assignment",
            assignment.to_str().unwrap(),
            "--nx",
            "10",
            "--ny",
            "10",
            "--out-metrics",
            metrics.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    let fragments = doc["fragments"].as_u64().unwrap();
    assert!(
        fragments > 8,
        "random labels should fragment badly, got {fragments}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn render_produces_svg_with_grid_rects() {
    let dir = workdir("render");
    let input = dir.join("nl.json");
    write_netlist(&uniform_instance(12, 300, 120, 16.0, 16.0), &input).unwrap();
    let assignment = dir.join("a.csv");
    let status = Command::new(exe())
        .args([
            "partition",
            "--input",
            input.to_str().unwrap(),
            "--nx",
            "8",
            "--ny",
            "8",
            "--out-assignment",
            assignment.to_str().unwrap(),
            "--out-metrics",
            dir.join("m.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let svg = dir.join("layout.svg");
    let status = Command::new(exe())
        .args([
            "render",
            "--netlist",
            input.to_str().unwrap(),
            "--assignment",
            assignment.to_str().unwrap(),
            "--nx",
            "8",
            "--ny",
            "8",
            "--out",
            svg.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<rect").count(), 64);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn trace_and_grid_dump_artifacts() {
    let dir = workdir("artifacts");
    let input = dir.join("nl.json");
    write_netlist(&uniform_instance(13, 300, 120, 16.0, 16.0), &input).unwrap();
    let trace = dir.join("trace.csv");
    let dump = dir.join("grid.csv");
    let meshes = dir.join("meshes");
    std::fs::create_dir_all(&meshes).unwrap();
    let status = Command::new(exe())
        .args([
            "partition",
            "--input",
            input.to_str().unwrap(),
            "--k",
            "4",
            "--nx",
            "8",
            "--ny",
            "8",
            "--t-limit",
            "0.1",
            "--out-assignment",
            dir.join("a.csv").to_str().unwrap(),
            "--out-metrics",
            dir.join("m.json").to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
            "--dump-grid",
            dump.to_str().unwrap(),
            "--mesh-svg-dir",
            meshes.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("corner,iter,temperature,cost,best_cost\n"));
    // 4 corners, each with ceil(log_gamma(0.1)) = 460 iterations.
    assert_eq!(trace_text.lines().count(), 1 + 4 * 460);
    let dump_text = std::fs::read_to_string(&dump).unwrap();
    assert!(dump_text.starts_with("kind,i,j,weight\n"));
    assert_eq!(dump_text.matches("\nnode,").count() + 1, 64 + 1);
    // The k=4 root split embeds both sides: two before/after mesh pairs.
    let mesh_files = std::fs::read_dir(&meshes).unwrap().count();
    assert_eq!(mesh_files, 4, "expected 4 mesh SVGs");
    std::fs::remove_dir_all(&dir).ok();
}
