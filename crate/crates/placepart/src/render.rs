//! Static SVG visualization of grids, partition maps, boundaries, Steiner
//! trees and embedding meshes. Output is byte-stable for identical inputs:
//! coordinates are written with fixed precision and elements in a fixed
//! order.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::boundary::Boundary;
use crate::geom::Point;
use crate::gridgraph::GridGraph;
use crate::metrics::PartitionResult;
use crate::netlist::PlacedNetlist;
use crate::steiner::RectTree;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Which layers to draw and how.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub grid: bool,
    pub labels: bool,
    pub trees: bool,
    pub boundary: bool,
    pub mesh: bool,
    /// Partition label -> fill color; cycles when k exceeds the palette.
    pub palette: Vec<String>,
    /// Pixels per layout length unit.
    pub scale: f64,
    /// Boundary polyline in layout coordinates, drawn when `boundary` is on.
    pub boundary_polyline: Option<Vec<Point>>,
    /// Mesh edges in layout coordinates, drawn when `mesh` is on.
    pub mesh_edges: Option<Vec<(Point, Point)>>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            grid: true,
            labels: true,
            trees: false,
            boundary: false,
            mesh: false,
            palette: default_palette(),
            scale: 8.0,
            boundary_polyline: None,
            mesh_edges: None,
        }
    }
}

pub fn default_palette() -> Vec<String> {
    [
        "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#edc948", "#76b7b2", "#ff9da7",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn fmt_f(v: f64) -> String {
    format!("{v:.4}")
}

/// Render the partitioned grid as SVG markup.
pub fn render_svg_string(
    netlist: &PlacedNetlist,
    g: &GridGraph,
    result: &PartitionResult,
    spec: &RenderSpec,
    trees: Option<&[RectTree]>,
) -> String {
    let s = spec.scale;
    let width = netlist.layout_width * s;
    let height = netlist.layout_height * s;
    // SVG y grows downward; flip so layout y grows upward.
    let fy = |y: f64| (netlist.layout_height - y) * s;
    let fx = |x: f64| x * s;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_f(width),
        fmt_f(height),
        fmt_f(width),
        fmt_f(height)
    )
    .unwrap();

    if spec.grid {
        let gw = netlist.layout_width / g.nx as f64;
        let gh = netlist.layout_height / g.ny as f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let idx = g.index(i, j);
                let fill = if spec.labels && idx < result.grid_label.len() {
                    let label = result.grid_label[idx];
                    spec.palette[label % spec.palette.len()].clone()
                } else {
                    "#eeeeee".to_string()
                };
                writeln!(
                    out,
                    r##"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#ffffff" stroke-width="0.5"/>"##,
                    fmt_f(fx(i as f64 * gw)),
                    fmt_f(fy((j + 1) as f64 * gh)),
                    fmt_f(gw * s),
                    fmt_f(gh * s),
                    fill
                )
                .unwrap();
            }
        }
    }

    if spec.trees {
        if let Some(trees) = trees {
            for tree in trees {
                for seg in &tree.segments {
                    writeln!(
                        out,
                        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#333333" stroke-width="0.6"/>"##,
                        fmt_f(fx(seg.x1)),
                        fmt_f(fy(seg.y1)),
                        fmt_f(fx(seg.x2)),
                        fmt_f(fy(seg.y2))
                    )
                    .unwrap();
                }
            }
        }
    }

    if spec.mesh {
        if let Some(edges) = &spec.mesh_edges {
            for (a, b) in edges {
                writeln!(
                    out,
                    r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888" stroke-width="0.4"/>"##,
                    fmt_f(fx(a.x)),
                    fmt_f(fy(a.y)),
                    fmt_f(fx(b.x)),
                    fmt_f(fy(b.y))
                )
                .unwrap();
            }
        }
    }

    if spec.boundary {
        if let Some(poly) = &spec.boundary_polyline {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| format!("{},{}", fmt_f(fx(p.x)), fmt_f(fy(p.y))))
                .collect();
            writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="1.2"/>"##,
                pts.join(" ")
            )
            .unwrap();
        }
    }

    writeln!(out, "</svg>").unwrap();
    out
}

/// Render to a file.
pub fn render_svg(
    netlist: &PlacedNetlist,
    g: &GridGraph,
    result: &PartitionResult,
    spec: &RenderSpec,
    trees: Option<&[RectTree]>,
    path: impl AsRef<Path>,
) -> Result<(), RenderError> {
    let svg = render_svg_string(netlist, g, result, spec, trees);
    let path = path.as_ref();
    std::fs::write(path, svg).map_err(|source| RenderError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Convenience: a `RenderSpec` with the boundary polyline of an annealer
/// result attached.
pub fn spec_with_boundary(boundary: &Boundary) -> RenderSpec {
    RenderSpec {
        boundary: true,
        boundary_polyline: Some(boundary.polyline_layout()),
        ..RenderSpec::default()
    }
}

/// Minimal mesh dump: vertex positions plus edges as SVG lines, used by the
/// embedding debug flag and examples.
pub fn mesh_svg(vertices: &[Point], edges: &[(usize, usize)], scale: f64) -> String {
    let max_x = vertices.iter().map(|p| p.x).fold(1.0f64, f64::max);
    let max_y = vertices.iter().map(|p| p.y).fold(1.0f64, f64::max);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_f(max_x * scale),
        fmt_f(max_y * scale),
        fmt_f(max_x * scale),
        fmt_f(max_y * scale)
    )
    .unwrap();
    let fy = |y: f64| (max_y - y) * scale;
    for &(a, b) in edges {
        writeln!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#555555" stroke-width="0.5"/>"##,
            fmt_f(vertices[a].x * scale),
            fmt_f(fy(vertices[a].y)),
            fmt_f(vertices[b].x * scale),
            fmt_f(fy(vertices[b].y))
        )
        .unwrap();
    }
    for p in vertices {
        writeln!(
            out,
            r##"<circle cx="{}" cy="{}" r="1.5" fill="#d62728"/>"##,
            fmt_f(p.x * scale),
            fmt_f(fy(p.y))
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist_str;

    fn tiny() -> (PlacedNetlist, GridGraph, PartitionResult) {
        let nl = parse_netlist_str(
            r#"{
                "layout": {"w": 2.0, "h": 2.0},
                "cells": [
                    {"id": "a", "x": 0.5, "y": 0.5},
                    {"id": "b", "x": 1.5, "y": 1.5}
                ],
                "nets": [{"id": "n", "w": 1.0, "cells": ["a", "b"]}]
            }"#,
        )
        .unwrap();
        let trees = crate::steiner::route_all(&nl);
        let g = crate::gridgraph::build_grid_graph(&nl, 2, 2, &trees).unwrap();
        let result = PartitionResult {
            k: 2,
            epsilon: 0.1,
            cell_label: vec![0, 1],
            grid_label: vec![0, 0, 1, 1],
            cut_size: 1.0,
            fragments: 2,
            per_partition_weight: vec![1.0, 1.0],
            critical_crossings: 0,
            feasible: true,
        };
        (nl, g, result)
    }

    #[test]
    fn rect_count_and_two_colors() {
        let (nl, g, result) = tiny();
        let svg = render_svg_string(&nl, &g, &result, &RenderSpec::default(), None);
        assert_eq!(svg.matches("<rect").count(), 4);
        let palette = default_palette();
        assert!(svg.contains(&palette[0]));
        assert!(svg.contains(&palette[1]));
    }

    #[test]
    fn labels_layer_off_uses_uniform_fill() {
        let (nl, g, result) = tiny();
        let spec = RenderSpec {
            labels: false,
            ..RenderSpec::default()
        };
        let svg = render_svg_string(&nl, &g, &result, &spec, None);
        assert_eq!(svg.matches("#eeeeee").count(), 4);
    }

    #[test]
    fn output_is_byte_stable() {
        let (nl, g, result) = tiny();
        let a = render_svg_string(&nl, &g, &result, &RenderSpec::default(), None);
        let b = render_svg_string(&nl, &g, &result, &RenderSpec::default(), None);
        assert_eq!(a, b);
    }

    #[test]
    fn output_is_balanced_xml() {
        let (nl, g, result) = tiny();
        let svg = render_svg_string(&nl, &g, &result, &RenderSpec::default(), None);
        // Every tag is either self-closing or matched; check nesting depth.
        let mut depth = 0i64;
        for token in svg.split('<').skip(1) {
            if token.starts_with('/') {
                depth -= 1;
            } else if !token.trim_end().ends_with("/>") {
                depth += 1;
            }
            assert!(depth >= 0);
        }
        assert_eq!(depth, 0);
    }
}
