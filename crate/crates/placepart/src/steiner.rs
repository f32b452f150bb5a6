//! Rectilinear Steiner-tree estimation for nets.
//!
//! The production path (`steiner_tree`) builds a Manhattan-distance minimum
//! spanning tree over the pins and realizes each MST edge as an L-shape,
//! then merges collinear overlapping segments. This stays within 1.5x of the
//! rectilinear Steiner minimal tree. `steiner_oracle` computes the exact
//! RSMT length by exhaustive search over Hanan-grid Steiner points and is
//! intended for small nets only.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geom::Point;
use crate::netlist::PlacedNetlist;

#[derive(Debug, Error)]
pub enum SteinerError {
    #[error("need at least 2 distinct pins, got {0}")]
    TooFewPins(usize),
    #[error("oracle limited to 7 distinct pins, got {0}")]
    TooManyPins(usize),
}

/// An axis-aligned segment with canonical endpoint order
/// (x1 <= x2, y1 <= y2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Segment {
    fn horizontal(y: f64, xa: f64, xb: f64) -> Self {
        Segment {
            x1: xa.min(xb),
            y1: y,
            x2: xa.max(xb),
            y2: y,
        }
    }

    fn vertical(x: f64, ya: f64, yb: f64) -> Self {
        Segment {
            x1: x,
            y1: ya.min(yb),
            x2: x,
            y2: ya.max(yb),
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.y1 == self.y2
    }

    pub fn len(&self) -> f64 {
        (self.x2 - self.x1) + (self.y2 - self.y1)
    }
}

/// A pre-routed rectilinear tree for one net. Segments are merged so that
/// no two collinear segments overlap; total_length therefore measures the
/// drawn wire, not the sum of raw MST edge lengths.
#[derive(Debug, Clone)]
pub struct RectTree {
    pub net: usize,
    pub segments: Vec<Segment>,
}

impl RectTree {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::len).sum()
    }

    /// Whether the segment union forms one connected component touching
    /// every pin. Used by tests and sanity checks.
    pub fn is_connected_spanning(&self, pins: &[Point]) -> bool {
        let pins: Vec<Point> = dedup_pins(pins);
        if pins.len() == 1 {
            return self.segments.is_empty()
                || self.segments.iter().all(|s| touches(s, pins[0]));
        }
        if self.segments.is_empty() {
            return false;
        }
        // Union-find over segments; two segments join when they intersect.
        let n = self.segments.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for i in 0..n {
            for j in i + 1..n {
                if segments_touch(&self.segments[i], &self.segments[j]) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|i| find(&mut parent, i) != root) {
            return false;
        }
        pins.iter()
            .all(|&p| self.segments.iter().any(|s| touches(s, p)))
    }
}

fn touches(s: &Segment, p: Point) -> bool {
    if s.is_horizontal() {
        p.y == s.y1 && p.x >= s.x1 && p.x <= s.x2
    } else {
        p.x == s.x1 && p.y >= s.y1 && p.y <= s.y2
    }
}

fn segments_touch(a: &Segment, b: &Segment) -> bool {
    match (a.is_horizontal(), b.is_horizontal()) {
        (true, true) => a.y1 == b.y1 && a.x1 <= b.x2 && b.x1 <= a.x2,
        (false, false) => a.x1 == b.x1 && a.y1 <= b.y2 && b.y1 <= a.y2,
        (true, false) => b.x1 >= a.x1 && b.x1 <= a.x2 && a.y1 >= b.y1 && a.y1 <= b.y2,
        (false, true) => a.x1 >= b.x1 && a.x1 <= b.x2 && b.y1 >= a.y1 && b.y1 <= a.y2,
    }
}

fn dedup_pins(pins: &[Point]) -> Vec<Point> {
    let mut seen: Vec<Point> = Vec::with_capacity(pins.len());
    for &p in pins {
        if !seen.iter().any(|&q| q == p) {
            seen.push(p);
        }
    }
    seen
}

/// Canonical pin ordering: sort by (x, y) so the tree is independent of
/// input order.
fn canonical_pins(pins: &[Point]) -> Vec<Point> {
    let mut pins = dedup_pins(pins);
    pins.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    pins
}

/// Prim MST over Manhattan distance; ties broken by lowest candidate index.
fn manhattan_mst(points: &[Point]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best_dist = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for i in 1..n {
        best_dist[i] = points[0].manhattan(points[i]);
    }
    for _ in 1..n {
        let mut pick = usize::MAX;
        let mut pick_dist = f64::INFINITY;
        for i in 0..n {
            if !in_tree[i] && best_dist[i] < pick_dist {
                pick = i;
                pick_dist = best_dist[i];
            }
        }
        in_tree[pick] = true;
        edges.push((best_from[pick], pick));
        for i in 0..n {
            if !in_tree[i] {
                let d = points[pick].manhattan(points[i]);
                if d < best_dist[i] {
                    best_dist[i] = d;
                    best_from[i] = pick;
                }
            }
        }
    }
    edges
}

/// Realize an MST edge as an L-shape. The corner is chosen lower-left-first:
/// smaller y wins, then smaller x.
fn l_shape(a: Point, b: Point, out: &mut Vec<Segment>) {
    if a.x == b.x {
        if a.y != b.y {
            out.push(Segment::vertical(a.x, a.y, b.y));
        }
        return;
    }
    if a.y == b.y {
        out.push(Segment::horizontal(a.y, a.x, b.x));
        return;
    }
    let c1 = Point::new(a.x, b.y);
    let c2 = Point::new(b.x, a.y);
    let corner = if (c1.y, c1.x) < (c2.y, c2.x) { c1 } else { c2 };
    // corner shares x with one endpoint and y with the other
    if corner.x == a.x {
        out.push(Segment::vertical(a.x, a.y, corner.y));
        out.push(Segment::horizontal(corner.y, corner.x, b.x));
    } else {
        out.push(Segment::horizontal(a.y, a.x, corner.x));
        out.push(Segment::vertical(corner.x, corner.y, b.y));
    }
}

/// Merge collinear overlapping or touching segments so the union is kept
/// without double counting.
fn merge_segments(mut segs: Vec<Segment>) -> Vec<Segment> {
    let mut out = Vec::with_capacity(segs.len());
    // horizontals grouped by y, verticals by x
    segs.sort_by(|a, b| {
        (a.is_horizontal() as u8)
            .cmp(&(b.is_horizontal() as u8))
            .then(a.y1.partial_cmp(&b.y1).unwrap())
            .then(a.x1.partial_cmp(&b.x1).unwrap())
            .then(a.x2.partial_cmp(&b.x2).unwrap())
            .then(a.y2.partial_cmp(&b.y2).unwrap())
    });
    let mut i = 0;
    while i < segs.len() {
        let mut cur = segs[i];
        let mut j = i + 1;
        while j < segs.len() {
            let s = segs[j];
            let same_line = if cur.is_horizontal() {
                s.is_horizontal() && s.y1 == cur.y1 && s.x1 <= cur.x2
            } else {
                !s.is_horizontal() && s.x1 == cur.x1 && s.y1 <= cur.y2
            };
            if !same_line {
                break;
            }
            cur.x2 = cur.x2.max(s.x2);
            cur.y2 = cur.y2.max(s.y2);
            j += 1;
        }
        out.push(cur);
        i = j;
    }
    out
}

/// Build a rectilinear tree spanning the given pins.
///
/// Three-pin nets route through the median Steiner point, which is exact;
/// larger nets use the Manhattan MST with each edge realized as an L-shape.
pub fn steiner_tree(net: usize, pins: &[Point]) -> Result<RectTree, SteinerError> {
    let pins = canonical_pins(pins);
    if pins.len() < 2 {
        return Err(SteinerError::TooFewPins(pins.len()));
    }
    let mut segs = Vec::with_capacity(pins.len() * 2);
    if pins.len() == 3 {
        let mut xs = [pins[0].x, pins[1].x, pins[2].x];
        let mut ys = [pins[0].y, pins[1].y, pins[2].y];
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = Point::new(xs[1], ys[1]);
        for &p in &pins {
            if p != s {
                l_shape(p, s, &mut segs);
            }
        }
    } else {
        for (a, b) in manhattan_mst(&pins) {
            l_shape(pins[a], pins[b], &mut segs);
        }
    }
    Ok(RectTree {
        net,
        segments: merge_segments(segs),
    })
}

/// Route every net of a netlist. Pure per net; evaluated in parallel by the
/// caller when a rayon pool is installed. Nets whose pins collapse onto one
/// point (possible for embedded sub-instances) get a zero-extent tree.
pub fn route_all(netlist: &PlacedNetlist) -> Vec<RectTree> {
    use rayon::prelude::*;
    netlist
        .nets
        .par_iter()
        .enumerate()
        .map(|(i, net)| {
            let pins: Vec<Point> = net
                .pins
                .iter()
                .map(|&c| Point::new(netlist.cells[c].x, netlist.cells[c].y))
                .collect();
            match steiner_tree(i, &pins) {
                Ok(tree) => tree,
                Err(SteinerError::TooFewPins(_)) => RectTree {
                    net: i,
                    segments: Vec::new(),
                },
                Err(e) => unreachable!("routing failed: {e}"),
            }
        })
        .collect()
}

/// Exact rectilinear Steiner minimal tree length via exhaustive search over
/// Hanan-grid Steiner point subsets (at most `n - 2` extra points), taking
/// the minimum Manhattan MST over each augmented point set.
pub fn steiner_oracle(pins: &[Point]) -> Result<f64, SteinerError> {
    let pins = canonical_pins(pins);
    let n = pins.len();
    if n < 2 {
        return Err(SteinerError::TooFewPins(n));
    }
    if n > 7 {
        return Err(SteinerError::TooManyPins(n));
    }

    let xs: BTreeSet<u64> = pins.iter().map(|p| p.x.to_bits()).collect();
    let ys: BTreeSet<u64> = pins.iter().map(|p| p.y.to_bits()).collect();
    let mut candidates = Vec::new();
    for &xb in &xs {
        for &yb in &ys {
            let p = Point::new(f64::from_bits(xb), f64::from_bits(yb));
            if !pins.contains(&p) {
                candidates.push(p);
            }
        }
    }

    let mut best = mst_length(&pins);
    let max_extra = n.saturating_sub(2).min(candidates.len());
    let mut chosen: Vec<usize> = Vec::new();
    let mut points = pins.clone();

    fn recurse(
        candidates: &[Point],
        start: usize,
        remaining: usize,
        chosen: &mut Vec<usize>,
        points: &mut Vec<Point>,
        best: &mut f64,
    ) {
        if !chosen.is_empty() {
            let len = mst_length(points);
            if len < *best {
                *best = len;
            }
        }
        if remaining == 0 {
            return;
        }
        for i in start..candidates.len() {
            chosen.push(i);
            points.push(candidates[i]);
            recurse(candidates, i + 1, remaining - 1, chosen, points, best);
            points.pop();
            chosen.pop();
        }
    }
    recurse(
        &candidates,
        0,
        max_extra,
        &mut chosen,
        &mut points,
        &mut best,
    );
    Ok(best)
}

fn mst_length(points: &[Point]) -> f64 {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for i in 1..n {
        best[i] = points[0].manhattan(points[i]);
    }
    let mut total = 0.0;
    for _ in 1..n {
        let mut pick = usize::MAX;
        let mut dist = f64::INFINITY;
        for i in 0..n {
            if !in_tree[i] && best[i] < dist {
                pick = i;
                dist = best[i];
            }
        }
        in_tree[pick] = true;
        total += dist;
        for i in 0..n {
            if !in_tree[i] {
                let d = points[pick].manhattan(points[i]);
                if d < best[i] {
                    best[i] = d;
                }
            }
        }
    }
    total
}
