//! Region embedding: triangulate a set of grid centers with Delaunay,
//! detect the boundary, pin it to a target rectangle perimeter, and solve a
//! discrete Laplace equation (uniform weights) for the interior vertices.
//! With the boundary on a convex polygon and uniform weights this is a
//! Tutte embedding, so embedded triangles keep positive orientation.
//!
//! Boundary-to-perimeter rule: the boundary loop is mapped by normalized
//! arc length, with the loop vertex nearest each bounding-box corner
//! anchored to the corresponding rectangle corner. If the four anchors are
//! not distinct and in cyclic order (tiny regions), the whole loop falls
//! back to proportional arc-length placement around the perimeter from a
//! single anchor.

use thiserror::Error;

use crate::geom::{orient, Point};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("need at least 3 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("all points are collinear")]
    CollinearInput,
    #[error("mesh is disconnected")]
    DisconnectedMesh,
    #[error("boundary is not a single closed loop")]
    BadBoundary,
    #[error("harmonic solve did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("empty mesh")]
    EmptyMesh,
}

/// Triangle mesh over a point set with an extracted boundary loop.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertices in cyclic (counter-clockwise) order, starting at
    /// the lowest-index boundary vertex.
    pub boundary_loop: Vec<usize>,
}

impl TriMesh {
    /// Vertex adjacency sets from triangle edges, sorted per vertex.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                if !nbrs[a].contains(&b) {
                    nbrs[a].push(b);
                }
                if !nbrs[b].contains(&a) {
                    nbrs[b].push(a);
                }
            }
        }
        for n in &mut nbrs {
            n.sort_unstable();
        }
        nbrs
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let nbrs = self.neighbors();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &nbrs[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

// ---------------------------------------------------------------------------
// Delaunay triangulation (incremental Bowyer-Watson with a super-triangle)
// ---------------------------------------------------------------------------

const NO_NEIGHBOR: usize = usize::MAX;

struct Triangulator {
    points: Vec<Point>, // normalized coordinates; last 3 are super vertices
    tri_verts: Vec<[usize; 3]>,
    tri_nbrs: Vec<[usize; 3]>, // nbr[e] shares edge (v[e], v[e+1])
    alive: Vec<bool>,
    last_alive: usize,
    eps: f64,
}

impl Triangulator {
    fn new(points: Vec<Point>) -> Self {
        let n = points.len();
        // Super-triangle far outside the normalized unit square; far enough
        // that no real circumcircle reaches it.
        let m = 1e3;
        let mut pts = points;
        pts.push(Point::new(-m, -m));
        pts.push(Point::new(2.0 * m, -m));
        pts.push(Point::new(0.5, 2.0 * m));
        Triangulator {
            points: pts,
            tri_verts: vec![[n, n + 1, n + 2]],
            tri_nbrs: vec![[NO_NEIGHBOR; 3]],
            alive: vec![true],
            last_alive: 0,
            eps: 1e-12,
        }
    }

    fn orient(&self, a: usize, b: usize, c: usize) -> f64 {
        orient(self.points[a], self.points[b], self.points[c])
    }

    /// Positive when `d` lies strictly inside the circumcircle of the
    /// counter-clockwise triangle (a, b, c). Near-cocircular points count as
    /// outside, which keeps the existing diagonal on ties.
    fn in_circle(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        let pa = self.points[a];
        let pb = self.points[b];
        let pc = self.points[c];
        let pd = self.points[d];
        let adx = pa.x - pd.x;
        let ady = pa.y - pd.y;
        let bdx = pb.x - pd.x;
        let bdy = pb.y - pd.y;
        let cdx = pc.x - pd.x;
        let cdy = pc.y - pd.y;
        let ad2 = adx * adx + ady * ady;
        let bd2 = bdx * bdx + bdy * bdy;
        let cd2 = cdx * cdx + cdy * cdy;
        let det = adx * (bdy * cd2 - bd2 * cdy) - ady * (bdx * cd2 - bd2 * cdx)
            + ad2 * (bdx * cdy - bdy * cdx);
        let scale = ad2.max(bd2).max(cd2).max(1.0);
        det > self.eps * scale
    }

    /// Triangle containing p (boundary counts as inside), by walking.
    fn locate(&self, p: usize) -> usize {
        let mut t = self.last_alive;
        let pt = self.points[p];
        for _ in 0..4 * self.tri_verts.len() + 16 {
            let [a, b, c] = self.tri_verts[t];
            let mut worst = NO_NEIGHBOR;
            let mut worst_val = -self.eps;
            for (e, (u, v)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
                let o = orient(self.points[u], self.points[v], pt);
                if o < worst_val {
                    worst_val = o;
                    worst = e;
                }
            }
            match worst {
                NO_NEIGHBOR => return t,
                e => {
                    let next = self.tri_nbrs[t][e];
                    if next == NO_NEIGHBOR {
                        break;
                    }
                    t = next;
                }
            }
        }
        // Fallback: deterministic scan.
        for (t, alive) in self.alive.iter().enumerate() {
            if !alive {
                continue;
            }
            let [a, b, c] = self.tri_verts[t];
            if self.orient(a, b, p) >= -self.eps
                && self.orient(b, c, p) >= -self.eps
                && self.orient(c, a, p) >= -self.eps
            {
                return t;
            }
        }
        panic!("point location failed: point outside super-triangle");
    }

    fn insert(&mut self, p: usize) {
        let seed = self.locate(p);
        // Grow the cavity of triangles whose circumcircle strictly contains p.
        let mut cavity = vec![seed];
        let mut in_cavity = std::collections::HashMap::new();
        in_cavity.insert(seed, true);
        let mut queue = vec![seed];
        while let Some(t) = queue.pop() {
            for e in 0..3 {
                let nb = self.tri_nbrs[t][e];
                if nb == NO_NEIGHBOR || in_cavity.contains_key(&nb) {
                    continue;
                }
                let [a, b, c] = self.tri_verts[nb];
                if self.in_circle(a, b, c, p) {
                    in_cavity.insert(nb, true);
                    cavity.push(nb);
                    queue.push(nb);
                } else {
                    in_cavity.insert(nb, false);
                    in_cavity.remove(&nb);
                }
            }
        }
        // Boundary edges of the cavity, with their outside neighbor.
        let mut border: Vec<(usize, usize, usize)> = Vec::new(); // (u, v, outside)
        for &t in &cavity {
            for e in 0..3 {
                let nb = self.tri_nbrs[t][e];
                let inside = nb != NO_NEIGHBOR && in_cavity.contains_key(&nb);
                if !inside {
                    let [a, b, c] = self.tri_verts[t];
                    let (u, v) = match e {
                        0 => (a, b),
                        1 => (b, c),
                        _ => (c, a),
                    };
                    border.push((u, v, nb));
                }
            }
        }
        // Order border edges into a loop around the cavity.
        let mut loop_edges = Vec::with_capacity(border.len());
        let mut cur = border[0];
        loop {
            loop_edges.push(cur);
            if loop_edges.len() == border.len() {
                break;
            }
            let next = border
                .iter()
                .find(|&&(u, _, _)| u == cur.1)
                .copied()
                .expect("cavity border forms a loop");
            cur = next;
        }
        // Retire cavity triangles, fan new ones from p.
        for &t in &cavity {
            self.alive[t] = false;
        }
        let base = self.tri_verts.len();
        let k = loop_edges.len();
        for (i, &(u, v, _)) in loop_edges.iter().enumerate() {
            self.tri_verts.push([p, u, v]);
            let prev = base + (i + k - 1) % k;
            let next = base + (i + 1) % k;
            self.tri_nbrs.push([prev, loop_edges[i].2, next]);
            self.alive.push(true);
        }
        // Fix outside neighbors to point at the new triangles.
        for (i, &(u, v, outside)) in loop_edges.iter().enumerate() {
            if outside == NO_NEIGHBOR {
                continue;
            }
            let t_new = base + i;
            for e in 0..3 {
                let [a, b, c] = self.tri_verts[outside];
                let (x, y) = match e {
                    0 => (a, b),
                    1 => (b, c),
                    _ => (c, a),
                };
                if x == v && y == u {
                    self.tri_nbrs[outside][e] = t_new;
                }
            }
        }
        self.last_alive = base;
    }
}

/// Delaunay triangulation of distinct points (duplicates are removed).
/// Triangles come out counter-clockwise; boundary edges are those belonging
/// to exactly one triangle.
pub fn delaunay(points: &[Point]) -> Result<TriMesh, EmbedError> {
    let mut distinct: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if !distinct.iter().any(|&q| q == p) {
            distinct.push(p);
        }
    }
    let n = distinct.len();
    if n < 3 {
        return Err(EmbedError::TooFewPoints(n));
    }

    // Normalize into the unit square for predictable predicate scales.
    let min_x = distinct.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = distinct.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_x = distinct.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let max_y = distinct.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let span = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
    let normalized: Vec<Point> = distinct
        .iter()
        .map(|p| Point::new((p.x - min_x) / span, (p.y - min_y) / span))
        .collect();

    let mut tr = Triangulator::new(normalized);
    for p in 0..n {
        tr.insert(p);
    }

    let mut triangles = Vec::new();
    for (t, &alive) in tr.alive.iter().enumerate() {
        if !alive {
            continue;
        }
        let [a, b, c] = tr.tri_verts[t];
        if a < n && b < n && c < n {
            triangles.push([a, b, c]);
        }
    }
    if triangles.is_empty() {
        return Err(EmbedError::CollinearInput);
    }

    let boundary_loop = extract_boundary_loop(&distinct, &triangles)?;
    Ok(TriMesh {
        vertices: distinct,
        triangles,
        boundary_loop,
    })
}

/// Boundary edges appear in exactly one triangle; walk them into one cycle.
fn extract_boundary_loop(
    vertices: &[Point],
    triangles: &[[usize; 3]],
) -> Result<Vec<usize>, EmbedError> {
    use std::collections::BTreeMap;
    let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let key = (a.min(b), a.max(b));
            *edge_count.entry(key).or_insert(0) += 1;
        }
    }
    let mut nbrs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&(a, b), &c) in &edge_count {
        if c == 1 {
            nbrs.entry(a).or_default().push(b);
            nbrs.entry(b).or_default().push(a);
        }
    }
    if nbrs.is_empty() {
        return Err(EmbedError::BadBoundary);
    }
    if nbrs.values().any(|v| v.len() != 2) {
        return Err(EmbedError::BadBoundary);
    }
    let start = *nbrs.keys().next().unwrap();
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = nbrs[&start][0].min(nbrs[&start][1]);
    while cur != start {
        cycle.push(cur);
        let [a, b] = [nbrs[&cur][0], nbrs[&cur][1]];
        let next = if a == prev { b } else { a };
        prev = cur;
        cur = next;
    }
    if cycle.len() != nbrs.len() {
        return Err(EmbedError::BadBoundary);
    }
    // Normalize to counter-clockwise by the shoelace sign.
    if shoelace(vertices, &cycle) < 0.0 {
        cycle[1..].reverse();
    }
    Ok(cycle)
}

fn shoelace(vertices: &[Point], cycle: &[usize]) -> f64 {
    let k = cycle.len();
    let mut acc = 0.0;
    for i in 0..k {
        let a = vertices[cycle[i]];
        let b = vertices[cycle[(i + 1) % k]];
        acc += a.cross(b);
    }
    acc
}

// ---------------------------------------------------------------------------
// Harmonic embedding
// ---------------------------------------------------------------------------

/// Positions of mesh vertices inside the target rectangle `[0,w] x [0,h]`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub positions: Vec<Point>,
    pub target_w: f64,
    pub target_h: f64,
}

impl Embedding {
    pub fn target_diag(&self) -> f64 {
        (self.target_w * self.target_w + self.target_h * self.target_h).sqrt()
    }
}

/// Walk the rectangle perimeter counter-clockwise from (0,0); `t` in
/// perimeter length units.
fn perimeter_point(t: f64, w: f64, h: f64) -> Point {
    let total = 2.0 * (w + h);
    let mut t = t.rem_euclid(total);
    if t < w {
        return Point::new(t, 0.0);
    }
    t -= w;
    if t < h {
        return Point::new(w, t);
    }
    t -= h;
    if t < w {
        return Point::new(w - t, h);
    }
    t -= w;
    Point::new(0.0, h - t)
}

/// Map boundary-loop vertices onto the rectangle perimeter.
fn boundary_positions(mesh: &TriMesh, w: f64, h: f64) -> Vec<(usize, Point)> {
    let loop_ = &mesh.boundary_loop;
    let k = loop_.len();
    let mut arc = vec![0.0; k + 1];
    for i in 0..k {
        let a = mesh.vertices[loop_[i]];
        let b = mesh.vertices[loop_[(i + 1) % k]];
        arc[i + 1] = arc[i] + a.dist(b);
    }
    let total_arc = arc[k].max(f64::MIN_POSITIVE);

    // Anchor candidates: boundary vertex nearest each region bbox corner.
    let min_x = loop_.iter().map(|&v| mesh.vertices[v].x).fold(f64::INFINITY, f64::min);
    let min_y = loop_.iter().map(|&v| mesh.vertices[v].y).fold(f64::INFINITY, f64::min);
    let max_x = loop_.iter().map(|&v| mesh.vertices[v].x).fold(f64::NEG_INFINITY, f64::max);
    let max_y = loop_.iter().map(|&v| mesh.vertices[v].y).fold(f64::NEG_INFINITY, f64::max);
    let bbox = [
        Point::new(min_x, min_y),
        Point::new(max_x, min_y),
        Point::new(max_x, max_y),
        Point::new(min_x, max_y),
    ];
    let rect_corner_arc = [0.0, w, w + h, w + h + w];
    let mut anchors = [0usize; 4]; // positions in the loop
    for (c, corner) in bbox.iter().enumerate() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, &v) in loop_.iter().enumerate() {
            let d = mesh.vertices[v].dist(*corner);
            if d < best_d - 1e-15 || (d < best_d + 1e-15 && loop_[i] < loop_[best]) {
                best_d = d;
                best = i;
            }
        }
        anchors[c] = best;
    }
    let distinct = anchors[0] != anchors[1]
        && anchors[1] != anchors[2]
        && anchors[2] != anchors[3]
        && anchors[3] != anchors[0]
        && anchors[0] != anchors[2]
        && anchors[1] != anchors[3];
    let cyclic = {
        // anchors must appear in loop order (allowing rotation)
        let a = anchors;
        let k = k as i64;
        let d1 = (a[1] as i64 - a[0] as i64).rem_euclid(k);
        let d2 = (a[2] as i64 - a[0] as i64).rem_euclid(k);
        let d3 = (a[3] as i64 - a[0] as i64).rem_euclid(k);
        0 < d1 && d1 < d2 && d2 < d3
    };

    let perimeter = 2.0 * (w + h);
    let mut out = Vec::with_capacity(k);
    if distinct && cyclic {
        // Map each of the four arcs onto its rectangle side span.
        for side in 0..4 {
            let i0 = anchors[side];
            let i1 = anchors[(side + 1) % 4];
            let arc0 = arc[i0];
            let arc_len = {
                let raw = arc[i1] - arc[i0];
                if raw > 0.0 {
                    raw
                } else {
                    raw + total_arc
                }
            };
            let t0 = rect_corner_arc[side];
            let t1 = if side == 3 { perimeter } else { rect_corner_arc[side + 1] };
            let mut i = i0;
            loop {
                let along = {
                    let raw = arc[i] - arc0;
                    if i >= i0 {
                        raw
                    } else {
                        raw + total_arc
                    }
                };
                let frac = (along / arc_len.max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
                let t = t0 + frac * (t1 - t0);
                out.push((loop_[i], perimeter_point(t, w, h)));
                i = (i + 1) % k;
                if i == i1 {
                    break;
                }
            }
        }
    } else {
        // Fallback: proportional placement around the whole perimeter,
        // anchored at the vertex nearest the bbox bottom-left corner.
        let i0 = anchors[0];
        for j in 0..k {
            let i = (i0 + j) % k;
            let along = {
                let raw = arc[i] - arc[i0];
                if i >= i0 {
                    raw
                } else {
                    raw + total_arc
                }
            };
            let t = along / total_arc * perimeter;
            out.push((loop_[i], perimeter_point(t, w, h)));
        }
    }
    out
}

/// Solve the interior positions of a mesh given fixed boundary positions,
/// using the uniform graph Laplacian and conjugate gradients per coordinate.
/// Exposed for tests that prescribe boundary positions directly.
pub fn solve_interior(
    mesh: &TriMesh,
    fixed: &[(usize, Point)],
    target_w: f64,
    target_h: f64,
) -> Result<Embedding, EmbedError> {
    let n = mesh.vertices.len();
    if n == 0 {
        return Err(EmbedError::EmptyMesh);
    }
    if !mesh.is_connected() {
        return Err(EmbedError::DisconnectedMesh);
    }
    let mut positions = vec![Point::new(0.0, 0.0); n];
    let mut is_fixed = vec![false; n];
    for &(v, p) in fixed {
        positions[v] = p;
        is_fixed[v] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&v| !is_fixed[v]).collect();
    if interior.is_empty() {
        return Ok(Embedding {
            positions,
            target_w,
            target_h,
        });
    }
    let nbrs = mesh.neighbors();
    let mut index_of = vec![usize::MAX; n];
    for (i, &v) in interior.iter().enumerate() {
        index_of[v] = i;
    }
    let target_diag = (target_w * target_w + target_h * target_h).sqrt();
    let tol = 1e-9 * target_diag;

    // Solve L_II x = b per coordinate with CG; A is SPD for a connected
    // mesh with at least one boundary vertex.
    for coord in 0..2 {
        let ni = interior.len();
        let mut b = vec![0.0; ni];
        for (i, &v) in interior.iter().enumerate() {
            for &u in &nbrs[v] {
                if is_fixed[u] {
                    b[i] += pick(positions[u], coord);
                }
            }
        }
        let apply = |x: &[f64], out: &mut [f64]| {
            for (i, &v) in interior.iter().enumerate() {
                let mut acc = nbrs[v].len() as f64 * x[i];
                for &u in &nbrs[v] {
                    if !is_fixed[u] {
                        acc -= x[index_of[u]];
                    }
                }
                out[i] = acc;
            }
        };
        // Start from the neighbor-average of fixed positions.
        let mut x = vec![0.0; ni];
        for (i, &v) in interior.iter().enumerate() {
            let deg = nbrs[v].len() as f64;
            x[i] = b[i] / deg.max(1.0);
        }
        let mut r = vec![0.0; ni];
        apply(&x, &mut r);
        for i in 0..ni {
            r[i] = b[i] - r[i];
        }
        let mut p = r.clone();
        let mut rs_old: f64 = r.iter().map(|v| v * v).sum();
        let mut ap = vec![0.0; ni];
        let cap = 20 * ni + 200;
        let mut it = 0;
        while r.iter().fold(0.0f64, |a, &v| a.max(v.abs())) > tol {
            if it >= cap {
                return Err(EmbedError::NonConvergence(cap));
            }
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(EmbedError::NonConvergence(it));
            }
            let alpha = rs_old / pap;
            for i in 0..ni {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rs_new / rs_old;
            for i in 0..ni {
                p[i] = r[i] + beta * p[i];
            }
            rs_old = rs_new;
            it += 1;
        }
        for (i, &v) in interior.iter().enumerate() {
            match coord {
                0 => positions[v].x = x[i],
                _ => positions[v].y = x[i],
            }
        }
    }
    Ok(Embedding {
        positions,
        target_w,
        target_h,
    })
}

fn pick(p: Point, coord: usize) -> f64 {
    if coord == 0 {
        p.x
    } else {
        p.y
    }
}

/// Embed a mesh into the rectangle `[0, w] x [0, h]`.
pub fn harmonic_embed(mesh: &TriMesh, target_w: f64, target_h: f64) -> Result<Embedding, EmbedError> {
    if mesh.vertices.is_empty() {
        return Err(EmbedError::EmptyMesh);
    }
    let fixed = boundary_positions(mesh, target_w, target_h);
    solve_interior(mesh, &fixed, target_w, target_h)
}

// ---------------------------------------------------------------------------
// Point mapping
// ---------------------------------------------------------------------------

/// Barycentric coordinates of `p` in triangle `t` of the source mesh.
fn barycentric(mesh: &TriMesh, t: usize, p: Point) -> (f64, f64, f64) {
    let [a, b, c] = mesh.triangles[t];
    let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
    let denom = orient(pa, pb, pc);
    let la = orient(Point::new(p.x, p.y), pb, pc) / denom;
    let lb = orient(pa, Point::new(p.x, p.y), pc) / denom;
    let lc = 1.0 - la - lb;
    (la, lb, lc)
}

/// Map `p` through triangle `t`: barycentric coordinates in the source
/// triangle applied to the embedded triangle.
pub fn map_point_in(emb: &Embedding, mesh: &TriMesh, t: usize, p: Point) -> Point {
    let (la, lb, lc) = barycentric(mesh, t, p);
    let [a, b, c] = mesh.triangles[t];
    let (qa, qb, qc) = (emb.positions[a], emb.positions[b], emb.positions[c]);
    Point::new(
        la * qa.x + lb * qb.x + lc * qc.x,
        la * qa.y + lb * qb.y + lc * qc.y,
    )
}

fn clamp_to_segment(p: Point, a: Point, b: Point) -> Point {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return a;
    }
    let t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    let t = t.clamp(0.0, 1.0);
    Point::new(a.x + t * ab.x, a.y + t * ab.y)
}

/// Map a point of the source region into the target rectangle. Points
/// outside every triangle snap to the closest point of the nearest triangle
/// first (ties break toward the lower triangle index).
pub fn map_point(emb: &Embedding, mesh: &TriMesh, p: Point) -> Result<Point, EmbedError> {
    if mesh.triangles.is_empty() {
        return Err(EmbedError::EmptyMesh);
    }
    const TOL: f64 = 1e-12;
    let mut best_t = usize::MAX;
    let mut best_d = f64::INFINITY;
    let mut best_q = p;
    for t in 0..mesh.triangles.len() {
        let (la, lb, lc) = barycentric(mesh, t, p);
        if la >= -TOL && lb >= -TOL && lc >= -TOL {
            return Ok(map_point_in(emb, mesh, t, p));
        }
        // Distance to this triangle via its edges.
        let [a, b, c] = mesh.triangles[t];
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let q = clamp_to_segment(p, mesh.vertices[u], mesh.vertices[v]);
            let d = p.dist(q);
            if d < best_d - 1e-15 {
                best_d = d;
                best_t = t;
                best_q = q;
            }
        }
    }
    Ok(map_point_in(emb, mesh, best_t, best_q))
}

/// Batch point mapper with a uniform bucket index over triangle bounding
/// boxes. Gives the same answers as [`map_point`] (containment hits pick
/// the lowest triangle index) but avoids the full scan per query.
pub struct PointMapper<'a> {
    emb: &'a Embedding,
    mesh: &'a TriMesh,
    nb: usize,
    min: Point,
    inv_span: f64,
    buckets: Vec<Vec<usize>>,
}

impl<'a> PointMapper<'a> {
    pub fn new(emb: &'a Embedding, mesh: &'a TriMesh) -> Self {
        let nb = ((mesh.triangles.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let min_x = mesh.vertices.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let min_y = mesh.vertices.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_x = mesh
            .vertices
            .iter()
            .map(|p| p.x)
            .fold(f64::NEG_INFINITY, f64::max);
        let max_y = mesh
            .vertices
            .iter()
            .map(|p| p.y)
            .fold(f64::NEG_INFINITY, f64::max);
        let span = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
        let inv_span = nb as f64 / span;
        let min = Point::new(min_x, min_y);
        let mut buckets = vec![Vec::new(); nb * nb];
        let clampb = |v: f64| (v.max(0.0) as usize).min(nb - 1);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let xs = tri.map(|v| mesh.vertices[v].x);
            let ys = tri.map(|v| mesh.vertices[v].y);
            let bx0 = clampb((xs.iter().cloned().fold(f64::INFINITY, f64::min) - min_x) * inv_span);
            let bx1 =
                clampb((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - min_x) * inv_span);
            let by0 = clampb((ys.iter().cloned().fold(f64::INFINITY, f64::min) - min_y) * inv_span);
            let by1 =
                clampb((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - min_y) * inv_span);
            for by in by0..=by1 {
                for bx in bx0..=bx1 {
                    buckets[by * nb + bx].push(t);
                }
            }
        }
        PointMapper {
            emb,
            mesh,
            nb,
            min,
            inv_span,
            buckets,
        }
    }

    pub fn map(&self, p: Point) -> Result<Point, EmbedError> {
        if self.mesh.triangles.is_empty() {
            return Err(EmbedError::EmptyMesh);
        }
        const TOL: f64 = 1e-12;
        let bx = (((p.x - self.min.x) * self.inv_span).max(0.0) as usize).min(self.nb - 1);
        let by = (((p.y - self.min.y) * self.inv_span).max(0.0) as usize).min(self.nb - 1);
        for &t in &self.buckets[by * self.nb + bx] {
            let (la, lb, lc) = barycentric(self.mesh, t, p);
            if la >= -TOL && lb >= -TOL && lc >= -TOL {
                return Ok(map_point_in(self.emb, self.mesh, t, p));
            }
        }
        // Outside the bucket's triangles: fall back to the full scan.
        map_point(self.emb, self.mesh, p)
    }
}
