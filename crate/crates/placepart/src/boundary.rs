//! Analytic polar boundary model and cost evaluation.
//!
//! A boundary is a fan of triangles anchored at one layout corner: the
//! quarter angle at the corner is split into `m` sectors of `theta = pi/2m`
//! each, and a radius `r_i` is attached to every sector ray. Grid centers
//! covered by any fan triangle form partition 1, the rest partition 0. Cut
//! size is the Laplacian quadratic form of that binary vector, imbalance is
//! the node-weight form, and the cost blends both after normalization.
//!
//! All four corners share one code path: grid centers are reflected into a
//! corner-local frame where the fan always opens into the first quadrant.
//!
//! Coverage, and hence the partition vector, is evaluated independently per
//! grid center, so callers may split centers across workers; results do not
//! depend on worker count or schedule.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geom::Point;
use crate::gridgraph::{GridGraph, Laplacian, NodeWeightMatrix};

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("dimension mismatch: vector has {got} labels, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("degenerate instance: total edge weight {we}, total node weight {wv}")]
    DegenerateInstance { we: f64, wv: f64 },
}

/// Layout corner used as the fan origin. The declaration order is the fixed
/// tie-break order for corner selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

pub const ALL_CORNERS: [Corner; 4] = [
    Corner::BottomLeft,
    Corner::BottomRight,
    Corner::TopLeft,
    Corner::TopRight,
];

impl Corner {
    pub fn index(self) -> usize {
        match self {
            Corner::BottomLeft => 0,
            Corner::BottomRight => 1,
            Corner::TopLeft => 2,
            Corner::TopRight => 3,
        }
    }

    /// Origin point of this corner in layout coordinates.
    pub fn origin(self, w: f64, h: f64) -> Point {
        match self {
            Corner::BottomLeft => Point::new(0.0, 0.0),
            Corner::BottomRight => Point::new(w, 0.0),
            Corner::TopLeft => Point::new(0.0, h),
            Corner::TopRight => Point::new(w, h),
        }
    }

    /// Reflect a layout point into the corner-local frame, where the layout
    /// occupies the first quadrant seen from the corner.
    pub fn to_local(self, p: Point, w: f64, h: f64) -> Point {
        match self {
            Corner::BottomLeft => p,
            Corner::BottomRight => Point::new(w - p.x, p.y),
            Corner::TopLeft => Point::new(p.x, h - p.y),
            Corner::TopRight => Point::new(w - p.x, h - p.y),
        }
    }

    /// Map a corner-local point back to layout coordinates.
    pub fn from_local(self, p: Point, w: f64, h: f64) -> Point {
        // Reflections are involutions.
        self.to_local(p, w, h)
    }
}

/// Polar fan boundary: origin corner, `m` angular sectors, `m + 1` radii.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub corner: Corner,
    pub m: usize,
    pub radii: Vec<f64>,
    pub layout_w: f64,
    pub layout_h: f64,
}

impl Boundary {
    /// Build a boundary; radii are clamped to `[0, R_max]` with `R_max`
    /// the layout diagonal.
    pub fn new(corner: Corner, m: usize, radii: Vec<f64>, layout_w: f64, layout_h: f64) -> Self {
        assert!(m >= 2, "need at least 2 angles");
        assert_eq!(radii.len(), m + 1, "expected m + 1 radii");
        let r_max = (layout_w * layout_w + layout_h * layout_h).sqrt();
        let radii = radii.iter().map(|r| r.clamp(0.0, r_max)).collect();
        Boundary {
            corner,
            m,
            radii,
            layout_w,
            layout_h,
        }
    }

    pub fn theta(&self) -> f64 {
        PI / (2.0 * self.m as f64)
    }

    pub fn r_max(&self) -> f64 {
        (self.layout_w * self.layout_w + self.layout_h * self.layout_h).sqrt()
    }

    /// Boundary points b_i in the corner-local frame.
    pub fn points_local(&self) -> Vec<Point> {
        let theta = self.theta();
        self.radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let a = i as f64 * theta;
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    /// Boundary polyline in layout coordinates (for rendering).
    pub fn polyline_layout(&self) -> Vec<Point> {
        self.points_local()
            .into_iter()
            .map(|p| self.corner.from_local(p, self.layout_w, self.layout_h))
            .collect()
    }
}

/// Binary per-grid labels, indexed like [`GridGraph`] nodes. Label 1 is the
/// "inside the fan" partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionVector {
    pub labels: Vec<u8>,
}

impl PartitionVector {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Cost weighting for cut size (`alpha_c`) and imbalance (`alpha_b`).
#[derive(Debug, Clone, Copy)]
pub struct CostParams {
    pub alpha_c: f64,
    pub alpha_b: f64,
}

/// Triangle coverage indicator. Returns 1 when `v` lies inside or on the
/// triangle (o, b_i, b_i1): the three edge cross products carry a consistent
/// sign. Triangles with area below `eps_area` cover nothing, so a collapsed
/// fan covers no grid center.
pub fn cover(v: Point, o: Point, b_i: Point, b_i1: Point, eps_area: f64) -> u8 {
    let area2 = (b_i.sub(o)).cross(b_i1.sub(o));
    if area2.abs() < 2.0 * eps_area {
        return 0;
    }
    let f1 = (b_i.sub(o)).cross(v.sub(o));
    let f2 = (b_i1.sub(b_i)).cross(v.sub(b_i));
    let f3 = (o.sub(b_i1)).cross(v.sub(b_i1));
    let inside = if area2 > 0.0 {
        f1 >= 0.0 && f2 >= 0.0 && f3 >= 0.0
    } else {
        f1 <= 0.0 && f2 <= 0.0 && f3 <= 0.0
    };
    inside as u8
}

/// Precomputed per-corner data for repeated partition-vector evaluations of
/// one grid: corner-local center coordinates, their angular sector and
/// squared radius.
pub struct FanContext {
    pub corner: Corner,
    pub m: usize,
    theta: f64,
    eps_area: f64,
    r_max: f64,
    local: Vec<(f64, f64)>,
    sector: Vec<u32>,
    rho2: Vec<f64>,
}

impl FanContext {
    pub fn new(g: &GridGraph, corner: Corner, m: usize) -> Self {
        assert!(m >= 2);
        let theta = PI / (2.0 * m as f64);
        let r_max = g.layout_diag();
        let n = g.node_count();
        let mut local = Vec::with_capacity(n);
        let mut sector = Vec::with_capacity(n);
        let mut rho2 = Vec::with_capacity(n);
        for idx in 0..n {
            let c = corner.to_local(g.grid_center(idx), g.layout_w, g.layout_h);
            let phi = c.y.atan2(c.x);
            let s = ((phi / theta).floor() as i64).clamp(0, m as i64 - 1) as u32;
            local.push((c.x, c.y));
            sector.push(s);
            rho2.push(c.x * c.x + c.y * c.y);
        }
        FanContext {
            corner,
            m,
            theta,
            eps_area: 1e-12 * r_max * r_max,
            r_max,
            local,
            sector,
            rho2,
        }
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Evaluate the partition vector for the given (clamped) radii into
    /// `out`. A center is labeled 1 when any fan triangle covers it; only
    /// the triangles whose angular sector can contain the center are
    /// evaluated, which is exact because coverage requires the center angle
    /// to lie within the triangle's sector.
    pub fn eval_into(&self, radii: &[f64], out: &mut Vec<u8>) {
        assert_eq!(radii.len(), self.m + 1);
        let m = self.m;
        // Per-sector triangle constants.
        let mut bx = vec![0.0f64; m + 1];
        let mut by = vec![0.0f64; m + 1];
        for (i, &r) in radii.iter().enumerate() {
            let a = i as f64 * self.theta;
            bx[i] = r * a.cos();
            by[i] = r * a.sin();
        }
        // For sector s the triangle is (o, b_s, b_{s+1}).
        let mut ex = vec![0.0f64; m];
        let mut ey = vec![0.0f64; m];
        let mut c2 = vec![0.0f64; m];
        let mut live = vec![false; m];
        let mut rmax2 = vec![0.0f64; m];
        for s in 0..m {
            ex[s] = bx[s + 1] - bx[s];
            ey[s] = by[s + 1] - by[s];
            c2[s] = ex[s] * by[s] - ey[s] * bx[s];
            let area2 = bx[s] * by[s + 1] - by[s] * bx[s + 1];
            // Fan triangles are counter-clockwise in the local frame.
            live[s] = area2 >= 2.0 * self.eps_area;
            let rm = radii[s].max(radii[s + 1]);
            rmax2[s] = rm * rm;
        }
        // Candidate reject radius per sector: max over sectors s-1, s, s+1.
        let mut reject2 = vec![0.0f64; m];
        for s in 0..m {
            let mut r2 = rmax2[s];
            if s > 0 {
                r2 = r2.max(rmax2[s - 1]);
            }
            if s + 1 < m {
                r2 = r2.max(rmax2[s + 1]);
            }
            reject2[s] = r2;
        }

        out.clear();
        out.reserve(self.local.len());
        for idx in 0..self.local.len() {
            let s = self.sector[idx] as usize;
            if self.rho2[idx] > reject2[s] {
                out.push(0);
                continue;
            }
            let (vx, vy) = self.local[idx];
            let lo = s.saturating_sub(1);
            let hi = (s + 1).min(m - 1);
            let mut covered = 0u8;
            for t in lo..=hi {
                if !live[t] {
                    continue;
                }
                let f1 = bx[t] * vy - by[t] * vx;
                let f3 = by[t + 1] * vx - bx[t + 1] * vy;
                let f2 = ex[t] * vy - ey[t] * vx - c2[t];
                covered |= (f1 >= 0.0 && f2 >= 0.0 && f3 >= 0.0) as u8;
            }
            out.push(covered);
        }
    }
}

/// Classify every grid center against the fan (Eq.-style indicator summed
/// over triangles).
pub fn partition_vector(boundary: &Boundary, g: &GridGraph) -> PartitionVector {
    let ctx = FanContext::new(g, boundary.corner, boundary.m);
    let mut labels = Vec::new();
    ctx.eval_into(&boundary.radii, &mut labels);
    PartitionVector { labels }
}

/// Reference evaluation: test every grid center against every fan triangle
/// with the public `cover`, no pruning. Used to cross-check the fast path.
pub fn partition_vector_full(boundary: &Boundary, g: &GridGraph) -> PartitionVector {
    let pts = boundary.points_local();
    let o = Point::new(0.0, 0.0);
    let r_max = boundary.r_max();
    let eps_area = 1e-12 * r_max * r_max;
    let labels = (0..g.node_count())
        .map(|idx| {
            let v = boundary
                .corner
                .to_local(g.grid_center(idx), g.layout_w, g.layout_h);
            let covered: u32 = (0..boundary.m)
                .map(|i| cover(v, o, pts[i], pts[i + 1], eps_area) as u32)
                .sum();
            (covered > 0) as u8
        })
        .collect();
    PartitionVector { labels }
}

/// Cut size as the Laplacian quadratic form P L P^T; for a binary vector
/// this equals the total weight of grid edges with differing labels.
pub fn cut_size(p: &PartitionVector, l: &Laplacian) -> Result<f64, BoundaryError> {
    if p.len() != l.n {
        return Err(BoundaryError::DimensionMismatch {
            got: p.len(),
            expected: l.n,
        });
    }
    let mut acc = 0.0;
    for v in 0..l.n {
        if p.labels[v] == 0 {
            continue;
        }
        let mut row = 0.0;
        for k in l.row_ptr[v]..l.row_ptr[v + 1] {
            if p.labels[l.col_idx[k]] == 1 {
                row += l.values[k];
            }
        }
        acc += row;
    }
    Ok(acc)
}

/// Imbalance UB = |2 (P D_w P^T) - W_v|.
pub fn imbalance(
    p: &PartitionVector,
    dw: &NodeWeightMatrix,
    wv: f64,
) -> Result<f64, BoundaryError> {
    if p.len() != dw.diag.len() {
        return Err(BoundaryError::DimensionMismatch {
            got: p.len(),
            expected: dw.diag.len(),
        });
    }
    let side: f64 = p
        .labels
        .iter()
        .zip(&dw.diag)
        .filter(|(&l, _)| l == 1)
        .map(|(_, &d)| d)
        .sum();
    Ok((2.0 * side - wv).abs())
}

pub fn combine_cost(cut: f64, ub: f64, we: f64, wv: f64, params: CostParams) -> f64 {
    params.alpha_c * cut / we + params.alpha_b * ub / wv
}

/// Full boundary cost: alpha_c * cutsize / W_e + alpha_b * UB / W_v.
pub fn cost(
    boundary: &Boundary,
    g: &GridGraph,
    params: CostParams,
) -> Result<f64, BoundaryError> {
    let we = g.total_edge_weight;
    let wv = g.total_node_weight;
    if we <= 0.0 || wv <= 0.0 {
        return Err(BoundaryError::DegenerateInstance { we, wv });
    }
    let p = partition_vector(boundary, g);
    let l = crate::gridgraph::laplacian(g);
    let dw = NodeWeightMatrix::from_grid(g);
    let cut = cut_size(&p, &l)?;
    let ub = imbalance(&p, &dw, wv)?;
    Ok(combine_cost(cut, ub, we, wv, params))
}
