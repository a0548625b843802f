//! Two-dimensional rate regions and the general-dimension projection engine.
//!
//! A [`RatePolytope`] is `{(Rp, Rc) >= 0 : a Rp + b Rc <= v}`. Every region
//! built from the channel bounds uses small nonnegative integer weights; hulls
//! produced by vertex projection may carry arbitrary real normals.

mod hpoly;

pub use hpoly::{fme_project, project_by_vertices, HPolyhedron, Row, RowKind, BOX_BOUND, MAX_VERTEX_DIM};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feasibility slack used when enumerating and testing vertices.
pub const VERTEX_TOL: f64 = 1e-9;
/// Resolution of the gap bisection, in bits.
pub const GAP_RESOLUTION: f64 = 1e-9;
/// Number of support directions used by [`set_equal`].
pub const SUPPORT_DIRECTIONS: usize = 64;

pub type Point = [f64; 2];

/// `coeff_p * Rp + coeff_c * Rc <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRateConstraint {
    pub coeff_p: f64,
    pub coeff_c: f64,
    pub rhs: f64,
    /// Additive constant in bits that is already included in `rhs`
    /// (the multiples of `log2(2)` and `log2(3)`).
    #[serde(default)]
    pub constant: f64,
    pub label: Option<String>,
}

impl LinearRateConstraint {
    pub fn new(coeff_p: f64, coeff_c: f64, rhs: f64) -> Result<Self> {
        if !coeff_p.is_finite() || !coeff_c.is_finite() || (coeff_p == 0.0 && coeff_c == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "constraint weights ({coeff_p}, {coeff_c}) must be finite and not both zero"
            )));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidParameter(format!("constraint rhs {rhs} is not finite")));
        }
        Ok(Self { coeff_p, coeff_c, rhs, constant: 0.0, label: None })
    }

    /// Constraint whose right-hand side is `gain_part + constant`.
    pub fn bound(
        label: impl Into<String>,
        coeff_p: f64,
        coeff_c: f64,
        gain_part: f64,
        constant: f64,
    ) -> Result<Self> {
        let mut c = Self::new(coeff_p, coeff_c, gain_part + constant)?;
        c.constant = constant;
        c.label = Some(label.into());
        Ok(c)
    }

    /// Right-hand side without the additive constant.
    pub fn gain_part(&self) -> f64 {
        self.rhs - self.constant
    }

    pub fn labelled(coeff_p: f64, coeff_c: f64, rhs: f64, label: impl Into<String>) -> Result<Self> {
        let mut c = Self::new(coeff_p, coeff_c, rhs)?;
        c.label = Some(label.into());
        Ok(c)
    }

    #[inline]
    pub fn lhs(&self, pt: Point) -> f64 {
        self.coeff_p * pt[0] + self.coeff_c * pt[1]
    }

    /// Signed slack `rhs - lhs` at `pt`.
    #[inline]
    pub fn slack(&self, pt: Point) -> f64 {
        self.rhs - self.lhs(pt)
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.coeff_p, self.coeff_c)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatePolytope {
    pub constraints: Vec<LinearRateConstraint>,
}

/// Vertices of a rate polytope plus the indices of constraints that do not
/// support an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    pub vertices: Vec<Point>,
    pub redundant: Vec<usize>,
}

impl RatePolytope {
    pub fn new(constraints: Vec<LinearRateConstraint>) -> Self {
        Self { constraints }
    }

    pub fn push(&mut self, c: LinearRateConstraint) {
        self.constraints.push(c);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&LinearRateConstraint> {
        self.constraints.iter().find(|c| c.label.as_deref() == Some(label))
    }

    /// True when every weight is nonnegative, so the region is closed under
    /// componentwise decrease.
    pub fn is_down_closed(&self) -> bool {
        self.constraints.iter().all(|c| c.coeff_p >= 0.0 && c.coeff_c >= 0.0)
    }

    /// Replaces an empty down-closed region (some rhs below zero) by the single
    /// point at the origin. The flag reports whether the replacement happened.
    pub fn or_origin(&self) -> (Self, bool) {
        if self.is_down_closed() && self.constraints.iter().any(|c| c.rhs < 0.0) {
            let mut p = self.clone();
            for c in &mut p.constraints {
                c.rhs = 0.0;
            }
            (p, true)
        } else {
            (self.clone(), false)
        }
    }

    pub fn is_bounded(&self) -> bool {
        !has_recession_direction(&self.constraints)
    }

    pub fn vertices(&self) -> Result<Vec<Point>> {
        vertices2d(self)
    }

    /// Maximum of `w . x` over the region.
    pub fn support(&self, w: Point) -> Result<f64> {
        let v = vertices2d(self)?;
        Ok(support_of(&v, w))
    }

    pub fn max_sum_rate(&self) -> Result<f64> {
        self.support([1.0, 1.0])
    }
}

fn support_of(vertices: &[Point], w: Point) -> f64 {
    vertices
        .iter()
        .map(|v| w[0] * v[0] + w[1] * v[1])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Whether some direction `d >= 0`, `d != 0` has `a . d <= 0` for every row.
fn has_recession_direction(cs: &[LinearRateConstraint]) -> bool {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut candidates = vec![0.0, half_pi];
    for c in cs {
        // a_p cos t + a_c sin t = 0
        let t = (-c.coeff_p).atan2(c.coeff_c);
        for t in [t, t + std::f64::consts::PI, t - std::f64::consts::PI] {
            if (0.0..=half_pi).contains(&t) {
                candidates.push(t);
            }
        }
    }
    candidates.iter().any(|&t| {
        let d = [t.cos(), t.sin()];
        cs.iter().all(|c| {
            let n = c.coeff_p.hypot(c.coeff_c);
            c.lhs(d) <= 1e-12 * n
        })
    })
}

fn feasible(cs: &[LinearRateConstraint], pt: Point, tol: f64) -> bool {
    pt[0] >= -tol
        && pt[1] >= -tol
        && cs.iter().all(|c| c.slack(pt) >= -tol * (1.0 + c.rhs.abs()))
}

/// Vertex enumeration by pairwise line intersection (axes included), returned
/// counterclockwise starting from the vertex of smallest angle around the centroid.
pub fn vertices2d(p: &RatePolytope) -> Result<Vec<Point>> {
    analyze2d(p).map(|v| v.vertices)
}

pub fn analyze2d(p: &RatePolytope) -> Result<VertexSet> {
    if !p.is_bounded() {
        return Err(Error::Unbounded);
    }
    let mut lines: Vec<(f64, f64, f64)> =
        p.constraints.iter().map(|c| (c.coeff_p, c.coeff_c, c.rhs)).collect();
    lines.push((-1.0, 0.0, 0.0));
    lines.push((0.0, -1.0, 0.0));

    let mut pts: Vec<Point> = Vec::new();
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            let scale = a1.hypot(b1) * a2.hypot(b2);
            if det.abs() <= 1e-14 * scale {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            let pt = [if x.abs() < 1e-15 { 0.0 } else { x }, if y.abs() < 1e-15 { 0.0 } else { y }];
            if feasible(&p.constraints, pt, VERTEX_TOL) && !pts.iter().any(|q| close(*q, pt)) {
                pts.push(pt);
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Empty);
    }
    sort_ccw(&mut pts);

    let redundant = p
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let tol = VERTEX_TOL * (1.0 + c.rhs.abs());
            pts.iter().filter(|v| c.slack(**v).abs() <= tol).count() < 2
        })
        .map(|(k, _)| k)
        .collect();
    Ok(VertexSet { vertices: pts, redundant })
}

fn close(a: Point, b: Point) -> bool {
    let s = 1.0 + a[0].abs().max(a[1].abs());
    (a[0] - b[0]).abs() <= VERTEX_TOL * s && (a[1] - b[1]).abs() <= VERTEX_TOL * s
}

fn sort_ccw(pts: &mut [Point]) {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    // Start at the origin-most vertex so paper regions read (0,0), (x,0), ...
    if let Some(k) = pts
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (a[0] + a[1]).total_cmp(&(b[0] + b[1])).then(a[1].total_cmp(&b[1])))
        .map(|(k, _)| k)
    {
        pts.rotate_left(k);
    }
}

/// Membership with slack `tol` on every constraint and on the two axes.
pub fn contains(p: &RatePolytope, pt: Point, tol: f64) -> bool {
    pt[0] >= -tol && pt[1] >= -tol && p.constraints.iter().all(|c| c.slack(pt) >= -tol)
}

/// Result of a gap computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub gap: f64,
    /// Outer vertex that needs the largest shift.
    pub binding_vertex: Point,
}

/// Smallest `g >= 0` such that every outer vertex shifted to
/// `([v_p - g]^+, [v_c - g]^+)` lies in `inner`.
pub fn gap_to_within(outer: &RatePolytope, inner: &RatePolytope) -> Result<f64> {
    gap_detailed(outer, inner).map(|g| g.gap)
}

pub fn gap_detailed(outer: &RatePolytope, inner: &RatePolytope) -> Result<GapResult> {
    let verts = vertices2d(outer)?;
    if !contains(inner, [0.0, 0.0], VERTEX_TOL) {
        // A down-closed inner region missing the origin is empty.
        vertices2d(inner)?;
    }
    let shifted = |v: Point, g: f64| [(v[0] - g).max(0.0), (v[1] - g).max(0.0)];
    let mut best = GapResult { gap: 0.0, binding_vertex: verts[0] };
    for v in verts {
        if contains(inner, v, VERTEX_TOL) {
            continue;
        }
        let mut lo = 0.0;
        let mut hi = v[0].max(v[1]);
        if !contains(inner, shifted(v, hi), VERTEX_TOL) {
            return Err(Error::Empty);
        }
        while hi - lo > GAP_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if contains(inner, shifted(v, mid), VERTEX_TOL) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if hi > best.gap {
            best = GapResult { gap: hi, binding_vertex: v };
        }
    }
    Ok(best)
}

/// The support directions `(cos t, sin t)`, `t = k pi / (2 (n-1))`.
pub fn quadrant_directions(n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Largest support-function difference between `a` and `b` over the
/// nonnegative-quadrant directions.
pub fn support_distance(a: &RatePolytope, b: &RatePolytope) -> Result<f64> {
    let va = vertices2d(a)?;
    let vb = vertices2d(b)?;
    Ok(quadrant_directions(SUPPORT_DIRECTIONS)
        .into_iter()
        .map(|w| (support_of(&va, w) - support_of(&vb, w)).abs())
        .fold(0.0, f64::max))
}

pub fn set_equal(a: &RatePolytope, b: &RatePolytope, tol: f64) -> Result<bool> {
    Ok(support_distance(a, b)? <= tol)
}

/// Whether every vertex of `inner` lies in `outer` within `tol`.
pub fn is_subset(inner: &RatePolytope, outer: &RatePolytope, tol: f64) -> Result<bool> {
    Ok(vertices2d(inner)?.into_iter().all(|v| contains(outer, v, tol)))
}

/// Half-planes of the convex hull of a 2-D point cloud.
pub fn hull_polytope(points: &[Point]) -> Result<RatePolytope> {
    let hull = convex_hull(points);
    let mut out = RatePolytope::default();
    match hull.len() {
        0 => return Err(Error::Empty),
        1 => {
            let p = hull[0];
            for (a, b, r) in [(1.0, 0.0, p[0]), (-1.0, 0.0, -p[0]), (0.0, 1.0, p[1]), (0.0, -1.0, -p[1])] {
                out.push(LinearRateConstraint::new(a, b, r)?);
            }
        }
        2 => {
            let (p, q) = (hull[0], hull[1]);
            let d = [q[0] - p[0], q[1] - p[1]];
            let len = d[0].hypot(d[1]);
            let d = [d[0] / len, d[1] / len];
            let n = [-d[1], d[0]];
            let dot = |u: Point, v: Point| u[0] * v[0] + u[1] * v[1];
            out.push(LinearRateConstraint::new(n[0], n[1], dot(n, p))?);
            out.push(LinearRateConstraint::new(-n[0], -n[1], -dot(n, p))?);
            out.push(LinearRateConstraint::new(d[0], d[1], dot(d, q))?);
            out.push(LinearRateConstraint::new(-d[0], -d[1], -dot(d, p))?);
        }
        k => {
            for i in 0..k {
                let p = hull[i];
                let q = hull[(i + 1) % k];
                // Outward normal of a counterclockwise edge.
                let n = [q[1] - p[1], p[0] - q[0]];
                let len = n[0].hypot(n[1]);
                let n = [n[0] / len, n[1] / len];
                out.push(LinearRateConstraint::new(n[0], n[1], n[0] * p[0] + n[1] * p[1])?);
            }
        }
    }
    Ok(out)
}

/// Replaces each run of coordinates whose consecutive gaps are within `tol`
/// by the run's first value.
fn snap_axis(pts: &mut [Point], axis: usize, tol: f64) {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
    let mut anchor = f64::NAN;
    let mut prev = f64::NAN;
    for k in order {
        let v = pts[k][axis];
        if !(v - prev <= tol) {
            anchor = v;
        }
        prev = v;
        pts[k][axis] = anchor;
    }
}

/// Andrew's monotone chain; returns the hull counterclockwise without
/// collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    let mut pts: Vec<Point> = points.to_vec();
    // Coordinates a few ulps apart would otherwise break the monotone order.
    for axis in 0..2 {
        snap_axis(&mut pts, axis, 1e-12 * scale);
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| close(*a, *b));
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let eps = 1e-12 * scale * scale;
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
