use itertools::Itertools;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{hull_polytope, LinearRateConstraint, Point, RatePolytope};
use crate::error::{Error, Result};

/// Box bound added to otherwise unbounded coordinates before vertex enumeration.
pub const BOX_BOUND: f64 = 1e6;
/// Largest dimension accepted by [`project_by_vertices`].
pub const MAX_VERTEX_DIM: usize = 10;

const FEAS_TOL: f64 = 1e-9;
/// Variable bounds handed to the LP solver; an optimum touching them is read
/// as unbounded. Must sit well above [`BOX_BOUND`].
const LP_BOX: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Le,
    Eq,
}

/// `coeffs . x <= rhs` (or `==`). Weights are exact integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<i64>,
    pub rhs: f64,
    pub kind: RowKind,
}

impl Row {
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Divides by the gcd of the weights so equal directions compare equal.
    fn normalize(&mut self) {
        let g = self.coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g > 1 {
            for c in &mut self.coeffs {
                *c /= g;
            }
            self.rhs /= g as f64;
        }
        if self.kind == RowKind::Eq {
            if let Some(&first) = self.coeffs.iter().find(|&&c| c != 0) {
                if first < 0 {
                    for c in &mut self.coeffs {
                        *c = -*c;
                    }
                    self.rhs = -self.rhs;
                }
            }
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum()
    }
}

/// `m1 * a + m2 * b` with overflow checks.
fn combine(a: &Row, m1: i64, b: &Row, m2: i64, kind: RowKind) -> Result<Row> {
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(&x, &y)| {
            x.checked_mul(m1)
                .zip(y.checked_mul(m2))
                .and_then(|(p, q)| p.checked_add(q))
                .ok_or(Error::Overflow)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = Row { coeffs, rhs: m1 as f64 * a.rhs + m2 as f64 * b.rhs, kind };
    r.normalize();
    Ok(r)
}

/// Half-space system over labelled variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPolyhedron {
    pub labels: Vec<String>,
    pub rows: Vec<Row>,
    /// Set when box bounds at [`BOX_BOUND`] were added.
    pub synthetic_box: bool,
}

impl HPolyhedron {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, rows: Vec::new(), synthetic_box: false })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn col(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    fn dense(&self, terms: &[(&str, i64)]) -> Result<Vec<i64>> {
        let mut c = vec![0i64; self.dim()];
        for (l, v) in terms {
            c[self.col(l)?] += v;
        }
        Ok(c)
    }

    pub fn add_row(&mut self, coeffs: Vec<i64>, rhs: f64, kind: RowKind) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "row has {} weights, system has dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidParameter(format!("row rhs {rhs} is not finite")));
        }
        self.rows.push(Row { coeffs, rhs, kind });
        Ok(())
    }

    pub fn add_le(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<()> {
        let c = self.dense(terms)?;
        self.add_row(c, rhs, RowKind::Le)
    }

    pub fn add_eq(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<()> {
        let c = self.dense(terms)?;
        self.add_row(c, rhs, RowKind::Eq)
    }

    pub fn add_nonneg(&mut self, label: &str) -> Result<()> {
        self.add_le(&[(label, -1)], 0.0)
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| {
            let v = r.eval(x);
            let t = tol * (1.0 + r.rhs.abs());
            match r.kind {
                RowKind::Le => v <= r.rhs + t,
                RowKind::Eq => (v - r.rhs).abs() <= t,
            }
        })
    }

    /// Maximizes `w . x` over the system, skipping row `skip`.
    fn lp_max(&self, w: &[f64], skip: Option<usize>) -> std::result::Result<f64, minilp::Error> {
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = w
            .iter()
            .map(|&c| p.add_var(c, (-LP_BOX, LP_BOX)))
            .collect();
        for (k, r) in self.rows.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            let expr: Vec<_> = vars
                .iter()
                .zip(&r.coeffs)
                .filter(|(_, &c)| c != 0)
                .map(|(&v, &c)| (v, c as f64))
                .collect();
            if expr.is_empty() {
                continue;
            }
            let op = match r.kind {
                RowKind::Le => ComparisonOp::Le,
                RowKind::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(&expr[..], op, r.rhs);
        }
        let sol = p.solve()?;
        let at_box = vars
            .iter()
            .zip(w)
            .any(|(&v, &c)| c != 0.0 && sol.var_value(v).abs() >= 0.5 * LP_BOX);
        if at_box || !sol.objective().is_finite() {
            return Err(minilp::Error::Unbounded);
        }
        Ok(sol.objective())
    }

    /// Maximum of `w . x`, or `None` when unbounded.
    pub fn support(&self, w: &[f64]) -> Result<Option<f64>> {
        match self.lp_max(w, None) {
            Ok(v) => Ok(Some(v)),
            Err(minilp::Error::Unbounded) => Ok(None),
            Err(minilp::Error::Infeasible) => Err(Error::Infeasible),
        }
    }

    pub fn is_feasible(&self) -> bool {
        let zero = vec![0.0; self.dim()];
        !matches!(self.lp_max(&zero, None), Err(minilp::Error::Infeasible))
    }

    /// Drops zero rows, merges parallel duplicates and removes every row
    /// implied by the others.
    pub fn prune(&mut self) -> Result<()> {
        let mut kept: Vec<Row> = Vec::with_capacity(self.rows.len());
        for mut r in std::mem::take(&mut self.rows) {
            r.normalize();
            if r.is_zero() {
                let t = FEAS_TOL * (1.0 + r.rhs.abs());
                let bad = match r.kind {
                    RowKind::Le => r.rhs < -t,
                    RowKind::Eq => r.rhs.abs() > t,
                };
                if bad {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            if let Some(k) = kept.iter().position(|q| q.kind == r.kind && q.coeffs == r.coeffs) {
                match r.kind {
                    RowKind::Le => kept[k].rhs = kept[k].rhs.min(r.rhs),
                    RowKind::Eq => {
                        if (kept[k].rhs - r.rhs).abs() > FEAS_TOL * (1.0 + r.rhs.abs()) {
                            return Err(Error::Infeasible);
                        }
                    }
                }
                continue;
            }
            kept.push(r);
        }
        self.rows = kept;
        if !self.is_feasible() {
            return Err(Error::Infeasible);
        }
        let mut k = self.rows.len();
        while k > 0 {
            k -= 1;
            if self.rows[k].kind == RowKind::Eq {
                continue;
            }
            let w: Vec<f64> = self.rows[k].coeffs.iter().map(|&c| c as f64).collect();
            match self.lp_max(&w, Some(k)) {
                Ok(v) if v <= self.rows[k].rhs + FEAS_TOL * (1.0 + self.rows[k].rhs.abs()) => {
                    self.rows.remove(k);
                }
                Ok(_) | Err(minilp::Error::Unbounded) => {}
                Err(minilp::Error::Infeasible) => return Err(Error::Infeasible),
            }
        }
        Ok(())
    }

    /// Adds `|x_i| <= BOX_BOUND` rows on coordinates that are unbounded.
    pub fn with_box_bounds(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..self.dim() {
            for sign in [1i64, -1] {
                let mut w = vec![0.0; self.dim()];
                w[i] = sign as f64;
                if self.support(&w)?.is_none() {
                    let mut c = vec![0i64; self.dim()];
                    c[i] = sign;
                    out.rows.push(Row { coeffs: c, rhs: BOX_BOUND, kind: RowKind::Le });
                    out.synthetic_box = true;
                }
            }
        }
        Ok(out)
    }

    /// Interprets a two-variable system as a rate region in `(labels[0], labels[1])`.
    pub fn to_rate_polytope(&self) -> Result<RatePolytope> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter(format!(
                "expected a 2-variable system, got dimension {}",
                self.dim()
            )));
        }
        let mut out = RatePolytope::default();
        for r in &self.rows {
            if r.is_zero() {
                if r.rhs < -FEAS_TOL * (1.0 + r.rhs.abs()) {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            let (a, b) = (r.coeffs[0] as f64, r.coeffs[1] as f64);
            // Axis rows are implicit in a rate polytope.
            if a <= 0.0 && b <= 0.0 && r.rhs >= 0.0 && r.kind == RowKind::Le {
                continue;
            }
            out.push(LinearRateConstraint::new(a, b, r.rhs)?);
            if r.kind == RowKind::Eq {
                out.push(LinearRateConstraint::new(-a, -b, -r.rhs)?);
            }
        }
        Ok(out)
    }
}

/// Fourier–Motzkin elimination of `eliminate`, in order. Equality rows that
/// contain the variable are used for substitution; otherwise every positive
/// row is paired with every negative row. Redundant rows are pruned after
/// each step.
pub fn fme_project(h: &HPolyhedron, eliminate: &[&str]) -> Result<HPolyhedron> {
    let mut cur = h.clone();
    for name in eliminate {
        let j = cur.col(name)?;
        let eq_pos = cur
            .rows
            .iter()
            .position(|r| r.kind == RowKind::Eq && r.coeffs[j] != 0);
        let mut next: Vec<Row> = Vec::new();
        if let Some(e) = eq_pos {
            let mut eq = cur.rows[e].clone();
            if eq.coeffs[j] < 0 {
                for c in &mut eq.coeffs {
                    *c = -*c;
                }
                eq.rhs = -eq.rhs;
            }
            let ae = eq.coeffs[j];
            for (k, r) in cur.rows.iter().enumerate() {
                if k == e {
                    continue;
                }
                let ar = r.coeffs[j];
                if ar == 0 {
                    next.push(r.clone());
                } else {
                    next.push(combine(r, ae, &eq, -ar, r.kind)?);
                }
            }
        } else {
            let (pos, rest): (Vec<&Row>, Vec<&Row>) = cur.rows.iter().partition(|r| r.coeffs[j] > 0);
            let (neg, zero): (Vec<&Row>, Vec<&Row>) = rest.into_iter().partition(|r| r.coeffs[j] < 0);
            next.extend(zero.into_iter().cloned());
            for p in &pos {
                for n in &neg {
                    let (a, b) = (p.coeffs[j], -n.coeffs[j]);
                    next.push(combine(p, b, n, a, RowKind::Le)?);
                }
            }
        }
        for r in &mut next {
            r.coeffs.remove(j);
        }
        let mut labels = cur.labels.clone();
        labels.remove(j);
        cur = HPolyhedron { labels, rows: next, synthetic_box: cur.synthetic_box };
        cur.prune()?;
    }
    Ok(cur)
}

/// Projection onto `keep` by enumerating every vertex of `h` (after adding
/// box bounds on unbounded coordinates) and taking the convex hull.
pub fn project_by_vertices(h: &HPolyhedron, keep: [&str; 2]) -> Result<RatePolytope> {
    let d = h.dim();
    if d > MAX_VERTEX_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_VERTEX_DIM));
    }
    let kx = h.col(keep[0])?;
    let ky = h.col(keep[1])?;
    if !h.is_feasible() {
        return Err(Error::Infeasible);
    }
    let mut hb = h.with_box_bounds()?;
    hb.prune()?;
    let eqs: Vec<&Row> = hb.rows.iter().filter(|r| r.kind == RowKind::Eq).collect();
    let les: Vec<&Row> = hb.rows.iter().filter(|r| r.kind == RowKind::Le).collect();

    let (x0, basis) = equality_param(&eqs, d)?;
    let k = basis.ncols();
    // Inequalities restated in the free coordinates: `(a N) z <= b - a x0`.
    let a_full = DMatrix::from_fn(les.len(), d, |r, c| les[r].coeffs[c] as f64);
    let a_red = &a_full * &basis;
    let b_red = DVector::from_iterator(les.len(), les.iter().map(|r| r.rhs)) - &a_full * &x0;
    let scale = a_red.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    let mut pts: Vec<Point> = Vec::new();
    if k == 0 && hb.is_satisfied(x0.as_slice(), FEAS_TOL) {
        pts.push([x0[kx], x0[ky]]);
    }
    for subset in (0..les.len()).combinations(k).filter(|_| k > 0) {
        let a = DMatrix::from_fn(k, k, |r, c| a_red[(subset[r], c)]);
        let b = DVector::from_iterator(k, subset.iter().map(|&r| b_red[r]));
        let lu = a.clone().lu();
        // Reject nearly singular picks whose solution is numerically meaningless.
        if lu.determinant().abs() <= 1e-12 * scale.powi(k as i32) {
            continue;
        }
        let Some(z) = lu.solve(&b) else { continue };
        let lhs = &a_red * &z;
        let inside = (0..les.len()).all(|r| lhs[r] <= b_red[r] + FEAS_TOL * (1.0 + les[r].rhs.abs()));
        if inside {
            let x = &x0 + &basis * &z;
            if hb.is_satisfied(x.as_slice(), FEAS_TOL) {
                pts.push([x[kx], x[ky]]);
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Empty);
    }
    let hull = hull_polytope(&pts)?;
    Ok(RatePolytope::new(
        hull.constraints
            .into_iter()
            .filter(|c| !(c.coeff_p <= 1e-12 && c.coeff_c <= 1e-12 && c.rhs >= -1e-12))
            .collect(),
    ))
}

/// Solves the equality rows by row reduction: every solution is `x0 + N z`.
fn equality_param(eqs: &[&Row], d: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let mut m = DMatrix::from_fn(eqs.len(), d + 1, |r, c| if c < d { eqs[r].coeffs[c] as f64 } else { eqs[r].rhs });
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        if row == eqs.len() {
            break;
        }
        let Some(p) = (row..eqs.len()).max_by(|&a, &b| m[(a, col)].abs().total_cmp(&m[(b, col)].abs())) else { break };
        if m[(p, col)].abs() < 1e-12 {
            continue;
        }
        m.swap_rows(row, p);
        let piv = m[(row, col)];
        for c in 0..=d {
            m[(row, c)] /= piv;
        }
        for r in 0..eqs.len() {
            if r != row && m[(r, col)] != 0.0 {
                let f = m[(r, col)];
                for c in 0..=d {
                    m[(r, c)] -= f * m[(row, c)];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..eqs.len() {
        if m[(r, d)].abs() > FEAS_TOL * (1.0 + eqs[r].rhs.abs()) {
            return Err(Error::Infeasible);
        }
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let mut x0 = DVector::zeros(d);
    let mut basis = DMatrix::zeros(d, free.len());
    for (r, &pc) in pivots.iter().enumerate() {
        x0[pc] = m[(r, d)];
        for (j, &fc) in free.iter().enumerate() {
            basis[(pc, j)] = -m[(r, fc)];
        }
    }
    for (j, &fc) in free.iter().enumerate() {
        basis[(fc, j)] = 1.0;
    }
    Ok((x0, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::set_equal;

    #[test]
    fn eliminate_bridge_variable() {
        let mut h = HPolyhedron::new(&["x", "z"]).unwrap();
        h.add_le(&[("z", 1)], 3.0).unwrap();
        h.add_le(&[("z", -1)], -1.0).unwrap();
        h.add_le(&[("x", 1), ("z", -1)], 0.0).unwrap();
        let p = fme_project(&h, &["z"]).unwrap();
        assert_eq!(p.labels, vec!["x".to_string()]);
        assert_eq!(p.rows, vec![Row { coeffs: vec![1], rhs: 3.0, kind: RowKind::Le }]);
    }

    #[test]
    fn eliminate_free_coordinate() {
        let mut h = HPolyhedron::new(&["x", "y", "z"]).unwrap();
        h.add_le(&[("x", 1)], 1.0).unwrap();
        h.add_le(&[("y", 1)], 1.0).unwrap();
        h.add_le(&[("z", 1)], 5.0).unwrap();
        h.add_le(&[("z", -1)], 0.0).unwrap();
        let p = fme_project(&h, &["z"]).unwrap();
        let mut rows = p.rows.clone();
        rows.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
        assert_eq!(
            rows,
            vec![
                Row { coeffs: vec![0, 1], rhs: 1.0, kind: RowKind::Le },
                Row { coeffs: vec![1, 0], rhs: 1.0, kind: RowKind::Le },
            ]
        );
    }

    #[test]
    fn contradictory_pair_detected() {
        let mut h = HPolyhedron::new(&["x", "z"]).unwrap();
        h.add_le(&[("z", 1)], 1.0).unwrap();
        h.add_le(&[("z", -1)], -2.0).unwrap();
        h.add_le(&[("x", 1)], 1.0).unwrap();
        assert_eq!(fme_project(&h, &["z"]), Err(Error::Infeasible));
    }

    #[test]
    fn equality_substitution() {
        // R = a + b, a <= 1, b <= 2, a, b >= 0  =>  0 <= R <= 3.
        let mut h = HPolyhedron::new(&["R", "a", "b"]).unwrap();
        h.add_eq(&[("R", 1), ("a", -1), ("b", -1)], 0.0).unwrap();
        h.add_le(&[("a", 1)], 1.0).unwrap();
        h.add_le(&[("b", 1)], 2.0).unwrap();
        h.add_nonneg("a").unwrap();
        h.add_nonneg("b").unwrap();
        let p = fme_project(&h, &["a", "b"]).unwrap();
        assert_eq!(p.support(&[1.0]).unwrap(), Some(3.0));
        assert_eq!(p.support(&[-1.0]).unwrap(), Some(0.0));
        assert_eq!(p.rows.len(), 2);
    }

    #[test]
    fn unit_cube_slice() {
        let mut h = HPolyhedron::new(&["x", "y", "z"]).unwrap();
        for v in ["x", "y"] {
            h.add_le(&[(v, 1)], 1.0).unwrap();
            h.add_nonneg(v).unwrap();
        }
        h.add_le(&[("z", 2)], 1.0).unwrap();
        h.add_nonneg("z").unwrap();
        let p = project_by_vertices(&h, ["x", "y"]).unwrap();
        let square = RatePolytope::new(vec![
            LinearRateConstraint::new(1.0, 0.0, 1.0).unwrap(),
            LinearRateConstraint::new(0.0, 1.0, 1.0).unwrap(),
        ]);
        assert!(set_equal(&p, &square, 1e-12).unwrap());
        assert!(!h.with_box_bounds().unwrap().synthetic_box);
    }

    #[test]
    fn simplex_shadow() {
        let mut h = HPolyhedron::new(&["x", "y", "z"]).unwrap();
        h.add_le(&[("x", 1), ("y", 1), ("z", 1)], 1.0).unwrap();
        for v in ["x", "y", "z"] {
            h.add_nonneg(v).unwrap();
        }
        let p = project_by_vertices(&h, ["x", "y"]).unwrap();
        let tri = RatePolytope::new(vec![LinearRateConstraint::new(1.0, 1.0, 1.0).unwrap()]);
        assert!(set_equal(&p, &tri, 1e-12).unwrap());
        let f = fme_project(&h, &["z"]).unwrap().to_rate_polytope().unwrap();
        assert!(set_equal(&f, &tri, 1e-12).unwrap());
    }

    #[test]
    fn unbounded_coordinate_gets_box() {
        let mut h = HPolyhedron::new(&["x", "y", "z"]).unwrap();
        h.add_le(&[("x", 1), ("z", -1)], 1.0).unwrap();
        h.add_le(&[("y", 1)], 1.0).unwrap();
        h.add_nonneg("x").unwrap();
        h.add_nonneg("y").unwrap();
        h.add_nonneg("z").unwrap();
        let b = h.with_box_bounds().unwrap();
        assert!(b.synthetic_box);
        assert_eq!(b.rows.len(), h.rows.len() + 2);
    }

    #[test]
    fn dimension_limit() {
        let labels: Vec<String> = (0..11).map(|k| format!("x{k}")).collect();
        let h = HPolyhedron::new(&labels).unwrap();
        assert_eq!(project_by_vertices(&h, ["x0", "x1"]), Err(Error::DimensionTooLarge(11, 10)));
    }
}
