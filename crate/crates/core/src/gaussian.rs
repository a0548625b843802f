//! Conditional mutual information between jointly circularly-symmetric complex
//! Gaussian vectors.
//!
//! Rates are in bits and follow the complex convention
//! `I(X;Y) = log2 det(Sigma_Y) - log2 det(Sigma_{Y|X})` without a one-half factor.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const PSD_TOL: f64 = 1e-10;
/// A residual variance below this fraction of the variable's own variance is
/// treated as a deterministic function of what has already been conditioned on.
const PIVOT_TOL: f64 = 1e-11;

/// `log2(1 + x)` without input checks.
#[inline]
pub fn lg(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// `log2(1 + x)` for a nonnegative gain ratio.
pub fn log_term(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("log_term needs x >= 0, got {x}")));
    }
    Ok(lg(x))
}

/// Labelled Hermitian PSD covariance matrix.
#[derive(Debug, Clone)]
pub struct CovSpec {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    cov: DMatrix<Complex64>,
}

impl CovSpec {
    pub fn new(labels: Vec<String>, cov: DMatrix<Complex64>) -> Result<Self> {
        let n = labels.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "covariance is {}x{} but {} labels were given",
                cov.nrows(),
                cov.ncols(),
                n
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (k, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), k).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let scale = (0..n).map(|k| cov[(k, k)].re.abs()).fold(1.0, f64::max);
        for r in 0..n {
            for c in r..n {
                if (cov[(r, c)] - cov[(c, r)].conj()).norm() > 1e-9 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "covariance is not Hermitian at ({r}, {c})"
                    )));
                }
            }
        }
        if n > 0 {
            let herm = (&cov + cov.adjoint()).scale(0.5);
            let min_eig = SymmetricEigen::new(herm).eigenvalues.min();
            if min_eig < -PSD_TOL * scale {
                return Err(Error::NotPsd(min_eig));
            }
        }
        Ok(Self { labels, index, cov })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn indices(&self, set: &[&str]) -> Result<Vec<usize>> {
        set.iter()
            .map(|l| self.index.get(*l).copied().ok_or_else(|| Error::UnknownLabel((*l).into())))
            .collect()
    }
}

/// Result of a conditional MI evaluation together with the number of
/// conditioning or observed directions skipped because they were determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiValue {
    pub bits: f64,
    pub skipped_pivots: usize,
}

/// Running Schur complement: conditions a covariance matrix on one variable at a time.
#[derive(Clone)]
struct Conditioner {
    m: DMatrix<Complex64>,
    base_var: Vec<f64>,
    skipped: usize,
}

impl Conditioner {
    fn new(m: DMatrix<Complex64>) -> Self {
        let base_var = (0..m.nrows()).map(|k| m[(k, k)].re).collect();
        Self { m, base_var, skipped: 0 }
    }

    fn residual(&self, k: usize) -> f64 {
        self.m[(k, k)].re
    }

    fn is_determined(&self, k: usize) -> bool {
        self.residual(k) <= PIVOT_TOL * self.base_var[k].max(1e-300)
    }

    /// Conditions on variable `k`; returns false (and does nothing) when `k` is
    /// already determined.
    fn condition(&mut self, k: usize) -> bool {
        if self.is_determined(k) {
            self.skipped += 1;
            return false;
        }
        let pivot = self.m[(k, k)].re;
        let col = self.m.column(k).clone_owned();
        let n = self.m.nrows();
        for r in 0..n {
            for c in 0..n {
                let upd = col[r] * col[c].conj() / pivot;
                self.m[(r, c)] -= upd;
            }
        }
        true
    }
}

/// `I(targets; observed | given)` in bits together with pivot diagnostics.
pub fn conditional_mi_detailed(
    spec: &CovSpec,
    targets: &[&str],
    observed: &[&str],
    given: &[&str],
) -> Result<MiValue> {
    let t = spec.indices(targets)?;
    let o = spec.indices(observed)?;
    let g = spec.indices(given)?;
    let mut without = Conditioner::new(spec.cov.clone());
    for &k in &g {
        without.condition(k);
    }
    let mut with = without.clone();
    for &k in &t {
        with.condition(k);
    }

    let mut bits = 0.0;
    for &k in &o {
        if without.is_determined(k) {
            without.skipped += 1;
            continue;
        }
        if with.is_determined(k) {
            return Err(Error::Singular(format!(
                "observed `{}` is determined by the targets, mutual information is unbounded",
                spec.labels[k]
            )));
        }
        bits += (without.residual(k) / with.residual(k)).log2();
        without.condition(k);
        with.condition(k);
    }
    Ok(MiValue {
        bits: bits.max(0.0),
        skipped_pivots: without.skipped + with.skipped,
    })
}

/// `I(targets; observed | given)` in bits.
pub fn conditional_mi(
    spec: &CovSpec,
    targets: &[&str],
    observed: &[&str],
    given: &[&str],
) -> Result<f64> {
    conditional_mi_detailed(spec, targets, observed, given).map(|v| v.bits)
}

/// Builds a covariance from named linear combinations of independent,
/// unit-variance circularly-symmetric sources.
#[derive(Debug, Clone, Default)]
pub struct LinearModel {
    n_sources: usize,
    names: Vec<String>,
    rows: Vec<Vec<Complex64>>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a fresh independent unit-variance variable.
    pub fn source(&mut self, name: &str) -> &mut Self {
        self.n_sources += 1;
        for r in &mut self.rows {
            r.push(Complex64::new(0.0, 0.0));
        }
        let mut row = vec![Complex64::new(0.0, 0.0); self.n_sources];
        row[self.n_sources - 1] = Complex64::new(1.0, 0.0);
        self.names.push(name.to_owned());
        self.rows.push(row);
        self
    }

    /// Adds `name = sum coeff * term`, where each term is an existing variable.
    pub fn combine(&mut self, name: &str, terms: &[(&str, Complex64)]) -> Result<&mut Self> {
        let mut row = vec![Complex64::new(0.0, 0.0); self.n_sources];
        for (label, coeff) in terms {
            let k = self
                .names
                .iter()
                .position(|n| n == label)
                .ok_or_else(|| Error::UnknownLabel((*label).into()))?;
            for (acc, v) in row.iter_mut().zip(&self.rows[k]) {
                *acc += coeff * v;
            }
        }
        self.names.push(name.to_owned());
        self.rows.push(row);
        Ok(self)
    }

    pub fn cov_spec(&self) -> Result<CovSpec> {
        let n = self.names.len();
        let mut cov = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for r in 0..n {
            for c in 0..n {
                cov[(r, c)] = self.rows[r]
                    .iter()
                    .zip(&self.rows[c])
                    .map(|(a, b)| a * b.conj())
                    .sum();
            }
        }
        CovSpec::new(self.names.clone(), cov)
    }
}

/// Shorthand for a real coefficient.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn awgn(snr: f64) -> CovSpec {
        let mut m = LinearModel::new();
        m.source("X").source("Z");
        m.combine("Y", &[("X", re(snr.sqrt())), ("Z", re(1.0))]).unwrap();
        m.cov_spec().unwrap()
    }

    #[test]
    fn log_term_values() {
        assert_eq!(log_term(0.0).unwrap(), 0.0);
        assert_eq!(log_term(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(log_term(3.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(log_term(-0.5).is_err());
    }

    #[test]
    fn point_to_point() {
        let s = awgn(1.0);
        assert_abs_diff_eq!(conditional_mi(&s, &["X"], &["Y"], &[]).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(conditional_mi(&s, &["X"], &["Y"], &["X"]).unwrap(), 0.0);
        assert_abs_diff_eq!(conditional_mi(&s, &["Z"], &["Y"], &[]).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn conditioning_on_target_gives_zero() {
        let s = awgn(10.0);
        // X is in `given`, so asking about a disjoint copy is the meaningful form:
        let mut m = LinearModel::new();
        m.source("X").source("Z");
        m.combine("Y", &[("X", re(3.0)), ("Z", re(1.0))]).unwrap();
        m.combine("X2", &[("X", re(1.0))]).unwrap();
        let spec = m.cov_spec().unwrap();
        assert_abs_diff_eq!(conditional_mi(&spec, &["X2"], &["Y"], &["X"]).unwrap(), 0.0, epsilon = 1e-12);
        assert!(conditional_mi(&s, &["X"], &["Y"], &["Z"]).is_err());
    }

    #[test]
    fn unbounded_and_unknown_rejected() {
        let s = awgn(1.0);
        assert!(matches!(conditional_mi(&s, &["X"], &["X"], &[]), Err(Error::Singular(_))));
        assert!(matches!(conditional_mi(&s, &["W"], &["Y"], &[]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn rejects_non_psd_and_duplicates() {
        let m = DMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(2.0), re(1.0)]);
        assert!(matches!(CovSpec::new(vec!["a".into(), "b".into()], m.clone()), Err(Error::NotPsd(_))));
        let id = DMatrix::identity(2, 2);
        assert!(matches!(
            CovSpec::new(vec!["a".into(), "a".into()], id),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn deterministic_given_is_skipped() {
        // X2 = X + W is a function of (X, W); conditioning on all three is exact.
        let mut m = LinearModel::new();
        m.source("X").source("W").source("Z");
        m.combine("X2", &[("X", re(1.0)), ("W", re(0.5))]).unwrap();
        m.combine("Y", &[("X", re(2.0)), ("W", re(1.0)), ("Z", re(1.0))]).unwrap();
        let spec = m.cov_spec().unwrap();
        let v = conditional_mi_detailed(&spec, &["X"], &["Y"], &["W", "X2"]).unwrap();
        assert_eq!(v.skipped_pivots, 1);
        // Given W and X2, X is known, so Y carries nothing new about X.
        assert_abs_diff_eq!(v.bits, 0.0, epsilon = 1e-12);
        let v = conditional_mi(&spec, &["X"], &["Y"], &["W"]).unwrap();
        assert_abs_diff_eq!(v, lg(4.0), epsilon = 1e-12);
    }

    fn random_spec(rng: &mut ChaCha8Rng, n_src: usize, n_var: usize) -> CovSpec {
        let mut m = LinearModel::new();
        for k in 0..n_src {
            m.source(&format!("s{k}"));
        }
        for v in 0..n_var {
            let terms: Vec<(String, Complex64)> = (0..n_src)
                .map(|k| (format!("s{k}"), Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
                .collect();
            let refs: Vec<(&str, Complex64)> = terms.iter().map(|(n, c)| (n.as_str(), *c)).collect();
            m.combine(&format!("v{v}"), &refs).unwrap();
        }
        m.cov_spec().unwrap()
    }

    proptest! {
        #[test]
        fn chain_rule_and_monotonicity(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Full-rank: 6 sources, 4 variables.
            let spec = random_spec(&mut rng, 6, 4);
            let t = ["v0"]; let a = ["v1"]; let b = ["v2"]; let g = ["v3"];
            let ab = conditional_mi(&spec, &t, &["v1", "v2"], &g).unwrap();
            let ia = conditional_mi(&spec, &t, &a, &g).unwrap();
            let ib = conditional_mi(&spec, &t, &b, &["v3", "v1"]).unwrap();
            prop_assert!((ab - ia - ib).abs() < 1e-9);
            prop_assert!(ia >= 0.0 && ib >= 0.0);
            prop_assert!(ab + 1e-12 >= ia);
        }

        #[test]
        fn symmetry(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = random_spec(&mut rng, 5, 3);
            let x = conditional_mi(&spec, &["v0"], &["v1"], &["v2"]).unwrap();
            let y = conditional_mi(&spec, &["v1"], &["v0"], &["v2"]).unwrap();
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
