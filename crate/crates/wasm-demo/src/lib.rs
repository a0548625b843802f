//! Browser bindings: region polygons, a gap map over the exponent plane and
//! gDoF curves. Every function returns a JSON string.

use ccic_core::certify::{certify_point, gdof_estimate};
use ccic_core::channel::{classify_regime_absolute, db_to_linear, SymmetricParams};
use ccic_core::inner::inner_regime;
use ccic_core::outer::{outer_regime, outer_symmetric};
use ccic_core::polytope::{gap_detailed, Point};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Polygon {
    labels: Vec<String>,
    vertices: Vec<Point>,
}

#[derive(Serialize)]
struct Regions {
    regime: &'static str,
    outer: Polygon,
    inner: Option<Polygon>,
    gap: Option<f64>,
    binding_vertex: Option<Point>,
}

#[derive(Serialize)]
struct GapCell {
    alpha: f64,
    beta: f64,
    regime: &'static str,
    gap: Option<f64>,
    certified: bool,
}

#[derive(Serialize)]
struct GdofPoint {
    alpha: f64,
    outer: f64,
    inner: f64,
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn polygon(p: &ccic_core::polytope::RatePolytope) -> Result<Polygon, JsError> {
    Ok(Polygon {
        labels: p.constraints.iter().filter_map(|c| c.label.clone()).collect(),
        vertices: p.vertices().map_err(err)?,
    })
}

pub fn regions_value(snr_db: f64, alpha: f64, beta: f64) -> Result<String, JsError> {
    let (s, i, c) = SymmetricParams::new(db_to_linear(snr_db), alpha, beta).map_err(err)?.gains();
    let r = classify_regime_absolute(s, i, c).map_err(err)?;
    let out = if r.is_blue() {
        Regions {
            regime: r.tag(),
            outer: polygon(&outer_symmetric(s, i, c).map_err(err)?)?,
            inner: None,
            gap: None,
            binding_vertex: None,
        }
    } else {
        let outer = outer_regime(s, i, c, r).map_err(err)?;
        let inner = inner_regime(s, i, c, r).map_err(err)?.or_origin().0;
        let g = gap_detailed(&outer, &inner).map_err(err)?;
        Regions {
            regime: r.tag(),
            outer: polygon(&outer)?,
            inner: Some(polygon(&inner)?),
            gap: Some(g.gap),
            binding_vertex: Some(g.binding_vertex),
        }
    };
    serde_json::to_string(&out).map_err(err)
}

/// Outer and inner regime regions at one point, with the gap between them.
#[wasm_bindgen]
pub fn regions(snr_db: f64, alpha: f64, beta: f64) -> Result<String, JsError> {
    regions_value(snr_db, alpha, beta)
}

/// Gap certification over an `n x n` grid of `alpha in (0, 1)`, `beta in (0, 2)`.
#[wasm_bindgen]
pub fn gap_map(snr_db: f64, n: usize) -> Result<String, JsError> {
    let n = n.clamp(2, 80);
    let s = db_to_linear(snr_db);
    let mut cells = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let alpha = (a as f64 + 0.5) / n as f64;
            let beta = 2.0 * (b as f64 + 0.5) / n as f64;
            let g = certify_point(SymmetricParams::new(s, alpha, beta).map_err(err)?).map_err(err)?;
            cells.push(GapCell { alpha, beta, regime: g.regime.tag(), gap: g.gap, certified: g.certified });
        }
    }
    serde_json::to_string(&cells).map_err(err)
}

/// Extrapolated outer and inner gDoF against `alpha in [0, 2]` at fixed `beta`.
#[wasm_bindgen]
pub fn gdof_curve(beta: f64, n: usize) -> Result<String, JsError> {
    let n = n.clamp(2, 200);
    let ladder: Vec<f64> = [60.0, 80.0, 100.0, 120.0].iter().map(|&d| db_to_linear(d)).collect();
    let pts = (0..n)
        .map(|k| {
            let alpha = 2.0 * k as f64 / (n - 1) as f64;
            let g = gdof_estimate(alpha, beta, &ladder).map_err(err)?;
            Ok(GdofPoint { alpha, outer: g.outer_limit, inner: g.inner_limit })
        })
        .collect::<Result<Vec<_>, JsError>>()?;
    serde_json::to_string(&pts).map_err(err)
}
