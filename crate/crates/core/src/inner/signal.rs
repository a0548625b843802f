//! Gaussian signal model of the binning scheme and its raw decoding
//! constraints, before projection onto `(R1, R2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dpc::dpc_coefficients;
use super::{PowerSplit, Scheme};
use crate::channel::ChannelParams;
use crate::error::Result;
use crate::gaussian::{conditional_mi, re, CovSpec, LinearModel};
use crate::polytope::HPolyhedron;

/// Rate variables of the raw system. The last two are the binning rates.
pub const RATE_VARS: [&str; 10] = [
    "R1", "R2", "r10c", "r11c", "r10n", "r11n", "r20n", "r22n", "r20n_bin", "r22n_bin",
];

/// Split rates eliminated when projecting onto `(R1, R2)`.
pub const SPLIT_VARS: [&str; 8] = [
    "r10c", "r11c", "r10n", "r11n", "r20n", "r22n", "r20n_bin", "r22n_bin",
];

/// How a decoding constraint is penalized by the binning rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    None,
    /// `-(r20n' - I(U2;S1))`.
    Common,
    /// `-(r20n' + r22n')`.
    Both,
    /// `-r22n'`.
    Private,
}

/// One row `sum(rates) <= I(observed; targets | given) - penalty`.
#[derive(Debug, Clone, Copy)]
pub struct DecodingTerm {
    pub name: &'static str,
    pub rates: &'static [&'static str],
    pub observed: &'static str,
    pub targets: &'static [&'static str],
    pub given: &'static [&'static str],
    pub penalty: Penalty,
}

macro_rules! term {
    ($name:literal, [$($r:literal),*], $obs:literal, [$($t:literal),*], [$($g:literal),*], $pen:ident) => {
        DecodingTerm {
            name: $name,
            rates: &[$($r),*],
            observed: $obs,
            targets: &[$($t),*],
            given: &[$($g),*],
            penalty: Penalty::$pen,
        }
    };
}

/// The eighteen decoding constraints at the cognitive transmitter (`Tf`),
/// the primary receiver (`Yp`) and the cognitive receiver (`Yc`).
pub const DECODING_TERMS: [DecodingTerm; 18] = [
    term!("c1", ["r10c", "r11c"], "Tf", ["Z1", "V1"], ["U2", "T2", "Xc", "S1"], None),
    term!("c2", ["r11c"], "Tf", ["Z1"], ["U2", "T2", "Xc", "S1", "V1"], None),
    term!("c3", ["r10c", "r10n", "r11n", "r20n", "r11c"], "Yp", ["V1", "U1", "T1", "S1", "Z1", "U2"], [], Common),
    term!("c4", ["r10n", "r11n", "r20n", "r11c"], "Yp", ["U1", "T1", "S1", "Z1", "U2"], ["V1"], Common),
    term!("c5", ["r10n", "r11n", "r11c"], "Yp", ["U1", "T1", "S1", "Z1"], ["V1", "U2"], None),
    term!("c6", ["r11n", "r20n", "r11c"], "Yp", ["T1", "S1", "Z1", "U2"], ["V1", "U1"], Common),
    term!("c7", ["r10n", "r11n", "r20n"], "Yp", ["U1", "T1", "U2"], ["S1", "Z1", "V1"], Common),
    term!("c8", ["r11n", "r11c"], "Yp", ["T1", "S1", "Z1"], ["V1", "U1", "U2"], None),
    term!("c9", ["r20n", "r11c"], "Yp", ["S1", "Z1", "U2"], ["V1", "U1", "T1"], Common),
    term!("c10", ["r10n", "r11n"], "Yp", ["U1", "T1"], ["S1", "Z1", "V1", "U2"], None),
    term!("c11", ["r11n", "r20n"], "Yp", ["T1", "U2"], ["S1", "Z1", "V1", "U1"], Common),
    term!("c12", ["r11c"], "Yp", ["S1", "Z1"], ["V1", "U1", "T1", "U2"], None),
    term!("c13", ["r11n"], "Yp", ["T1"], ["S1", "Z1", "V1", "U1", "U2"], None),
    term!("c14", ["r10c", "r20n", "r22n", "r10n"], "Yc", ["U2", "T2", "V1", "U1"], [], Both),
    term!("c15", ["r20n", "r22n", "r10n"], "Yc", ["U2", "T2", "U1"], ["V1"], Both),
    term!("c16", ["r20n", "r22n"], "Yc", ["U2", "T2"], ["V1", "U1"], Both),
    term!("c17", ["r22n", "r10n"], "Yc", ["T2", "U1"], ["U2", "V1"], Private),
    term!("c18", ["r22n"], "Yc", ["T2"], ["U2", "V1", "U1"], Private),
];

/// Whether the binning rates are pinned to their minimum or left free above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BinningMode {
    #[default]
    Equality,
    Inequality,
}

/// Covariance of every auxiliary, input and output of the scheme.
pub fn signal_model(p: &ChannelParams, s: &PowerSplit, scheme: Scheme) -> Result<CovSpec> {
    p.validate()?;
    s.check_scheme(scheme)?;
    let mut m = LinearModel::new();
    let amp = |x: f64| re(x.sqrt());
    match scheme {
        Scheme::E1 => {
            for v in ["U1", "V1", "T1", "U2", "T2"] {
                m.source(v);
            }
            m.combine("Xp", &[("U1", amp(s.a1)), ("V1", amp(s.b1)), ("T1", amp(s.c1))])?;
            m.combine("Xc", &[("U2", amp(s.a2)), ("T2", amp(s.b2))])?;
        }
        Scheme::E2 => {
            let d = dpc_coefficients(p, s)?;
            for v in ["S1", "V1", "Z1", "T1", "U2p", "T2p"] {
                m.source(v);
            }
            m.combine("U2", &[("U2p", re(1.0)), ("S1", d.lambda_u)])?;
            m.combine("T2", &[("T2p", re(1.0)), ("S1", d.lambda_t)])?;
            m.combine(
                "Xp",
                &[
                    ("S1", Complex64::from_polar(s.a1.sqrt(), p.theta_c)),
                    ("V1", amp(s.b1)),
                    ("Z1", amp(s.c1)),
                    ("T1", amp(s.d1)),
                ],
            )?;
            m.combine("Xc", &[("S1", amp(s.a2)), ("U2p", amp(s.b2)), ("T2p", amp(s.c2))])?;
        }
    }
    for z in ["Zf", "Zp", "Zc"] {
        m.source(z);
    }
    m.combine("Tf", &[("Xp", re(p.coop.sqrt())), ("Zf", re(1.0))])?;
    m.combine(
        "Yp",
        &[
            ("Xp", re(p.snr_p.sqrt())),
            ("Xc", Complex64::from_polar(p.inr_c.sqrt(), p.theta_c)),
            ("Zp", re(1.0)),
        ],
    )?;
    m.combine(
        "Yc",
        &[
            ("Xp", Complex64::from_polar(p.inr_p.sqrt(), p.theta_p)),
            ("Xc", re(p.snr_c.sqrt())),
            ("Zc", re(1.0)),
        ],
    )?;
    m.cov_spec()
}

fn present<'a>(spec: &CovSpec, names: &[&'a str]) -> Vec<&'a str> {
    names.iter().copied().filter(|n| spec.labels().iter().any(|l| l == n)).collect()
}

/// `I(observed; targets | given)` with auxiliaries absent from the scheme dropped.
pub fn scheme_mi(spec: &CovSpec, observed: &str, targets: &[&str], given: &[&str]) -> Result<f64> {
    conditional_mi(spec, &present(spec, targets), &[observed], &present(spec, given))
}

/// Binning rates `(I(U2;S1), I(S1;T2|U2))`; both vanish without `S1`.
pub fn binning_rates(spec: &CovSpec) -> Result<(f64, f64)> {
    if present(spec, &["S1"]).is_empty() {
        return Ok((0.0, 0.0));
    }
    Ok((
        conditional_mi(spec, &["U2"], &["S1"], &[])?,
        conditional_mi(spec, &["T2"], &["S1"], &["U2"])?,
    ))
}

/// A decoding constraint evaluated on the signal model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluatedTerm {
    pub name: String,
    pub mi: f64,
    /// Right-hand side once the binning rates are fixed at their minimum.
    pub rhs: f64,
}

/// Every decoding constraint mutual information, plus the binning rates.
pub fn evaluate_terms(
    p: &ChannelParams,
    s: &PowerSplit,
    scheme: Scheme,
) -> Result<(Vec<EvaluatedTerm>, (f64, f64))> {
    let spec = signal_model(p, s, scheme)?;
    let (b20, b22) = binning_rates(&spec)?;
    let terms = DECODING_TERMS
        .iter()
        .map(|t| {
            let mi = scheme_mi(&spec, t.observed, t.targets, t.given)?;
            let rhs = match t.penalty {
                Penalty::None | Penalty::Common => mi,
                Penalty::Both => mi - b20 - b22,
                Penalty::Private => mi - b22,
            };
            Ok(EvaluatedTerm { name: t.name.to_owned(), mi, rhs })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((terms, (b20, b22)))
}

/// The raw linear system over [`RATE_VARS`]: decoding constraints, the
/// rate-composition equalities, binning rates and nonnegativity. Split rates
/// of messages the scheme does not send are pinned at zero.
pub fn raw_constraint_system(
    p: &ChannelParams,
    s: &PowerSplit,
    scheme: Scheme,
    mode: BinningMode,
) -> Result<HPolyhedron> {
    let spec = signal_model(p, s, scheme)?;
    let (b20, b22) = binning_rates(&spec)?;
    let mut h = HPolyhedron::new(&RATE_VARS)?;
    for t in &DECODING_TERMS {
        let mi = scheme_mi(&spec, t.observed, t.targets, t.given)?;
        let mut row: Vec<(&str, i64)> = t.rates.iter().map(|&r| (r, 1)).collect();
        let rhs = match t.penalty {
            Penalty::None => mi,
            Penalty::Common => {
                row.push(("r20n_bin", 1));
                mi + b20
            }
            Penalty::Both => {
                row.push(("r20n_bin", 1));
                row.push(("r22n_bin", 1));
                mi
            }
            Penalty::Private => {
                row.push(("r22n_bin", 1));
                mi
            }
        };
        h.add_le(&row, rhs)?;
    }
    h.add_eq(&[("R1", 1), ("r10c", -1), ("r11c", -1), ("r10n", -1), ("r11n", -1)], 0.0)?;
    h.add_eq(&[("R2", 1), ("r20n", -1), ("r22n", -1)], 0.0)?;
    match mode {
        BinningMode::Equality => {
            h.add_eq(&[("r20n_bin", 1)], b20)?;
            h.add_eq(&[("r22n_bin", 1)], b22)?;
        }
        BinningMode::Inequality => {
            h.add_le(&[("r20n_bin", -1), ("r22n_bin", -1)], -(b20 + b22))?;
            h.add_le(&[("r20n_bin", -1)], -b20)?;
        }
    }
    match scheme {
        Scheme::E1 => h.add_eq(&[("r11c", 1)], 0.0)?,
        Scheme::E2 => h.add_eq(&[("r10n", 1)], 0.0)?,
    }
    for v in SPLIT_VARS {
        h.add_nonneg(v)?;
    }
    h.add_nonneg("R1")?;
    h.add_nonneg("R2")?;
    Ok(h)
}
