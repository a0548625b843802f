//! Outer bounds on the capacity region.
//!
//! [`outer_symmetric`] is the eight-constraint symmetric region, already
//! maximized over the input correlation. [`outer_general_rho`] evaluates the
//! same eight bounds at a fixed correlation `rho = E[Xp Xc^*]` for arbitrary
//! gains and phases; it only serves to check that the symmetric forms
//! dominate every `rho`. [`outer_regime`] returns the looser per-regime
//! relaxations used in the gap proofs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{delta_threshold, ChannelParams, Regime};
use crate::error::{Error, Result};
use crate::gaussian::lg;
use crate::polytope::{LinearRateConstraint, RatePolytope};

/// `log2(3)`.
pub const LOG3: f64 = 1.584_962_500_721_156_3;

/// Relative slack used by the regime validity checks so that boundary points
/// such as `C = S / (1 + I)` are accepted.
pub const REGIME_TOL: f64 = 1e-12;

/// The eight constraints of the symmetric outer bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OuterBoundId {
    /// `Rp <= log(1 + C + S)`.
    CutsetPC,
    /// `Rp <= log(1 + (sqrt S + sqrt I)^2)`.
    CutsetPI,
    /// `Rc <= log(1 + S)`.
    CutsetC,
    /// Sum rate without cooperation.
    SumTuni,
    /// Sum rate with the cooperation gain.
    SumTuniC,
    SumPV,
    TwoPpPc,
    PpTwoPc,
}

impl OuterBoundId {
    pub const ALL: [OuterBoundId; 8] = [
        OuterBoundId::CutsetPC,
        OuterBoundId::CutsetPI,
        OuterBoundId::CutsetC,
        OuterBoundId::SumTuni,
        OuterBoundId::SumTuniC,
        OuterBoundId::SumPV,
        OuterBoundId::TwoPpPc,
        OuterBoundId::PpTwoPc,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OuterBoundId::CutsetPC => "CutsetP_C",
            OuterBoundId::CutsetPI => "CutsetP_I",
            OuterBoundId::CutsetC => "CutsetC",
            OuterBoundId::SumTuni => "SumTuni",
            OuterBoundId::SumTuniC => "SumTuniC",
            OuterBoundId::SumPV => "SumPV",
            OuterBoundId::TwoPpPc => "TwoPpPc",
            OuterBoundId::PpTwoPc => "PpTwoPc",
        }
    }

    /// Short tag `11a` ... `11h` used in compact tables.
    pub fn tag(self) -> &'static str {
        match self {
            OuterBoundId::CutsetPC => "11a",
            OuterBoundId::CutsetPI => "11b",
            OuterBoundId::CutsetC => "11c",
            OuterBoundId::SumTuni => "11d",
            OuterBoundId::SumTuniC => "11e",
            OuterBoundId::SumPV => "11f",
            OuterBoundId::TwoPpPc => "11g",
            OuterBoundId::PpTwoPc => "11h",
        }
    }

    pub fn weights(self) -> (f64, f64) {
        match self {
            OuterBoundId::CutsetPC | OuterBoundId::CutsetPI => (1.0, 0.0),
            OuterBoundId::CutsetC => (0.0, 1.0),
            OuterBoundId::SumTuni | OuterBoundId::SumTuniC | OuterBoundId::SumPV => (1.0, 1.0),
            OuterBoundId::TwoPpPc => (2.0, 1.0),
            OuterBoundId::PpTwoPc => (1.0, 2.0),
        }
    }

    /// Whether the right-hand side of the symmetric form grows with `C`.
    pub fn depends_on_coop(self) -> bool {
        matches!(
            self,
            OuterBoundId::CutsetPC
                | OuterBoundId::SumTuniC
                | OuterBoundId::SumPV
                | OuterBoundId::TwoPpPc
                | OuterBoundId::PpTwoPc
        )
    }
}

fn check_gains(gains: &[(&str, f64)]) -> Result<()> {
    for (name, g) in gains {
        if !g.is_finite() || *g < 0.0 {
            return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {g}")));
        }
    }
    Ok(())
}

fn coherent(s: f64, i: f64) -> f64 {
    let r = s.sqrt() + i.sqrt();
    r * r
}

/// Right-hand side of one symmetric bound, split as (gain part, constant).
pub fn outer_symmetric_term(id: OuterBoundId, s: f64, i: f64, c: f64) -> (f64, f64) {
    let sum_tuni = lg(s / (1.0 + i)) + lg(coherent(s, i));
    match id {
        OuterBoundId::CutsetPC => (lg(c + s), 0.0),
        OuterBoundId::CutsetPI => (lg(coherent(s, i)), 0.0),
        OuterBoundId::CutsetC => (lg(s), 0.0),
        OuterBoundId::SumTuni => (sum_tuni, 0.0),
        OuterBoundId::SumTuniC => (lg((s + c) / (1.0 + i)) + lg(coherent(s, i)), 0.0),
        OuterBoundId::SumPV => (
            lg(c + i + s / (1.0 + i)) + lg(i + s * (1.0 + c) / (1.0 + c + i)),
            2.0,
        ),
        OuterBoundId::TwoPpPc => (
            sum_tuni + lg(c / (1.0 + i + s)) + lg(i + s * (1.0 + c) / (1.0 + i + c)),
            1.0,
        ),
        OuterBoundId::PpTwoPc => (sum_tuni + lg(c + i + s / (1.0 + i)), 1.0),
    }
}

/// The symmetric outer region with gains `S`, `I`, `C`.
pub fn outer_symmetric(s: f64, i: f64, c: f64) -> Result<RatePolytope> {
    check_gains(&[("S", s), ("I", i), ("C", c)])?;
    OuterBoundId::ALL
        .iter()
        .map(|&id| {
            let (a, b) = id.weights();
            let (g, k) = outer_symmetric_term(id, s, i, c);
            LinearRateConstraint::bound(id.label(), a, b, g, k)
        })
        .collect::<Result<Vec<_>>>()
        .map(RatePolytope::new)
}

/// The eight bounds evaluated at input correlation `rho`, before any
/// maximization over `rho`. Constants are zero.
pub fn outer_general_rho(p: &ChannelParams, rho: Complex64) -> Result<RatePolytope> {
    p.validate()?;
    if !(rho.norm() <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("|rho| must be <= 1, got {}", rho.norm())));
    }
    let x = (1.0 - rho.norm_sqr()).max(0.0);
    let (sp, sc, ip, ic, c) = (p.snr_p, p.snr_c, p.inr_p, p.inr_c, p.coop);
    let r_c = (rho * Complex64::from_polar(1.0, -p.theta_c)).re;
    let r_p = (rho * Complex64::from_polar(1.0, p.theta_p)).re;
    // Received power at each receiver, including the correlation term.
    let pow_p = sp + ic + 2.0 * (sp * ic).sqrt() * r_c;
    let pow_c = sc + ip + 2.0 * (sc * ip).sqrt() * r_p;

    let values = [
        lg((c + sp) * x),
        lg(pow_p),
        lg(x * sc),
        lg(sc * x / (1.0 + ic * x)) + lg(pow_p),
        lg((sp + c) * x / (1.0 + ip * x)) + lg(pow_c),
        lg((pow_p + x * (ip * ic + c * ic)) / (1.0 + c + ip))
            + lg((pow_c + x * (ip * ic + c * sc)) / (1.0 + c + ic + ic * c * x))
            + lg((c + c * ic * x) / (1.0 + ic)),
        lg(pow_p)
            + lg(sp * x / (1.0 + (c + ip) * x))
            + lg((c + pow_c + x * (ip * ic + c * sc + ic * c)) / (1.0 + ic)),
        lg(pow_c)
            + lg(sc * x / (1.0 + ic * x))
            + lg((pow_p + x * (ip * ic + c * ic)) / (1.0 + c + ip))
            + lg(c / (1.0 + ip)),
    ];
    OuterBoundId::ALL
        .iter()
        .zip(values)
        .map(|(&id, v)| {
            let (a, b) = id.weights();
            LinearRateConstraint::bound(id.label(), a, b, v, 0.0)
        })
        .collect::<Result<Vec<_>>>()
        .map(RatePolytope::new)
}

fn mismatch(regime: Regime, s: f64, i: f64, c: f64, reason: &'static str) -> Error {
    Error::RegimeMismatch { regime, s, i, c, reason }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + REGIME_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Checks that `(S, I, C)` lies in the closed validity set of regime `r`.
pub fn check_regime(s: f64, i: f64, c: f64, r: Regime) -> Result<()> {
    check_gains(&[("S", s), ("I", i), ("C", c)])?;
    let green_split = i * (1.0 + i) / (1.0 + s);
    let green_top = i.max(s / (1.0 + i));
    if r.is_blue() {
        return Err(mismatch(r, s, i, c, "no regime-specialized region for the blue regimes"));
    }
    if !le(i, s) {
        return Err(mismatch(r, s, i, c, "requires I <= S"));
    }
    match r {
        Regime::GreenI if !le(c, green_split) => {
            Err(mismatch(r, s, i, c, "requires C <= I(1+I)/(1+S)"))
        }
        Regime::GreenII if !le(green_split, c) || !le(c, green_top) => Err(mismatch(
            r,
            s,
            i,
            c,
            "requires I(1+I)/(1+S) <= C <= max{I, S/(1+I)}",
        )),
        Regime::Red if !le(green_top, c) || !le(c, s) => {
            Err(mismatch(r, s, i, c, "requires max{I, S/(1+I)} <= C <= S"))
        }
        Regime::Yellow if !le(s, c) || !le(c, delta_threshold(s, i)) => {
            Err(mismatch(r, s, i, c, "requires S <= C <= Delta_th"))
        }
        _ => Ok(()),
    }
}

/// Builds a labelled region `label_prefix + letter` from `(letter, a, b, gain, constant)` rows.
pub(crate) fn labelled_region(prefix: &str, rows: &[(&str, f64, f64, f64, f64)]) -> Result<RatePolytope> {
    rows.iter()
        .map(|&(l, a, b, g, k)| LinearRateConstraint::bound(format!("{prefix}{l}"), a, b, g, k))
        .collect::<Result<Vec<_>>>()
        .map(RatePolytope::new)
}

/// Regime-specialized relaxation of the symmetric outer region.
pub fn outer_regime(s: f64, i: f64, c: f64, r: Regime) -> Result<RatePolytope> {
    check_regime(s, i, c, r)?;
    let prefix = format!("out{}", r.label_stem());
    let l_s = lg(s);
    let l_si = lg(s + i);
    let l_s1i = lg(s / (1.0 + i));
    let l_is1i = lg(i + s / (1.0 + i));
    let l_pv = lg(i + s * (1.0 + c) / (1.0 + i + c));
    let rows: Vec<(&str, f64, f64, f64, f64)> = match r {
        Regime::GreenI => vec![
            ("A", 1.0, 0.0, l_s, 1.0),
            ("B", 0.0, 1.0, l_s, 0.0),
            ("C", 1.0, 1.0, l_s1i + l_si, 1.0),
            ("D", 1.0, 1.0, 2.0 * l_is1i, 4.0),
            ("E", 2.0, 1.0, l_si + l_s1i + l_is1i, 4.0),
            ("F", 1.0, 2.0, l_si + l_s1i + l_is1i, 3.0),
        ],
        Regime::GreenII => vec![
            ("A", 1.0, 0.0, l_s, 1.0),
            ("B", 0.0, 1.0, l_s, 0.0),
            ("C", 1.0, 1.0, l_si + l_s1i, 1.0),
            ("D", 1.0, 1.0, l_is1i + l_pv, 3.0),
            ("E", 2.0, 1.0, l_s1i + l_si + l_pv, 3.0),
            ("F", 1.0, 2.0, l_is1i + l_s1i + l_si, 3.0),
        ],
        Regime::Red => vec![
            ("A", 1.0, 0.0, lg(c + s), 0.0),
            ("B", 1.0, 0.0, l_si, 1.0),
            ("C", 0.0, 1.0, l_s, 0.0),
            ("D", 1.0, 1.0, l_s1i + l_si, 1.0),
            ("E", 1.0, 2.0, l_si + l_s1i + lg(c), 2.0 + LOG3),
        ],
        Regime::Yellow => vec![
            ("A", 1.0, 0.0, lg(c), 1.0),
            ("B", 1.0, 0.0, l_si, 1.0),
            ("C", 0.0, 1.0, l_s, 0.0),
            ("E", 1.0, 1.0, l_s1i + l_si, 1.0),
        ],
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => unreachable!(),
    };
    labelled_region(&prefix, &rows)
}

/// Reference regions: the non-causal cognitive channel and the classical
/// interference channel outer bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceKind {
    NonCausalCIC,
    ClassicalIC,
}

pub fn outer_reference(s: f64, i: f64, _c: f64, kind: ReferenceKind) -> Result<RatePolytope> {
    check_gains(&[("S", s), ("I", i)])?;
    let l_s = lg(s);
    let l_s1i = lg(s / (1.0 + i));
    let l_is1i = lg(i + s / (1.0 + i));
    let l_coh = lg(coherent(s, i));
    match kind {
        ReferenceKind::NonCausalCIC => labelled_region(
            "refNC",
            &[
                ("A", 1.0, 0.0, l_coh, 0.0),
                ("B", 0.0, 1.0, l_s, 0.0),
                ("C", 1.0, 1.0, l_s1i + l_coh, 0.0),
            ],
        ),
        ReferenceKind::ClassicalIC => {
            // log((1+S)/(1+I)) written as a difference so S = I = 0 gives 0.
            let l_ratio = lg(s) - lg(i);
            let three = lg(s + i) + l_ratio + l_is1i;
            labelled_region(
                "refIC",
                &[
                    ("A", 1.0, 0.0, l_s, 2.0),
                    ("B", 0.0, 1.0, l_s, 0.0),
                    ("C", 1.0, 1.0, l_s + l_s1i, 2.0),
                    ("D", 1.0, 1.0, 2.0 * l_is1i, 4.0),
                    ("E", 2.0, 1.0, three, 5.0),
                    ("F", 1.0, 2.0, three, 4.0),
                ],
            )
        }
    }
}
