//! Achievable regions of the superposition and binning scheme.
//!
//! Two special cases are evaluated. [`Scheme::E1`] drops the private
//! cooperative message (`S1 = Z1 = 0`) and is used in the weak cooperation
//! regimes; [`Scheme::E2`] drops the common non-cooperative message
//! (`U1 = 0`) and relies on dirty-paper binning against `S1`.

mod dpc;
mod signal;

pub use dpc::{dpc_coefficients, DpcCoefficients};
pub use signal::{
    binning_rates, evaluate_terms, raw_constraint_system, scheme_mi, signal_model, BinningMode,
    DecodingTerm, EvaluatedTerm, Penalty, DECODING_TERMS, RATE_VARS, SPLIT_VARS,
};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Regime};
use crate::error::{Error, Result};
use crate::gaussian::lg;
use crate::outer::{check_regime, labelled_region, LOG3};
use crate::polytope::RatePolytope;

const SPLIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// No private cooperative message.
    E1,
    /// No common non-cooperative message.
    E2,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::E1 => "E1",
            Scheme::E2 => "E2",
        }
    }
}

/// Power shares (squared amplitudes) of the auxiliaries.
///
/// In [`Scheme::E1`] the primary input is `a1 U1 + b1 V1 + c1 T1` and the
/// cognitive input `a2 U2 + b2 T2`, so `d1 = c2 = 0`. In [`Scheme::E2`] the
/// primary input is `a1 S1 + b1 V1 + c1 Z1 + d1 T1` and the cognitive input
/// `a2 S1 + b2 U2' + c2 T2'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl PowerSplit {
    pub fn new(primary: [f64; 4], cognitive: [f64; 3], scheme: Scheme) -> Result<Self> {
        let s = Self {
            a1: primary[0],
            b1: primary[1],
            c1: primary[2],
            d1: primary[3],
            a2: cognitive[0],
            b2: cognitive[1],
            c2: cognitive[2],
        };
        s.validate()?;
        s.check_scheme(scheme)?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a1, self.b1, self.c1, self.d1, self.a2, self.b2, self.c2];
        if let Some(x) = all.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidSplit(format!("share {x} outside [0, 1]")));
        }
        let p = self.a1 + self.b1 + self.c1 + self.d1;
        let c = self.a2 + self.b2 + self.c2;
        if (p - 1.0).abs() > SPLIT_TOL || (c - 1.0).abs() > SPLIT_TOL {
            return Err(Error::InvalidSplit(format!(
                "shares must sum to 1 per transmitter, got {p} and {c}"
            )));
        }
        Ok(())
    }

    pub fn check_scheme(&self, scheme: Scheme) -> Result<()> {
        self.validate()?;
        if scheme == Scheme::E1 && (self.d1 != 0.0 || self.c2 != 0.0) {
            return Err(Error::InvalidSplit("scheme E1 has no d1 or c2 component".into()));
        }
        Ok(())
    }

    /// Uniformly random split on the simplices of the scheme.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, scheme: Scheme) -> Self {
        let mut simplex = |n: usize| -> Vec<f64> {
            let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let t: f64 = e.iter().sum();
            let mut v: Vec<f64> = e.iter().map(|x| x / t).collect();
            // Absorb rounding so the shares sum to one exactly enough.
            let rest: f64 = v[1..].iter().sum();
            v[0] = (1.0 - rest).max(0.0);
            v
        };
        match scheme {
            Scheme::E1 => {
                let p = simplex(3);
                let c = simplex(2);
                Self { a1: p[0], b1: p[1], c1: p[2], d1: 0.0, a2: c[0], b2: c[1], c2: 0.0 }
            }
            Scheme::E2 => {
                let p = simplex(4);
                let c = simplex(3);
                Self { a1: p[0], b1: p[1], c1: p[2], d1: p[3], a2: c[0], b2: c[1], c2: c[2] }
            }
        }
    }
}

/// Split rates of one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitRateVector {
    pub r10c: f64,
    pub r11c: f64,
    pub r10n: f64,
    pub r11n: f64,
    pub r20n: f64,
    pub r22n: f64,
    pub r20n_bin: f64,
    pub r22n_bin: f64,
}

impl SplitRateVector {
    pub fn rate_p(&self) -> f64 {
        self.r10c + self.r11c + self.r10n + self.r11n
    }

    pub fn rate_c(&self) -> f64 {
        self.r20n + self.r22n
    }

    /// Coordinates in the order of [`RATE_VARS`].
    pub fn to_vector(&self) -> [f64; 10] {
        [
            self.rate_p(),
            self.rate_c(),
            self.r10c,
            self.r11c,
            self.r10n,
            self.r11n,
            self.r20n,
            self.r22n,
            self.r20n_bin,
            self.r22n_bin,
        ]
    }
}

/// Values of the two mutual information terms left unevaluated in the E2
/// region. Zero is always a valid lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InnerOptions {
    /// `I(Yc; V1)`.
    pub k1: f64,
    /// `I(Yp; S1 | V1, U2)`.
    pub k2: f64,
}

impl InnerOptions {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 >= 0.0 && k2 >= 0.0 && k1.is_finite() && k2.is_finite()) {
            return Err(Error::InvalidParameter(format!("k1, k2 must be >= 0, got {k1}, {k2}")));
        }
        Ok(Self { k1, k2 })
    }

    /// Exact values from the covariance of the E2 signal model.
    pub fn exact(p: &ChannelParams, s: &PowerSplit) -> Result<Self> {
        let spec = signal_model(p, s, Scheme::E2)?;
        let k1 = scheme_mi(&spec, "Yc", &["V1"], &[])?;
        let k2 = scheme_mi(&spec, "Yp", &["S1"], &["V1", "U2"])?;
        Self::new(k1, k2)
    }
}

/// `log2(num / den)` for `num, den >= 1`.
fn lr(num: f64, den: f64) -> f64 {
    lg(num - 1.0) - lg(den - 1.0)
}

/// One closed-form constraint: label, weights on `(Rp, Rc)`, and the decoding
/// terms (with multiplicity) whose right-hand sides it adds up.
pub type ClosedFormRow = (&'static str, (f64, f64), &'static [(&'static str, u32)]);

/// How each closed-form constraint is assembled from decoding constraints.
pub fn closed_form_terms(scheme: Scheme) -> &'static [ClosedFormRow] {
    const E1: [ClosedFormRow; 12] = [
        ("c1C1", (1.0, 0.0), &[("c3", 1)]),
        ("c2C1", (1.0, 0.0), &[("c1", 1), ("c5", 1)]),
        ("c3C1", (0.0, 1.0), &[("c16", 1)]),
        ("c4C1", (1.0, 1.0), &[("c3", 1), ("c18", 1)]),
        ("c5C1", (1.0, 1.0), &[("c8", 1), ("c14", 1)]),
        ("c6C1", (1.0, 1.0), &[("c1", 1), ("c7", 1), ("c18", 1)]),
        ("c7C1", (1.0, 1.0), &[("c1", 1), ("c8", 1), ("c15", 1)]),
        ("c8C1", (1.0, 1.0), &[("c1", 1), ("c11", 1), ("c17", 1)]),
        ("c9C1", (2.0, 1.0), &[("c1", 1), ("c8", 1), ("c3", 1), ("c17", 1)]),
        ("c10C1", (2.0, 1.0), &[("c1", 2), ("c8", 1), ("c7", 1), ("c17", 1)]),
        ("c11C1", (1.0, 2.0), &[("c11", 1), ("c17", 1), ("c14", 1)]),
        ("c12C1", (1.0, 2.0), &[("c1", 1), ("c11", 1), ("c18", 1), ("c15", 1)]),
    ];
    const E2: [ClosedFormRow; 10] = [
        ("c1C2", (1.0, 0.0), &[("c1", 1), ("c13", 1)]),
        ("c2C2", (1.0, 0.0), &[("c3", 1)]),
        ("c3C2", (0.0, 1.0), &[("c16", 1)]),
        ("c4C2", (1.0, 1.0), &[("c1", 1), ("c7", 1), ("c18", 1)]),
        ("c5C2", (1.0, 1.0), &[("c3", 1), ("c18", 1)]),
        ("c6C2", (1.0, 1.0), &[("c2", 1), ("c13", 1), ("c14", 1)]),
        ("c7C2", (1.0, 1.0), &[("c5", 1), ("c14", 1)]),
        ("c8C2", (1.0, 2.0), &[("c4", 1), ("c14", 1), ("c18", 1)]),
        ("c9C2", (1.0, 2.0), &[("c2", 1), ("c7", 1), ("c14", 1), ("c18", 1)]),
        ("c10C2", (1.0, 3.0), &[("c9", 1), ("c7", 1), ("c14", 1), ("c18", 2)]),
    ];
    match scheme {
        Scheme::E1 => &E1,
        Scheme::E2 => &E2,
    }
}

/// The projected region written out in terms of gains and power shares.
pub fn inner_closed_form(
    p: &ChannelParams,
    s: &PowerSplit,
    scheme: Scheme,
    opts: InnerOptions,
) -> Result<RatePolytope> {
    p.validate()?;
    s.check_scheme(scheme)?;
    let (sp, sc, ip, ic, c) = (p.snr_p, p.snr_c, p.inr_p, p.inr_c, p.coop);
    let values: Vec<f64> = match scheme {
        Scheme::E1 => {
            let pw = s.a1 + s.c1;
            let dp = 1.0 + ic * s.b2;
            let dc = 1.0 + ip * s.c1;
            let k_c = lr(1.0 + c, 1.0 + c * pw);
            let full_p = lr(1.0 + sp + ic, dp);
            let t1 = lg(sp * s.c1 / dp);
            let priv_c = lg(sc * s.b2 / dc);
            let cross = lg((ip * s.a1 + sc * s.b2) / dc);
            let low_p = lr(1.0 + sp * s.c1 + ic, dp);
            let mid_p = lr(1.0 + sp * pw + ic, dp);
            let full_c = lr(1.0 + sc + ip, dc);
            let rest_c = lg((sc + ip * s.a1) / dc);
            vec![
                full_p,
                k_c + lg(sp * pw / dp),
                lg(sc / dc),
                full_p + priv_c,
                t1 + full_c,
                k_c + mid_p + priv_c,
                k_c + t1 + rest_c,
                k_c + low_p + cross,
                k_c + t1 + full_p + cross,
                2.0 * k_c + t1 + mid_p + cross,
                low_p + cross + full_c,
                k_c + low_p + priv_c + rest_c,
            ]
        }
        Scheme::E2 => {
            let d = 1.0 + ip * (s.c1 + s.d1);
            let n = 1.0 + ic * s.c2;
            let g = {
                let x = (sp * s.a1).sqrt() + (ic * s.a2).sqrt();
                x * x
            };
            let k_v = lg(c * (s.b1 + s.c1) / (1.0 + c * s.d1));
            let k_z = lg(c * s.c1 / (1.0 + c * s.d1));
            let t1 = lg(sp * s.d1 / n);
            let t1_u = lg((sp * s.d1 + ic * s.b2) / n);
            let coh = lr(1.0 + sp + ic + 2.0 * (sp * ic * s.a1 * s.a2).sqrt(), n);
            let rc = lg(sc * (s.b2 + s.c2) / d);
            let priv_c = lg(sc * s.c2 / d);
            let (k1, k2) = (opts.k1, opts.k2);
            vec![
                k_v + t1,
                coh,
                rc,
                k_v + t1_u + priv_c,
                coh + priv_c,
                k_z + t1 + rc + k1,
                lg(sp * (s.c1 + s.d1) / n) + rc + k1 + k2,
                lg((sp * (s.c1 + s.d1) + g + ic * s.b2) / n) + rc + priv_c + k1,
                k_z + t1_u + rc + priv_c + k1,
                lg((sp * s.c1 + g + ic * s.b2) / n) + t1_u + rc + 2.0 * priv_c + k1,
            ]
        }
    };
    let rows: Vec<(&str, f64, f64, f64, f64)> = closed_form_terms(scheme)
        .iter()
        .zip(values)
        .map(|(&(label, (a, b), _), v)| (label, a, b, v, 0.0))
        .collect();
    labelled_region("", &rows)
}

/// The power split used in each regime of the gap proof.
pub fn power_split_for_regime(s: f64, i: f64, c: f64, r: Regime) -> Result<PowerSplit> {
    check_regime(s, i, c, r)?;
    split_formula(i, c, r)
}

/// The regime split formula evaluated without checking that `(s, i, c)` lies in the regime.
pub(crate) fn split_formula(i: f64, c: f64, r: Regime) -> Result<PowerSplit> {
    let (primary, cognitive, scheme) = match r {
        Regime::GreenI => {
            let lo = 1.0 / (1.0 + i);
            ([i / (1.0 + i), 0.0, lo, 0.0], [i / (1.0 + i), lo, 0.0], Scheme::E1)
        }
        Regime::GreenII => {
            let a1 = 1.0 / (2.0 * (1.0 + c.min(i)));
            let c1 = 1.0 / (2.0 * (1.0 + i));
            let b1 = if i <= c {
                i / (1.0 + i)
            } else {
                (c + i + 2.0 * c * i) / (2.0 * (1.0 + c) * (1.0 + i))
            };
            ([a1, b1, c1, 0.0], [i / (1.0 + i), 1.0 / (1.0 + i), 0.0], Scheme::E1)
        }
        Regime::Red => {
            let ab = (i + c + 2.0 * i * c) / (4.0 * (1.0 + i) * (1.0 + c));
            (
                [ab, ab, 1.0 / (2.0 * (1.0 + i)), 1.0 / (2.0 * (1.0 + c))],
                [0.0, i / (1.0 + i), 1.0 / (1.0 + i)],
                Scheme::E2,
            )
        }
        Regime::Yellow => {
            let ab = i / (2.0 * (1.0 + i));
            ([ab, ab, 1.0 / (1.0 + i), 0.0], [0.0, i / (1.0 + i), 1.0 / (1.0 + i)], Scheme::E2)
        }
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => {
            return Err(Error::InvalidParameter("blue regimes have no split formula".into()))
        }
    };
    PowerSplit::new(primary, cognitive, scheme)
}

/// The scheme whose region the regime split is meant for.
pub fn scheme_for_regime(r: Regime) -> Option<Scheme> {
    match r {
        Regime::GreenI | Regime::GreenII => Some(Scheme::E1),
        Regime::Red | Regime::Yellow => Some(Scheme::E2),
        _ => None,
    }
}

/// The simplified inner region of each regime, with its integer and `log2 3`
/// offsets kept as constants.
pub fn inner_regime(s: f64, i: f64, c: f64, r: Regime) -> Result<RatePolytope> {
    check_regime(s, i, c, r)?;
    let prefix = format!("low{}", r.label_stem());
    let l_s = lg(s);
    let l_si = lg(s + i);
    let l_s1i = lg(s / (1.0 + i));
    let l_is1i = lg(i + s / (1.0 + i));
    let rows: Vec<(&str, f64, f64, f64, f64)> = match r {
        Regime::GreenI => {
            let three = l_s1i + l_si + l_is1i;
            vec![
                ("A", 1.0, 0.0, l_s, -1.0),
                ("B", 0.0, 1.0, l_s, -1.0),
                ("C", 1.0, 1.0, l_si + l_s1i, -2.0),
                ("D", 1.0, 1.0, 2.0 * l_is1i, -2.0),
                ("E", 2.0, 1.0, three, -3.0),
                ("F", 1.0, 2.0, three, -3.0),
            ]
        }
        Regime::GreenII => {
            let m = lg(i.min(c));
            vec![
                ("A", 1.0, 0.0, l_s, -4.0),
                ("B", 0.0, 1.0, l_s, -1.0),
                ("C", 1.0, 1.0, l_si + l_s1i, -3.0),
                ("D", 1.0, 1.0, l_is1i + l_s1i + m, -5.0),
                ("E", 2.0, 1.0, 2.0 * l_s1i + l_si + m, -6.0),
                ("F", 2.0, 1.0, 2.0 * l_s1i + lg(i + s / (1.0 + i.min(c))) + 2.0 * m, -9.0),
                ("G", 1.0, 2.0, l_is1i + l_s1i + l_si, -4.0),
            ]
        }
        Regime::Red => {
            let l_c = lg(c);
            let l_s1c = lg(s / (1.0 + c));
            let l_c1i = lg(c / (1.0 + i));
            let l_is1c = lg(i + s / (1.0 + c));
            vec![
                ("A", 1.0, 0.0, lg(c + s), -5.0),
                ("B", 1.0, 0.0, l_si, -1.0),
                ("C", 0.0, 1.0, l_s, -LOG3),
                ("D", 1.0, 1.0, l_c + l_is1c + l_s1i, -5.0 - LOG3),
                ("E", 1.0, 1.0, l_si + l_s1i, -1.0 - LOG3),
                ("F", 1.0, 1.0, l_c1i + l_s1c + l_s, -4.0 - LOG3),
                ("G", 1.0, 1.0, l_s + lg(s / (1.0 + i) + s / (1.0 + c)), -2.0 - LOG3),
                ("H", 1.0, 2.0, l_si + l_s1i + l_s, -3.0 - 2.0 * LOG3),
                ("I", 1.0, 2.0, l_s + l_s1i + l_is1c + l_c1i, -4.0 - 2.0 * LOG3),
                ("L", 1.0, 3.0, l_si + 2.0 * l_s1i + l_is1c + l_s, -5.0 - 3.0 * LOG3),
            ]
        }
        Regime::Yellow => {
            let l_c = lg(c);
            let l_c1i = lg(c / (1.0 + i));
            vec![
                ("A", 1.0, 0.0, l_c, -1.0),
                ("B", 1.0, 0.0, l_si, -1.0),
                ("C", 0.0, 1.0, l_s, -1.0),
                ("D", 1.0, 1.0, l_c + l_si, -3.0),
                ("E", 1.0, 1.0, l_c1i + l_s, -1.0),
                ("F", 1.0, 1.0, l_s1i + l_s, -2.0),
                ("G", 1.0, 2.0, l_s + l_s1i + l_si, -4.0),
                ("H", 1.0, 2.0, l_c1i + l_si + l_s, -3.0),
                ("I", 1.0, 3.0, 2.0 * l_si + l_s + l_s1i, -6.0),
            ]
        }
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => unreachable!(),
    };
    labelled_region(&prefix, &rows)
}
