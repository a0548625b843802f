//! Channel parameterizations and the (alpha, beta) regime map.
//!
//! The full Gaussian model has two direct gains, two interference gains, the
//! cooperation gain of the primary-to-cognitive link and two interference
//! phases. The symmetric model collapses these onto an SNR `S` and the
//! exponents `alpha` (interference) and `beta` (cooperation):
//! `snr = S`, `inr = S^alpha`, `C = S^beta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear gains and phases of the Gaussian causal cognitive interference channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub snr_p: f64,
    pub snr_c: f64,
    pub inr_p: f64,
    pub inr_c: f64,
    /// Gain of the primary-to-cognitive transmitter link.
    pub coop: f64,
    pub theta_p: f64,
    pub theta_c: f64,
}

impl ChannelParams {
    pub fn new(snr_p: f64, snr_c: f64, inr_p: f64, inr_c: f64, coop: f64) -> Result<Self> {
        let p = Self {
            snr_p,
            snr_c,
            inr_p,
            inr_c,
            coop,
            theta_p: 0.0,
            theta_c: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric channel with linear gains `S`, `I`, `C` and zero phases.
    pub fn symmetric(s: f64, i: f64, c: f64) -> Result<Self> {
        Self::new(s, s, i, i, c)
    }

    pub fn with_phases(mut self, theta_p: f64, theta_c: f64) -> Self {
        self.theta_p = theta_p;
        self.theta_c = theta_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("snr_p", self.snr_p),
            ("snr_c", self.snr_c),
            ("inr_p", self.inr_p),
            ("inr_c", self.inr_c),
            ("coop", self.coop),
        ] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {g}"
                )));
            }
        }
        if !self.theta_p.is_finite() || !self.theta_c.is_finite() {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        Ok(())
    }

    /// Determinant of the 2x2 interference-channel matrix
    /// `[[sqrt(snr_p), sqrt(inr_c) e^{j theta_c}], [sqrt(inr_p) e^{j theta_p}, sqrt(snr_c)]]`.
    pub fn channel_determinant(&self) -> Complex64 {
        let direct = (self.snr_p * self.snr_c).sqrt();
        let cross = (self.inr_p * self.inr_c).sqrt();
        Complex64::new(direct, 0.0) - Complex64::from_polar(cross, self.theta_p + self.theta_c)
    }

    /// Whether the interference-channel matrix is full rank, relative to `tol`.
    pub fn is_full_rank(&self, tol: f64) -> bool {
        let scale = (self.snr_p * self.snr_c).sqrt().max((self.inr_p * self.inr_c).sqrt());
        self.channel_determinant().norm() > tol * scale.max(1.0)
    }
}

/// The symmetric triplet `(S, alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub snr: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SymmetricParams {
    pub fn new(snr: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !snr.is_finite() || snr < 0.0 {
            return Err(Error::InvalidParameter(format!("S must be finite and >= 0, got {snr}")));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        Ok(Self { snr, alpha, beta })
    }

    pub fn from_db(snr_db: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(db_to_linear(snr_db), alpha, beta)
    }

    /// Recovers the exponents from linear gains. Requires `S > 1`.
    pub fn from_gains(s: f64, i: f64, c: f64) -> Result<Self> {
        if !(s > 1.0) {
            return Err(Error::SnrTooSmall(s));
        }
        if !(i > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter(
                "interference and cooperation gains must be > 0 to take exponents".into(),
            ));
        }
        let ls = s.ln();
        Self::new(s, i.ln() / ls, c.ln() / ls)
    }

    pub fn inr(&self) -> f64 {
        self.snr.powf(self.alpha)
    }

    pub fn coop(&self) -> f64 {
        self.snr.powf(self.beta)
    }

    /// `(S, I, C)` in linear scale.
    pub fn gains(&self) -> (f64, f64, f64) {
        (self.snr, self.inr(), self.coop())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Expands the symmetric triplet into full channel parameters with zero phases.
pub fn expand_symmetric(p: SymmetricParams) -> ChannelParams {
    let (s, i, c) = p.gains();
    ChannelParams {
        snr_p: s,
        snr_c: s,
        inr_p: i,
        inr_c: i,
        coop: c,
        theta_p: 0.0,
        theta_c: 0.0,
    }
}

/// Cooperation strength above which causal cooperation performs, up to a
/// constant, like non-causal message knowledge at the cognitive transmitter.
pub fn delta_threshold(s: f64, i: f64) -> f64 {
    (s + i + 2.0 * (i * s * i / (1.0 + i)).sqrt()) * (1.0 + i)
}

/// Parameter regimes of the symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// Weak cooperation, `C <= I(1+I)/(1+S)`: behaves like the classical IC.
    GreenI,
    /// Weak cooperation above the green-(i) line.
    GreenII,
    /// `max{I, S/(1+I)} < C <= S`.
    Red,
    /// `S < C < Delta_th`.
    Yellow,
    /// `I >= S`.
    BlueStrongInterference,
    /// `C >= Delta_th` with weak interference.
    BlueStrongCooperation,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::GreenI,
        Regime::GreenII,
        Regime::Red,
        Regime::Yellow,
        Regime::BlueStrongInterference,
        Regime::BlueStrongCooperation,
    ];

    pub fn is_blue(self) -> bool {
        matches!(
            self,
            Regime::BlueStrongInterference | Regime::BlueStrongCooperation
        )
    }

    pub fn is_green(self) -> bool {
        matches!(self, Regime::GreenI | Regime::GreenII)
    }

    /// Short lowercase tag used in labels and serialized output.
    pub fn tag(self) -> &'static str {
        match self {
            Regime::GreenI => "green-i",
            Regime::GreenII => "green-ii",
            Regime::Red => "red",
            Regime::Yellow => "yellow",
            Regime::BlueStrongInterference => "blue-si",
            Regime::BlueStrongCooperation => "blue-sc",
        }
    }

    /// Prefix of the constraint labels of the regime-specialized regions.
    pub fn label_stem(self) -> &'static str {
        match self {
            Regime::GreenI => "Greeni",
            Regime::GreenII => "Greenii",
            Regime::Red => "Red",
            Regime::Yellow => "Yellow",
            Regime::BlueStrongInterference => "BlueSI",
            Regime::BlueStrongCooperation => "BlueSC",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Exponent-level regime classification.
///
/// Ties at `beta = 1`, `beta = max{alpha, 1-alpha}` and `beta = [2 alpha - 1]^+`
/// go to the lower-cooperation regime; `beta = alpha + 1` and `alpha = 1` are blue.
pub fn classify_regime(p: SymmetricParams) -> Result<Regime> {
    if !(p.snr > 1.0) {
        return Err(Error::SnrTooSmall(p.snr));
    }
    let (a, b) = (p.alpha, p.beta);
    let regime = if a >= 1.0 {
        Regime::BlueStrongInterference
    } else if b >= a + 1.0 {
        Regime::BlueStrongCooperation
    } else if b > 1.0 {
        Regime::Yellow
    } else if b > a.max(1.0 - a) {
        Regime::Red
    } else if b > (2.0 * a - 1.0).max(0.0) {
        Regime::GreenII
    } else {
        Regime::GreenI
    };
    Ok(regime)
}

/// Whether `C >= Delta_th(S, I)`.
pub fn exceeds_delta_threshold(s: f64, i: f64, c: f64) -> bool {
    c >= delta_threshold(s, i)
}

/// Absolute-level regime classification on linear gains.
///
/// Uses the conditions under which the regime-specialized regions are stated:
/// green `C <= max{I, S/(1+I)}` (sub-split at `C = I(1+I)/(1+S)`), red up to
/// `C <= S`, yellow `S < C < Delta_th`. Ties go to the lower-cooperation regime.
pub fn classify_regime_absolute(s: f64, i: f64, c: f64) -> Result<Regime> {
    if !(s > 1.0) {
        return Err(Error::SnrTooSmall(s));
    }
    if !(i >= 0.0) || !(c >= 0.0) || !i.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter("gains must be finite and >= 0".into()));
    }
    let regime = if i >= s {
        Regime::BlueStrongInterference
    } else if exceeds_delta_threshold(s, i, c) {
        Regime::BlueStrongCooperation
    } else if c > s {
        Regime::Yellow
    } else if c > i.max(s / (1.0 + i)) {
        Regime::Red
    } else if c > i * (1.0 + i) / (1.0 + s) {
        Regime::GreenII
    } else {
        Regime::GreenI
    };
    Ok(regime)
}
