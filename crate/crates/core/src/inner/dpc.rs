//! Dirty-paper coefficients of the binning scheme.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PowerSplit;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// `U2 = U2' + lambda_u S1` and `T2 = T2' + lambda_t S1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpcCoefficients {
    pub lambda_u: Complex64,
    pub lambda_t: Complex64,
}

/// Gain of `S1` at the cognitive receiver.
pub(crate) fn s1_gain_at_yc(p: &ChannelParams, s: &PowerSplit) -> Complex64 {
    Complex64::from_polar((p.inr_p * s.a1).sqrt(), p.theta_p + p.theta_c) + (p.snr_c * s.a2).sqrt()
}

/// Costa coefficients that pre-cancel `S1` at the cognitive receiver, first
/// for `U2` (with `T2'` as noise) and then for `T2` given `U2`.
pub fn dpc_coefficients(p: &ChannelParams, s: &PowerSplit) -> Result<DpcCoefficients> {
    let g_u = (p.snr_c * s.b2).sqrt();
    let g_t = (p.snr_c * s.c2).sqrt();
    if g_u <= 0.0 {
        return Err(Error::InvalidSplit(
            "lambda_U needs snr_c * |b2|^2 > 0; the cognitive common message is absent".into(),
        ));
    }
    if g_t <= 0.0 {
        return Err(Error::InvalidSplit(
            "lambda_T needs snr_c * |c2|^2 > 0; the cognitive private message is absent".into(),
        ));
    }
    let h = s1_gain_at_yc(p, s);
    let noise = 1.0 + p.inr_p * (s.c1 + s.d1);
    let pu = p.snr_c * s.b2;
    let pt = p.snr_c * s.c2;
    let lambda_u = h * (pu / (pu + pt + noise)) / g_u;
    let lambda_t = (h - g_u * lambda_u) * (pt / (pt + noise)) / g_t;
    Ok(DpcCoefficients { lambda_u, lambda_t })
}
