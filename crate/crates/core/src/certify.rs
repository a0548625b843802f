//! Gap certification sweeps, per-constraint ledgers, gDoF curves and the
//! randomized projection cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{classify_regime_absolute, ChannelParams, Regime, SymmetricParams};
use crate::error::{Error, Result};
use crate::gaussian::lg;
use crate::inner::{
    inner_closed_form, inner_regime, raw_constraint_system, scheme_for_regime, split_formula, BinningMode, InnerOptions, PowerSplit,
    Scheme, SPLIT_VARS,
};
use crate::outer::{outer_reference, outer_regime, outer_symmetric, ReferenceKind};
use crate::polytope::{
    fme_project, gap_detailed, project_by_vertices, support_distance, Point, RatePolytope,
};

/// Slack allowed on top of a budget before a point counts as uncertified.
pub const CERTIFY_TOL: f64 = 1e-6;

/// Default tolerance of the projection cross-check, in bits.
pub const FME_TOL: f64 = 1e-7;

/// Per-user gap budget of each regime. Blue regimes carry the 1-bit result
/// proved elsewhere.
pub fn gap_budget(r: Regime) -> f64 {
    match r {
        Regime::GreenI | Regime::GreenII | Regime::Red => 5.0,
        Regime::Yellow => 2.0,
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => 1.0,
    }
}

/// Per-user limit for the paired-constraint slack of each regime.
pub fn ledger_limit(r: Regime) -> f64 {
    match r {
        Regime::GreenI => 3.0,
        Regime::GreenII | Regime::Red => 5.0,
        Regime::Yellow => 2.0,
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub snr: f64,
    pub alpha: f64,
    pub beta: f64,
    pub regime: Regime,
    /// `None` for blue points, which are not certified here.
    pub gap: Option<f64>,
    pub budget: f64,
    pub certified: bool,
    pub binding_vertex: Option<Point>,
    /// The result for this point is taken from outside this crate.
    pub external: bool,
    /// The simplified inner region had a negative bound and was replaced by the origin.
    pub inner_collapsed: bool,
}

/// Gap between the regime outer and inner regions at one symmetric point.
pub fn certify_point(p: SymmetricParams) -> Result<GapReport> {
    let (s, i, c) = p.gains();
    let regime = classify_regime_absolute(s, i, c)?;
    let budget = gap_budget(regime);
    let mut report = GapReport {
        snr: s,
        alpha: p.alpha,
        beta: p.beta,
        regime,
        gap: None,
        budget,
        certified: false,
        binding_vertex: None,
        external: regime.is_blue(),
        inner_collapsed: false,
    };
    if regime.is_blue() {
        return Ok(report);
    }
    let (inner, collapsed) = inner_regime(s, i, c, regime)?.or_origin();
    let outer = outer_regime(s, i, c, regime)?;
    let g = gap_detailed(&outer, &inner)?;
    report.gap = Some(g.gap);
    report.binding_vertex = Some(g.binding_vertex);
    report.certified = g.gap <= budget + CERTIFY_TOL;
    report.inner_collapsed = collapsed;
    Ok(report)
}

/// Sweeps every grid point in `S x alpha x beta` order (all loops nested in that order).
pub fn certify_gap_sweep(snrs: &[f64], alphas: &[f64], betas: &[f64]) -> Result<Vec<GapReport>> {
    let mut out = Vec::with_capacity(snrs.len() * alphas.len() * betas.len());
    for &s in snrs {
        for &a in alphas {
            for &b in betas {
                out.push(certify_point(SymmetricParams::new(s, a, b)?)?);
            }
        }
    }
    Ok(out)
}

/// Aggregate of a sweep for the non-blue points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: usize,
    pub certified: usize,
    pub external: usize,
    pub max_gap: f64,
}

pub fn summarize(reports: &[GapReport]) -> SweepSummary {
    let own = reports.iter().filter(|r| !r.external);
    SweepSummary {
        points: own.clone().count(),
        certified: own.clone().filter(|r| r.certified).count(),
        external: reports.len() - own.clone().count(),
        max_gap: own.filter_map(|r| r.gap).fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub regime: Regime,
    pub inner_label: String,
    pub outer_labels: Vec<String>,
    /// Outer minus inner right-hand side, divided by the sum of the inner weights.
    pub slack: f64,
}

fn pairings(r: Regime) -> &'static [(&'static str, &'static [&'static str])] {
    match r {
        Regime::GreenI => &[("A", &["A"]), ("B", &["B"]), ("C", &["C"]), ("D", &["D"]), ("E", &["E"]), ("F", &["F"])],
        Regime::GreenII => &[
            ("A", &["A"]),
            ("B", &["B"]),
            ("C", &["C"]),
            ("D", &["D"]),
            ("E", &["E"]),
            ("F", &["E"]),
            ("G", &["F"]),
        ],
        Regime::Red => &[
            ("A", &["A"]),
            ("B", &["B"]),
            ("C", &["C"]),
            ("D", &["D"]),
            ("E", &["D"]),
            ("F", &["D"]),
            ("G", &["D"]),
            ("H", &["C", "D"]),
            ("I", &["E"]),
            ("L", &["C", "E"]),
        ],
        Regime::Yellow => &[
            ("A", &["A"]),
            ("B", &["B"]),
            ("C", &["C"]),
            ("D", &["A", "C"]),
            ("E", &["E"]),
            ("F", &["E"]),
            ("G", &["C", "E"]),
            ("H", &["C", "E"]),
            ("I", &["C", "C", "E"]),
        ],
        Regime::BlueStrongInterference | Regime::BlueStrongCooperation => &[],
    }
}

/// Compares each simplified inner bound with the outer bound (or sum of
/// outer bounds) that matches its rate weights.
pub fn constraint_ledger(s: f64, i: f64, c: f64, r: Regime) -> Result<Vec<LedgerEntry>> {
    let inner = inner_regime(s, i, c, r)?;
    let outer = outer_regime(s, i, c, r)?;
    let stem = r.label_stem();
    pairings(r)
        .iter()
        .map(|&(il, ols)| {
            let inner_label = format!("low{stem}{il}");
            let ic = inner.get(&inner_label).ok_or_else(|| Error::UnknownLabel(inner_label.clone()))?;
            let outer_labels: Vec<String> = ols.iter().map(|l| format!("out{stem}{l}")).collect();
            let mut sum = 0.0;
            let mut w = (0.0, 0.0);
            for l in &outer_labels {
                let oc = outer.get(l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
                sum += oc.rhs;
                w = (w.0 + oc.coeff_p, w.1 + oc.coeff_c);
            }
            if w != (ic.coeff_p, ic.coeff_c) {
                return Err(Error::InvalidParameter(format!(
                    "pairing {inner_label} has weights {:?} but the outer sum has {w:?}",
                    ic.weights()
                )));
            }
            Ok(LedgerEntry {
                regime: r,
                inner_label,
                outer_labels,
                slack: (sum - ic.rhs) / (ic.coeff_p + ic.coeff_c),
            })
        })
        .collect()
}

/// Achievable regions tried for the inner gDoF: the regime region where one
/// applies, and the scheme regions at the regime power-split formulas and at
/// the all-common split.
pub fn candidate_inner_regions(s: f64, i: f64, c: f64) -> Result<Vec<RatePolytope>> {
    let p = ChannelParams::symmetric(s, i, c)?;
    let mut out = Vec::new();
    let regime = classify_regime_absolute(s, i, c)?;
    if !regime.is_blue() {
        out.push(inner_regime(s, i, c, regime)?.or_origin().0);
    }
    let common = PowerSplit::new([1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0], Scheme::E1)?;
    out.push(inner_closed_form(&p, &common, Scheme::E1, InnerOptions::default())?);
    for r in [Regime::GreenI, Regime::GreenII, Regime::Red, Regime::Yellow] {
        let Ok(split) = split_formula(i, c, r) else { continue };
        let scheme = scheme_for_regime(r).expect("non-blue regime");
        out.push(inner_closed_form(&p, &split, scheme, InnerOptions::default())?);
    }
    Ok(out)
}

/// gDoF estimates along an SNR ladder, with first-order extrapolation in `1/log2(1+S)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdofCurve {
    pub alpha: f64,
    pub beta: f64,
    pub snrs: Vec<f64>,
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub outer_limit: f64,
    pub inner_limit: f64,
}

impl GdofCurve {
    pub fn spread(&self) -> f64 {
        (self.outer_limit - self.inner_limit).abs()
    }
}

/// Eliminates the `1/L` term using the last two points of the ladder: for
/// `d(L) = d + k/L`, `d = (L2 d2 - L1 d1) / (L2 - L1)`.
pub fn richardson(logs: &[f64], values: &[f64]) -> f64 {
    match logs.len() {
        0 => f64::NAN,
        1 => values[0],
        n => {
            let (l1, l2) = (logs[n - 2], logs[n - 1]);
            let (d1, d2) = (values[n - 2], values[n - 1]);
            (l2 * d2 - l1 * d1) / (l2 - l1)
        }
    }
}

pub fn gdof_estimate(alpha: f64, beta: f64, snrs: &[f64]) -> Result<GdofCurve> {
    if snrs.is_empty() {
        return Err(Error::InvalidParameter("empty SNR list".into()));
    }
    if snrs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("SNR list must be strictly ascending".into()));
    }
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    let mut logs = Vec::new();
    for &s in snrs {
        let (s, i, c) = SymmetricParams::new(s, alpha, beta)?.gains();
        let norm = 2.0 * lg(s);
        logs.push(lg(s));
        outer.push(outer_symmetric(s, i, c)?.max_sum_rate()? / norm);
        let mut best = 0.0f64;
        for r in candidate_inner_regions(s, i, c)? {
            best = best.max(r.max_sum_rate()?);
        }
        inner.push(best / norm);
    }
    Ok(GdofCurve {
        alpha,
        beta,
        snrs: snrs.to_vec(),
        outer_limit: richardson(&logs, &outer),
        inner_limit: richardson(&logs, &inner),
        outer,
        inner,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceComparison {
    pub kind: ReferenceKind,
    /// Shift needed to bring the symmetric outer region inside the reference.
    pub symmetric_to_reference: f64,
    /// Shift needed to bring the reference inside the symmetric outer region.
    pub reference_to_symmetric: f64,
}

/// Compares the symmetric outer region with the limiting reference channel.
pub fn reference_comparison(s: f64, alpha: f64, beta: f64) -> Result<ReferenceComparison> {
    let (s, i, c) = SymmetricParams::new(s, alpha, beta)?.gains();
    reference_comparison_gains(s, i, c)
}

pub fn reference_comparison_gains(s: f64, i: f64, c: f64) -> Result<ReferenceComparison> {
    let kind = if c >= s.max(i) {
        ReferenceKind::NonCausalCIC
    } else if c <= s.min(i * (1.0 + i) / (1.0 + s)) {
        ReferenceKind::ClassicalIC
    } else {
        return Err(Error::InvalidParameter(format!(
            "C = {c} is neither >= max{{S, I}} nor <= min{{S, I(1+I)/(1+S)}}"
        )));
    };
    let sym = outer_symmetric(s, i, c)?;
    let reference = outer_reference(s, i, c, kind)?;
    Ok(ReferenceComparison {
        kind,
        symmetric_to_reference: gap_detailed(&sym, &reference)?.gap,
        reference_to_symmetric: gap_detailed(&reference, &sym)?.gap,
    })
}

/// Outcome of one projection cross-check trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrialStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmeTrial {
    pub index: usize,
    pub scheme: Scheme,
    pub params: ChannelParams,
    pub split: PowerSplit,
    /// Support-function distance between the FME projection and the closed form.
    pub dev_fme: f64,
    /// Same for the vertex-enumeration projection, when it was run.
    pub dev_vertex: Option<f64>,
    pub status: TrialStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FmeCheckOptions {
    pub tol: f64,
    /// Also project by vertex enumeration.
    pub vertex_oracle: bool,
    /// Added to every closed-form bound; nonzero only to test that mismatches are caught.
    pub perturb: f64,
}

impl Default for FmeCheckOptions {
    fn default() -> Self {
        Self { tol: FME_TOL, vertex_oracle: true, perturb: 0.0 }
    }
}

/// Random gains log-uniform over `[-10, 30]` dB and uniform phases.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> ChannelParams {
    let mut g = || 10f64.powf(rng.gen_range(-1.0..3.0));
    let (sp, sc, ip, ic, c) = (g(), g(), g(), g(), g());
    let tau = std::f64::consts::TAU;
    ChannelParams { snr_p: sp, snr_c: sc, inr_p: ip, inr_c: ic, coop: c, theta_p: 0.0, theta_c: 0.0 }
        .with_phases(rng.gen_range(0.0..tau), rng.gen_range(0.0..tau))
}

/// Projects the raw system onto `(R1, R2)` and compares it with the closed
/// form, which uses the exact `k1`, `k2` for E2.
pub fn fme_trial(
    index: usize,
    p: &ChannelParams,
    s: &PowerSplit,
    scheme: Scheme,
    opts: &FmeCheckOptions,
) -> Result<FmeTrial> {
    let mut trial = FmeTrial {
        index,
        scheme,
        params: *p,
        split: *s,
        dev_fme: f64::NAN,
        dev_vertex: None,
        status: TrialStatus::Pass,
    };
    let raw = match raw_constraint_system(p, s, scheme, BinningMode::Equality) {
        Ok(h) => h,
        Err(Error::InvalidSplit(reason)) => {
            trial.status = TrialStatus::Skipped(reason);
            return Ok(trial);
        }
        Err(e) => return Err(e),
    };
    let k = match scheme {
        Scheme::E1 => InnerOptions::default(),
        Scheme::E2 => InnerOptions::exact(p, s)?,
    };
    let mut closed = inner_closed_form(p, s, scheme, k)?;
    for c in &mut closed.constraints {
        c.rhs += opts.perturb;
    }
    let fme = fme_project(&raw, &SPLIT_VARS)?.to_rate_polytope()?;
    trial.dev_fme = support_distance(&fme, &closed)?;
    let mut worst = trial.dev_fme;
    if opts.vertex_oracle {
        let v = project_by_vertices(&raw, ["R1", "R2"])?;
        let d = support_distance(&v, &closed)?;
        trial.dev_vertex = Some(d);
        worst = worst.max(d);
    }
    if !(worst <= opts.tol) {
        trial.status = TrialStatus::Fail;
    }
    Ok(trial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmeCheckSummary {
    pub seed: u64,
    pub trials: Vec<FmeTrial>,
}

impl FmeCheckSummary {
    fn count(&self, scheme: Option<Scheme>, f: impl Fn(&TrialStatus) -> bool) -> usize {
        self.trials
            .iter()
            .filter(|t| scheme.is_none_or(|s| t.scheme == s) && f(&t.status))
            .count()
    }

    pub fn passed(&self, scheme: Option<Scheme>) -> usize {
        self.count(scheme, |s| *s == TrialStatus::Pass)
    }

    pub fn failed(&self, scheme: Option<Scheme>) -> usize {
        self.count(scheme, |s| *s == TrialStatus::Fail)
    }

    pub fn skipped(&self, scheme: Option<Scheme>) -> usize {
        self.count(scheme, |s| matches!(s, TrialStatus::Skipped(_)))
    }

    pub fn max_dev(&self, scheme: Option<Scheme>) -> f64 {
        self.trials
            .iter()
            .filter(|t| scheme.is_none_or(|s| t.scheme == s) && !matches!(t.status, TrialStatus::Skipped(_)))
            .map(|t| t.dev_vertex.map_or(t.dev_fme, |v| v.max(t.dev_fme)))
            .fold(0.0, f64::max)
    }
}

/// `trials` random draws for each scheme in `schemes`, from a ChaCha8 stream seeded with `seed`.
pub fn fme_check(seed: u64, trials: usize, schemes: &[Scheme], opts: &FmeCheckOptions) -> Result<FmeCheckSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials * schemes.len());
    for &scheme in schemes {
        for k in 0..trials {
            let p = random_params(&mut rng);
            let s = PowerSplit::random(&mut rng, scheme);
            out.push(fme_trial(k, &p, &s, scheme, opts)?);
        }
    }
    Ok(FmeCheckSummary { seed, trials: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use approx::assert_abs_diff_eq;

    fn point(db: f64, a: f64, b: f64) -> GapReport {
        certify_point(SymmetricParams::new(db_to_linear(db), a, b).unwrap()).unwrap()
    }

    #[test]
    fn theorem_examples() {
        let g = point(40.0, 0.5, 0.3);
        assert_eq!(g.regime, Regime::GreenII);
        assert!(g.certified && g.gap.unwrap() <= 5.0);
        let y = point(40.0, 0.5, 1.2);
        assert_eq!(y.regime, Regime::Yellow);
        assert!(y.certified && y.gap.unwrap() <= 2.0);
        assert!(certify_point(SymmetricParams { snr: 1.0, alpha: 0.5, beta: 0.3 }).is_err());
    }

    #[test]
    fn blue_points_are_external() {
        let b = point(40.0, 1.2, 0.5);
        assert!(b.external && b.gap.is_none() && !b.certified);
        assert_eq!(b.budget, 1.0);
    }

    #[test]
    fn ledger_examples() {
        let l = constraint_ledger(1e4, 10.0, 0.005, Regime::GreenI).unwrap();
        assert_abs_diff_eq!(l[0].slack, 2.0, epsilon = 1e-12);
        let r = constraint_ledger(100.0, 1.0, 50.0, Regime::Red).unwrap();
        let c = r.iter().find(|e| e.inner_label == "lowRedC").unwrap();
        assert_abs_diff_eq!(c.slack, 3f64.log2(), epsilon = 1e-12);
        let y = constraint_ledger(100.0, 10.0, 500.0, Regime::Yellow).unwrap();
        let d = y.iter().find(|e| e.inner_label == "lowYellowD").unwrap();
        assert_eq!(d.outer_labels, ["outYellowA", "outYellowC"]);
        assert!(d.slack <= 2.0);
    }

    #[test]
    fn richardson_removes_first_order_term() {
        let logs = [10.0, 20.0, 40.0];
        let vals: Vec<f64> = logs.iter().map(|l| 0.75 + 3.0 / l).collect();
        assert_abs_diff_eq!(richardson(&logs, &vals), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn gdof_decoupled() {
        let snrs: Vec<f64> = [60.0, 90.0, 120.0].iter().map(|&d| db_to_linear(d)).collect();
        let g = gdof_estimate(0.0, 0.0, &snrs).unwrap();
        assert_abs_diff_eq!(g.outer_limit, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(g.inner_limit, 1.0, epsilon = 1e-3);
        assert!(gdof_estimate(0.0, 0.0, &[1e3, 1e2]).is_err());
    }

    #[test]
    fn reference_zero_coop() {
        let r = reference_comparison_gains(1e4, 10.0, 0.0).unwrap();
        assert_eq!(r.kind, ReferenceKind::ClassicalIC);
        assert!(r.symmetric_to_reference <= 2.0 + 1e-9);
        assert!(reference_comparison_gains(1e4, 10.0, 500.0).is_err());
        let z = reference_comparison_gains(0.0, 0.0, 0.0).unwrap();
        assert!(z.symmetric_to_reference <= 2.0 && z.reference_to_symmetric <= 2.0);
    }

    #[test]
    fn degenerate_split_is_skipped() {
        let p = ChannelParams::symmetric(10.0, 3.0, 5.0).unwrap();
        let s = PowerSplit::new([0.25; 4], [0.5, 0.5, 0.0], Scheme::E2).unwrap();
        let t = fme_trial(0, &p, &s, Scheme::E2, &FmeCheckOptions::default()).unwrap();
        assert!(matches!(t.status, TrialStatus::Skipped(_)));
    }

    #[test]
    fn perturbed_closed_form_is_caught() {
        let opts = FmeCheckOptions { perturb: 1e-3, vertex_oracle: false, ..Default::default() };
        let s = fme_check(3, 2, &[Scheme::E1, Scheme::E2], &opts).unwrap();
        assert_eq!(s.failed(None), 4);
    }
}
