#![allow(dead_code)]

use ccic_core::certify::{
    certify_gap_sweep, fme_check, gap_budget, gdof_estimate, random_params, FmeCheckOptions,
};
use ccic_core::channel::{
    classify_regime_absolute, db_to_linear, ChannelParams, Regime, SymmetricParams,
};
use ccic_core::gaussian::{conditional_mi, lg};
use ccic_core::inner::{
    closed_form_terms, dpc_coefficients, evaluate_terms, inner_closed_form, inner_regime,
    signal_model, InnerOptions, PowerSplit, Scheme,
};
use ccic_core::outer::{outer_general_rho, outer_symmetric, outer_symmetric_term, OuterBoundId};
use ccic_core::polytope::{
    fme_project, gap_to_within, project_by_vertices, set_equal, support_distance, HPolyhedron,
    RatePolytope,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

pub fn acceptance_grid() -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let snrs = (1..=6).map(|k| db_to_linear(10.0 * k as f64)).collect();
    let alphas = (1..=9).map(|k| k as f64 / 10.0).collect();
    let betas = (0..20).map(|k| 0.05 + 0.1 * k as f64).collect();
    (snrs, alphas, betas)
}

pub fn criterion_1() -> Outcome {
    let t = std::time::Instant::now();
    let (s, a, b) = acceptance_grid();
    let reports = certify_gap_sweep(&s, &a, &b).expect("sweep");
    let elapsed = t.elapsed().as_secs_f64();
    let own: Vec<_> = reports.iter().filter(|r| !r.external).collect();
    let bad: Vec<_> = own.iter().filter(|r| !r.certified).collect();
    let worst = |f: &dyn Fn(Regime) -> bool| {
        own.iter().filter(|r| f(r.regime)).filter_map(|r| r.gap).fold(0.0, f64::max)
    };
    let mut detail = format!(
        "{} points, {} uncertified, max gap green/red {:.6} yellow {:.6}, {elapsed:.2}s",
        own.len(),
        bad.len(),
        worst(&|r| r != Regime::Yellow),
        worst(&|r| r == Regime::Yellow),
    );
    if let Some(r) = bad.first() {
        detail += &format!(
            "; first: S={:.0} alpha={:.2} beta={:.2} {:?} gap {:.4} > {}",
            r.snr,
            r.alpha,
            r.beta,
            r.regime,
            r.gap.unwrap_or(f64::NAN),
            r.budget
        );
    }
    Outcome::new(bad.is_empty() && elapsed < 30.0, detail)
}

pub fn criterion_2() -> Outcome {
    let t = std::time::Instant::now();
    let (snrs, alphas, betas) = acceptance_grid();
    let mut worst = f64::INFINITY;
    let mut points = 0;
    for &s in &snrs {
        for &a in &alphas {
            for &b in &betas {
                let (s, i, c) = SymmetricParams::new(s, a, b).unwrap().gains();
                let r = classify_regime_absolute(s, i, c).unwrap();
                if r.is_blue() {
                    continue;
                }
                points += 1;
                let inner = inner_regime(s, i, c, r).unwrap().or_origin().0;
                let outer = outer_symmetric(s, i, c).unwrap();
                for v in inner.vertices().unwrap() {
                    for k in &outer.constraints {
                        worst = worst.min(k.slack(v));
                    }
                }
            }
        }
    }
    let elapsed = t.elapsed().as_secs_f64();
    Outcome::new(
        worst >= -1e-9 && elapsed < 10.0,
        format!("{points} points, min slack {worst:.3e}, {elapsed:.2}s"),
    )
}

pub fn criterion_3() -> Outcome {
    let t = std::time::Instant::now();
    let s = fme_check(1, 50, &[Scheme::E1, Scheme::E2], &FmeCheckOptions::default()).expect("fme check");
    let elapsed = t.elapsed().as_secs_f64();
    let part = |sc: Scheme| {
        format!(
            "{}: {}/{} pass, {} skipped, max dev {:.3e}",
            sc.tag(),
            s.passed(Some(sc)),
            s.passed(Some(sc)) + s.failed(Some(sc)),
            s.skipped(Some(sc)),
            s.max_dev(Some(sc))
        )
    };
    Outcome::new(
        s.failed(None) == 0 && elapsed < 60.0,
        format!("{}; {}; {elapsed:.2}s", part(Scheme::E1), part(Scheme::E2)),
    )
}

/// Largest deviation between each closed-form bound and the sum of the
/// decoding terms it is assembled from, evaluated on the covariance model.
pub fn closed_form_deviation(p: &ChannelParams, s: &PowerSplit, scheme: Scheme) -> f64 {
    let opts = match scheme {
        Scheme::E1 => InnerOptions::default(),
        Scheme::E2 => InnerOptions::exact(p, s).unwrap(),
    };
    let closed = inner_closed_form(p, s, scheme, opts).unwrap();
    let (terms, _) = evaluate_terms(p, s, scheme).unwrap();
    let rhs = |name: &str| terms.iter().find(|t| t.name == name).unwrap().rhs;
    closed_form_terms(scheme)
        .iter()
        .map(|&(label, _, parts)| {
            let sum: f64 = parts.iter().map(|&(n, m)| m as f64 * rhs(n)).sum();
            (closed.get(label).unwrap().rhs - sum).abs()
        })
        .fold(0.0, f64::max)
}

pub fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for scheme in [Scheme::E1, Scheme::E2] {
        for _ in 0..25 {
            let p = random_params(&mut rng);
            let s = PowerSplit::random(&mut rng, scheme);
            worst = worst.max(closed_form_deviation(&p, &s, scheme));
        }
    }
    Outcome::new(worst <= 1e-8, format!("25 splits per scheme, max dev {worst:.3e}"))
}

/// Both pre-cancellation identities at one E2 split.
pub fn dpc_identity_errors(p: &ChannelParams, s: &PowerSplit) -> (f64, f64) {
    dpc_coefficients(p, s).unwrap();
    let m = signal_model(p, s, Scheme::E2).unwrap();
    let mi = |obs: &[&str], t: &[&str], g: &[&str]| conditional_mi(&m, t, obs, g).unwrap();
    let u = mi(&["Yc"], &["U2"], &["V1"]) - mi(&["S1"], &["U2"], &[]) - mi(&["Yc"], &["U2"], &["V1", "S1"]);
    let t = mi(&["Yc"], &["T2"], &["V1", "U2"]) - mi(&["S1"], &["T2"], &["U2"])
        - mi(&["Yc"], &["T2"], &["V1", "U2", "S1"]);
    (u.abs(), t.abs())
}

pub fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut wu, mut wt) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let p = random_params(&mut rng);
        let s = PowerSplit::random(&mut rng, Scheme::E2);
        let (u, t) = dpc_identity_errors(&p, &s);
        wu = wu.max(u);
        wt = wt.max(t);
    }
    Outcome::new(wu <= 1e-9 && wt <= 1e-9, format!("25 splits, max error U2 {wu:.3e}, T2 {wt:.3e}"))
}

pub fn random_symmetric<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
    let s = 10f64.powf(rng.gen_range(0.0..6.0));
    let a = rng.gen_range(0.0..2.0);
    let b = rng.gen_range(0.0..2.5);
    (s, s.powf(a), s.powf(b))
}

/// Smallest slack of the correlated bounds against the symmetric ones.
pub fn rho_dominance_slack(s: f64, i: f64, c: f64) -> f64 {
    let sym = outer_symmetric(s, i, c).unwrap();
    let p = ChannelParams::symmetric(s, i, c).unwrap();
    let mut worst = f64::INFINITY;
    for m in 0..=20 {
        for k in 0..16 {
            let rho = Complex64::from_polar(m as f64 / 20.0, std::f64::consts::TAU * k as f64 / 16.0);
            let g = outer_general_rho(&p, rho).unwrap();
            for b in &g.constraints {
                let free = sym.get(b.label.as_deref().unwrap()).unwrap();
                worst = worst.min(free.rhs - b.rhs);
            }
        }
    }
    worst
}

pub fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let worst = (0..20)
        .map(|_| {
            let (s, i, c) = random_symmetric(&mut rng);
            rho_dominance_slack(s, i, c)
        })
        .fold(f64::INFINITY, f64::min);
    Outcome::new(worst >= -1e-9, format!("20 points x 336 rho, min slack {worst:.3e}"))
}

pub fn coop_ladder() -> Vec<f64> {
    (0..200).map(|k| 10f64.powf(-2.0 + 8.0 * k as f64 / 199.0)).collect()
}

/// Largest decrease of a C-dependent sum bound along the ladder.
pub fn max_decrease(s: f64, i: f64) -> f64 {
    let ids = [OuterBoundId::SumTuniC, OuterBoundId::SumPV, OuterBoundId::TwoPpPc, OuterBoundId::PpTwoPc];
    let ladder = coop_ladder();
    let mut worst = 0.0f64;
    for id in ids {
        let rhs: Vec<f64> = ladder
            .iter()
            .map(|&c| {
                let (g, k) = outer_symmetric_term(id, s, i, c);
                g + k
            })
            .collect();
        for w in rhs.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    worst
}

pub fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let worst = (0..10)
        .map(|_| {
            let s = 10f64.powf(rng.gen_range(0.0..6.0));
            let i = 10f64.powf(rng.gen_range(-1.0..6.0));
            max_decrease(s, i)
        })
        .fold(0.0, f64::max);
    Outcome::new(worst <= 0.0, format!("10 (S, I) pairs x 200 C, max decrease {worst:.3e}"))
}

pub fn gdof_ladder() -> Vec<f64> {
    [60.0, 80.0, 100.0, 120.0].iter().map(|&d| db_to_linear(d)).collect()
}

pub fn criterion_8() -> Outcome {
    let snrs = gdof_ladder();
    let s = *snrs.last().unwrap();
    let mut bad = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for a in 0..=8 {
        for b in 0..=8 {
            let (a, b) = (a as f64 * 0.25, b as f64 * 0.25);
            let g = gdof_estimate(a, b, &snrs).unwrap();
            let (s, i, c) = SymmetricParams::new(s, a, b).unwrap().gains();
            let r = classify_regime_absolute(s, i, c).unwrap();
            let allow = gap_budget(r) / (2.0 * lg(s)) + 1e-3;
            let mut ok = g.spread() <= allow;
            worst_margin = worst_margin.min(allow - g.spread());
            if a == 0.0 {
                ok &= (g.outer_limit - 1.0).abs() <= 1e-3 && (g.inner_limit - 1.0).abs() <= 1e-3;
            }
            if !ok {
                bad.push((a, b));
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("81 points, {} outside the sandwich {bad:?}, smallest margin {worst_margin:.3e}", bad.len()),
    )
}

/// A bounded random system over `d` variables containing the origin.
pub fn random_system<R: Rng>(rng: &mut R, d: usize) -> HPolyhedron {
    let labels: Vec<String> = (0..d).map(|k| format!("x{k}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let mut h = HPolyhedron::new(&refs).unwrap();
    for l in &refs {
        h.add_nonneg(l).unwrap();
    }
    let all: Vec<(&str, i64)> = refs.iter().map(|&l| (l, 1)).collect();
    h.add_le(&all, rng.gen_range(5.0..20.0)).unwrap();
    for _ in 0..rng.gen_range(d..2 * d + 2) {
        let row: Vec<(&str, i64)> = refs.iter().map(|&l| (l, rng.gen_range(-1..=3))).collect();
        h.add_le(&row, rng.gen_range(0.5..10.0)).unwrap();
    }
    h
}

pub fn eliminated(d: usize) -> Vec<String> {
    (2..d).map(|k| format!("x{k}")).collect()
}

pub fn project_fme(h: &HPolyhedron, order: &[String]) -> RatePolytope {
    let refs: Vec<&str> = order.iter().map(String::as_str).collect();
    fme_project(h, &refs).unwrap().to_rate_polytope().unwrap()
}

pub fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.gen_range(3..=8);
        let h = random_system(&mut rng, d);
        let f = project_fme(&h, &eliminated(d));
        let v = project_by_vertices(&h, ["x0", "x1"]).unwrap();
        worst = worst.max(support_distance(&f, &v).unwrap());
    }
    let mut self_gap = 0.0f64;
    let mut perm_ok = true;
    for _ in 0..20 {
        let d = rng.gen_range(4..=8);
        let h = random_system(&mut rng, d);
        let order = eliminated(d);
        let base = project_fme(&h, &order);
        self_gap = self_gap.max(gap_to_within(&base, &base).unwrap());
        let mut shuffled = order.clone();
        shuffled.shuffle(&mut rng);
        perm_ok &= set_equal(&base, &project_fme(&h, &shuffled), 1e-9).unwrap();
    }
    Outcome::new(
        worst <= 1e-7 && self_gap == 0.0 && perm_ok,
        format!("100 systems max dev {worst:.3e}; gap(P,P) max {self_gap}; permutation invariance {perm_ok}"),
    )
}

pub type Criterion = (&'static str, fn() -> Outcome);

pub const CRITERIA: [Criterion; 9] = [
    ("gap certification", criterion_1),
    ("inner inside outer", criterion_2),
    ("FME oracle equivalence", criterion_3),
    ("closed form vs covariance oracle", criterion_4),
    ("DPC identities", criterion_5),
    ("rho dominance", criterion_6),
    ("monotonicity in C", criterion_7),
    ("gDoF sandwich", criterion_8),
    ("polytope engine properties", criterion_9),
];
