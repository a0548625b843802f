mod common;

use ccic_core::certify::{certify_point, constraint_ledger, ledger_limit, reference_comparison_gains};
use ccic_core::channel::{classify_regime_absolute, Regime, SymmetricParams};
use ccic_core::inner::inner_regime;
use ccic_core::outer::{outer_regime, outer_symmetric};
use ccic_core::polytope::{gap_to_within, is_subset};
use proptest::prelude::*;

fn non_blue() -> impl Strategy<Value = (f64, f64, f64, Regime)> {
    (1.0f64..6.0, 0.0f64..0.99, 0.0f64..2.0).prop_filter_map("blue", |(e, a, b)| {
        let (s, i, c) = SymmetricParams::new(10f64.powf(e), a, b).ok()?.gains();
        let r = classify_regime_absolute(s, i, c).ok()?;
        (!r.is_blue()).then_some((s, i, c, r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regions_nest((s, i, c, r) in non_blue()) {
        let inner = inner_regime(s, i, c, r).unwrap().or_origin().0;
        let outer = outer_regime(s, i, c, r).unwrap();
        let sym = outer_symmetric(s, i, c).unwrap();
        prop_assert!(is_subset(&inner, &sym, 1e-9).unwrap());
        prop_assert!(is_subset(&inner, &outer, 1e-9).unwrap());
        prop_assert!(is_subset(&sym, &outer, 1e-9).unwrap());
    }

    #[test]
    fn ledger_slacks_within_limit((s, i, c, r) in non_blue()) {
        for e in constraint_ledger(s, i, c, r).unwrap() {
            prop_assert!(e.slack <= ledger_limit(r) + 1e-9, "{} slack {}", e.inner_label, e.slack);
        }
    }

    #[test]
    fn sum_bounds_grow_with_coop(es in 0.0f64..6.0, ei in -1.0f64..6.0) {
        prop_assert!(common::max_decrease(10f64.powf(es), 10f64.powf(ei)) <= 0.0);
    }

    #[test]
    fn shrinking_inner_never_lowers_gap((s, i, c, r) in non_blue(), cut in 0.0f64..3.0) {
        let outer = outer_regime(s, i, c, r).unwrap();
        let inner = inner_regime(s, i, c, r).unwrap().or_origin().0;
        let mut smaller = inner.clone();
        for k in &mut smaller.constraints {
            k.rhs = (k.rhs - cut).max(0.0);
        }
        prop_assert!(gap_to_within(&outer, &smaller).unwrap() + 1e-9 >= gap_to_within(&outer, &inner).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rho_free_bounds_dominate(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (s, i, c) = common::random_symmetric(&mut rng);
        prop_assert!(common::rho_dominance_slack(s, i, c) >= -1e-9);
    }
}

#[test]
fn yellow_gap_at_low_snr() {
    // The simplified region gives up more than 2 bits on the Rp axis here.
    let p = SymmetricParams::new(100.0, 0.9, 1.35).unwrap();
    let g = certify_point(p).unwrap();
    assert_eq!(g.regime, Regime::Yellow);
    assert!((g.gap.unwrap() - 2.3439449610997545).abs() < 1e-6);
    assert!(g.binding_vertex.unwrap()[1].abs() < 1e-12);
}

#[test]
fn green_ii_gap_off_grid() {
    // Between grid points the 2Rp+Rc bound of the simplified region caps Rp
    // on the axis 5.04 bits below the outer corner.
    let p = SymmetricParams::new(156548.5676189594, 0.5642901513491732, 0.16701255703078335).unwrap();
    let g = certify_point(p).unwrap();
    assert_eq!(g.regime, Regime::GreenII);
    assert!((g.gap.unwrap() - 5.03824606657884).abs() < 1e-6);
    assert!(!g.certified);
}

#[test]
fn grid_green_and_red_certify() {
    let (s, a, b) = common::acceptance_grid();
    for r in ccic_core::certify::certify_gap_sweep(&s, &a, &b).unwrap() {
        if !r.external && r.regime != Regime::Yellow {
            assert!(r.certified, "{r:?}");
        }
    }
}

#[test]
fn reference_strong_coop() {
    for &(s, i, c) in &[(1e3, 10.0, 2e3), (1e4, 1e3, 1e5), (50.0, 60.0, 100.0)] {
        let r = reference_comparison_gains(s, i, c).unwrap();
        assert!(r.symmetric_to_reference.is_finite() && r.reference_to_symmetric.is_finite());
        assert!(r.symmetric_to_reference <= 3.0, "{r:?}");
    }
}
