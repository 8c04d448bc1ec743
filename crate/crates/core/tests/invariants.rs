//! Property tests over random inputs.

use proptest::prelude::*;
use regvar_core::classify::{
    class_algebra, classify_variation, construct_rs, transform_check, ClassOp, RepresentationParams,
};
use regvar_core::diagnostics::{extrapolate_limit, raabe_statistic};
use regvar_core::expr::parse;
use regvar_core::oracle::sum_range;
use regvar_core::source::FnSource;
use regvar_core::verdict::run_ladder;
use regvar_core::{
    AnalysisConfig, CompensatedSum, Conclusion, SignedLogValue, TermSource, VariationKind,
};

fn power_log(p: f64, q: f64) -> FnSource {
    FnSource::from_log("power_log", 3, move |n| {
        let x = n as f64;
        p * x.ln() + q * x.ln().ln()
    })
}

fn real(v: SignedLogValue) -> f64 {
    v.to_real()
}

proptest! {
    #[test]
    fn log_domain_arithmetic_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        prop_assume!(a != 0.0 && b != 0.0);
        let (x, y) = (SignedLogValue::from_real(a).unwrap(), SignedLogValue::from_real(b).unwrap());
        let close = |got: f64, want: f64, scale: f64| (got - want).abs() <= 1e-12 * scale;
        prop_assert!(close(real(x.mul(y)), a * b, (a * b).abs()));
        prop_assert!(close(real(x.div(y).unwrap()), a / b, (a / b).abs()));
        prop_assert!(close(real(x.add(y)), a + b, a.abs() + b.abs()));
        prop_assert!(close(real(x.sub(y)), a - b, a.abs() + b.abs()));
    }

    #[test]
    fn compensated_sum_is_order_independent(terms in prop::collection::vec(1e-8f64..1e3, 1..2000)) {
        let mut fwd = CompensatedSum::new();
        terms.iter().for_each(|t| fwd.add(*t));
        let mut back = CompensatedSum::new();
        terms.iter().rev().for_each(|t| back.add(*t));
        prop_assert!((fwd.value() - back.value()).abs() <= 1e-9 * fwd.value());
    }

    #[test]
    fn extrapolation_recovers_model_members(a in -5f64..5.0, b in -50f64..50.0, c in -500f64..500.0) {
        let grid: Vec<u64> = (0..7).map(|j| 10u64 << j).collect();
        let y: Vec<f64> = grid.iter().map(|&n| {
            let x = n as f64;
            a + b / x + c / (x * x)
        }).collect();
        let est = extrapolate_limit(&grid, &y, 1e-3).unwrap();
        prop_assert!(est.decisive);
        prop_assert!((est.value - a).abs() <= 1e-9 * (1.0 + b.abs() + c.abs()), "{est:?}");
    }

    #[test]
    fn raabe_limit_of_powers(p in -4f64..3.0) {
        let src = FnSource::from_log("p", 1, move |n| p * (n as f64).ln())
            .with_ratio(move |n| (p * (1.0 / n as f64).ln_1p()).exp_m1());
        let cfg = AnalysisConfig::default();
        let s = raabe_statistic(&src, &cfg.grid()).unwrap();
        let est = extrapolate_limit(&s.grid, &s.alpha, cfg.tol).unwrap();
        prop_assert!(est.decisive && (est.value - p).abs() < 1e-6, "{est:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladder_is_sound_on_power_log_terms(
        p in prop::sample::select(vec![-3.0, -2.0, -1.5, -1.0, -1.0, -1.0, -0.5, 0.0, 0.5]),
        q in prop::sample::select(vec![-3.0, -2.0, -1.5, -1.0, 0.0, 1.0, 2.0]),
    ) {
        let want = if p < -1.0 || (p == -1.0 && q < -1.0) {
            Conclusion::Converges
        } else {
            Conclusion::Diverges
        };
        let v = run_ladder(&power_log(p, q), &AnalysisConfig::default());
        prop_assert!(!v.conclusion.contradicts(want), "p={p} q={q}: {:?} ({:?})", v.conclusion, v.notes);
        if p != -1.0 {
            prop_assert_eq!(v.conclusion, want);
        }
    }

    #[test]
    fn representation_round_trip(
        alpha in prop::sample::select(vec![-2.0, -1.0, 0.0, 1.0]),
        c in 0.1f64..10.0,
        delta in 0usize..3,
    ) {
        let d: fn(u64) -> f64 = [|_| 0.0, |k| 1.0 / k as f64, |k| 1.0 / (k as f64 + 1.0).ln()][delta];
        let src = construct_rs(RepresentationParams::constant(c, alpha, d)).unwrap();
        let class = classify_variation(&src, &AnalysisConfig::default()).unwrap();
        match class.kind {
            VariationKind::Rs { alpha: a } => prop_assert!((a - alpha).abs() < 2e-3, "{a}"),
            k => prop_assert!(false, "{k:?}"),
        }
    }

    #[test]
    fn transforms_multiply_the_index(
        alpha in prop::sample::select(vec![-1.5, -1.0, -0.5, 0.5]),
        f in prop::sample::select(vec![("x^2", 2.0), ("sqrt(x)", 0.5), ("x^3", 3.0), ("x", 1.0)]),
    ) {
        let src = FnSource::from_log("p", 1, move |n| alpha * (n as f64).ln())
            .with_ratio(move |n| (alpha * (1.0 / n as f64).ln_1p()).exp_m1());
        let expr = parse(f.0).unwrap();
        let check = transform_check(&src, &expr, alpha, f.1, &AnalysisConfig::default()).unwrap();
        prop_assert!(check.agrees, "{check:?}");
    }
}

#[test]
fn class_algebra_matches_numerics() {
    let cfg = AnalysisConfig::default();
    let class_of = |src: &dyn TermSource| classify_variation(src, &cfg).unwrap().kind;
    let a = power_log(-1.5, 1.0);
    let b = power_log(0.5, -2.0);
    let prod = FnSource::from_log("prod", 3, |n| {
        let x = n as f64;
        -x.ln() - x.ln().ln()
    });
    let (ka, kb) = (class_of(&a), class_of(&b));
    let want = class_algebra(&ka, &kb, ClassOp::Product).kind;
    match (want, class_of(&prod)) {
        (VariationKind::Rs { alpha: w }, VariationKind::Rs { alpha: g }) => assert!((w - g).abs() < 3e-3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        class_algebra(&kb, &ka, ClassOp::Difference).kind,
        VariationKind::Rs { alpha } if (alpha - 0.5).abs() < 3e-3
    ));
    assert_eq!(class_algebra(&ka, &kb, ClassOp::Difference).kind, VariationKind::Unknown);
}

#[test]
fn sums_of_regularly_varying_terms_follow_karamata() {
    // Σ_{k≤n} k^{-1/2} ≈ 2√n, the n c_n/(α+1) of Karamata's theorem.
    let src = FnSource::from_log("p", 1, |n| -0.5 * (n as f64).ln());
    let n = 1_000_000u64;
    let s = sum_range(&src, 1, n).unwrap();
    assert!((s / (2.0 * (n as f64).sqrt()) - 1.0).abs() < 1e-3);
}
