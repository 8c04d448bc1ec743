//! Catalog-wide properties, checked against closed forms and brute force.

use regvar_core::diagnostics::{extrapolate_limit, raabe_at, raabe_statistic, shifted_statistic};
use regvar_core::oracle::{empirical_verdict, partial_sum, EmpiricalVerdict};
use regvar_core::source::Abs;
use regvar_core::verdict::run_ladder;
use regvar_core::{AnalysisConfig, Catalog, Conclusion, TermSource};
use statrs::function::gamma::ln_gamma;

const LN2: f64 = std::f64::consts::LN_2;

fn log_odd_dfact(n: f64) -> f64 {
    // (2n−1)!! = (2n)!/(2^n n!)
    ln_gamma(2.0 * n + 1.0) - n * LN2 - ln_gamma(n + 1.0)
}

/// `log|a_n|` from closed forms, for the entries that have one.
fn closed_form(name: &str, n: f64) -> Option<f64> {
    let ln = f64::ln;
    Some(match name {
        "p_series_2" => -2.0 * ln(n),
        "p_series_half" => -0.5 * ln(n),
        "harmonic" | "alt_harmonic" => -ln(n),
        "inv_n_log" => -ln(n) - ln(ln(n + 1.0)),
        "inv_n_log_sq" => -ln(n) - 2.0 * ln(ln(n)),
        "log_over_n" => ln(ln(n)) - ln(n),
        "wallis" => (n - 1.0) * ln(4.0) + 2.0 * ln_gamma(n) - 2.0 * log_odd_dfact(n),
        "gauss_telescoping" => -ln((n + 1.0) * (n + 2.0)),
        "hypergeometric_ratio" => ln(2.0 / (n * (n + 1.0))),
        "alt_inv_log" => -ln(ln(n + 1.0)),
        "alt_log" => ln(ln(n + 1.0)),
        "alt_exp_theta(-0.5)" => n.powf(-0.5),
        "raabe_product" => (2..=n as u64).map(|k| ln(2.0 - (1.0 / k as f64).exp())).sum(),
        _ => {
            if let Some(b) = param(name, "gamma_ratio(").or_else(|| param(name, "alt_gamma_ratio(")) {
                ln_gamma(2.0 * n + b + 1.0) - n * ln(4.0) - 2.0 * ln_gamma(n + 1.0)
            } else if let Some(a) = param(name, "dfact_ratio(") {
                a * (log_odd_dfact(n) - n * LN2 - ln_gamma(n + 1.0))
            } else if name == "dfact_ratio_sq" {
                2.0 * (log_odd_dfact(n) - n * LN2 - ln_gamma(n + 1.0))
            } else {
                return None;
            }
        }
    })
}

fn param(name: &str, prefix: &str) -> Option<f64> {
    name.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
}

#[test]
fn terms_match_closed_forms() {
    let cat = Catalog::standard();
    let mut checked = 0;
    for e in cat.entries() {
        let src = e.source();
        let first = src.first_index();
        let Some(_) = closed_form(&e.name, first as f64 + 1.0) else { continue };
        for n in [first, first + 1, 10, 1000, 30_000] {
            let want = closed_form(&e.name, n as f64).unwrap();
            let got = src.term(n).unwrap().logmag();
            assert!(
                (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                "{} n={n}: {got} vs {want}",
                e.name
            );
        }
        checked += 1;
    }
    assert!(checked >= 20, "{checked}");
}

#[test]
fn exact_ratios_match_closed_forms() {
    let cat = Catalog::standard();
    for e in cat.entries() {
        let src = e.source();
        for n in [src.first_index() + 3, 50, 400] {
            let (Some(m), Some(a), Some(b)) = (
                src.magnitude_ratio(n),
                closed_form(&e.name, n as f64),
                closed_form(&e.name, n as f64 + 1.0),
            ) else {
                continue;
            };
            let want = (b - a).exp_m1();
            // log-differences of lgamma lose about ε·|log a_n| absolutely.
            let slack = 1e-12 * (1.0 + a.abs()) + 1e-9 * want.abs();
            assert!((m - want).abs() <= slack, "{} n={n}: {m} vs {want}", e.name);
        }
    }
}

#[test]
fn ladder_never_contradicts_the_catalog() {
    let cfg = AnalysisConfig::default();
    let start = std::time::Instant::now();
    let cat = Catalog::standard();
    let mut decisive = 0;
    for e in cat.entries() {
        let v = run_ladder(&*e.source(), &cfg);
        assert!(!v.conclusion.contradicts(e.verdict), "{}: {:?} vs {:?}", e.name, v.conclusion, e.verdict);
        if v.conclusion.is_decisive() {
            decisive += 1;
        }
    }
    assert!(decisive >= 12);
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn oracle_agrees_whenever_it_commits() {
    let cat = Catalog::standard();
    let mut committed = 0;
    for e in cat.entries() {
        let src = e.source();
        let trace = partial_sum(&*src, 1 << 20).unwrap();
        let want = match empirical_verdict(&trace) {
            EmpiricalVerdict::LikelyConverges => Conclusion::Converges,
            EmpiricalVerdict::LikelyDiverges => Conclusion::Diverges,
            EmpiricalVerdict::Undecided => continue,
        };
        committed += 1;
        assert_eq!(want, e.verdict, "{}", e.name);
    }
    assert!(committed >= 8, "{committed}");
}

#[test]
fn raabe_and_log_forms_agree() {
    let cfg = AnalysisConfig::default();
    for e in Catalog::standard().entries() {
        let src = Abs(e.source());
        let s = raabe_statistic(&src, &cfg.grid()).unwrap();
        for ((n, a), l) in s.grid.iter().zip(&s.alpha).zip(&s.alpha_log) {
            // n(e^{t} − 1) − n t = n t²/2 + …, with n t ≈ α(n); only
            // meaningful while t is small.
            if (a / *n as f64).abs() > 0.1 {
                continue;
            }
            let bound = a * a / *n as f64 * (1.0 + a.abs() / *n as f64) + 1e-9 * (1.0 + a.abs());
            assert!((a - l).abs() <= bound.max(1e-12), "{} n={n}: {a} vs {l}", e.name);
        }
        let ea = extrapolate_limit(&s.grid, &s.alpha, cfg.tol).unwrap();
        let el = extrapolate_limit(&s.grid, &s.alpha_log, cfg.tol).unwrap();
        if ea.decisive && el.decisive {
            let hw = 2.0 * ea.half_width.max(el.half_width);
            assert!((ea.value - el.value).abs() <= hw.max(1e-9), "{}: {ea:?} {el:?}", e.name);
        }
    }
}

#[test]
fn shifted_statistic_scales_with_the_shift() {
    let cfg = AnalysisConfig::default();
    let (mut compared, mut skipped) = (0, 0);
    for e in Catalog::standard().entries().iter().filter(|e| e.alpha.is_some()) {
        let src = Abs(e.source());
        let s = raabe_statistic(&src, &cfg.grid()).unwrap();
        let est = extrapolate_limit(&s.grid, &s.alpha, cfg.tol).unwrap();
        if !est.decisive {
            continue;
        }
        for r in 1..=3u64 {
            for k in 0..=1u64 {
                let samples = shifted_statistic(&src, &cfg.grid(), r, k).unwrap();
                let grid: Vec<u64> = cfg.grid().starting_at(src.first_index()).points().to_vec();
                let sh = extrapolate_limit(&grid, &samples, cfg.tol).unwrap();
                if !sh.decisive {
                    skipped += 1;
                    continue;
                }
                compared += 1;
                let want = r as f64 * est.value;
                assert!(
                    (sh.value - want).abs() <= 3.0 * (cfg.tol + sh.half_width + r as f64 * est.half_width),
                    "{} r={r} k={k}: {} vs {want}",
                    e.name,
                    sh.value
                );
            }
        }
    }
    assert!(compared >= 6 * 15, "compared {compared}, skipped {skipped}");
}

#[test]
fn log_ratio_tends_to_the_index() {
    let cfg = AnalysisConfig::default();
    let n = 1_000_000u64;
    for e in Catalog::standard().entries().iter().filter(|e| e.alpha.is_some()) {
        let src = Abs(e.source());
        let s = raabe_statistic(&src, &cfg.grid()).unwrap();
        let est = extrapolate_limit(&s.grid, &s.alpha, cfg.tol).unwrap();
        if !est.decisive {
            continue;
        }
        let log = |m: u64| src.term(m).unwrap().logmag();
        let at = |m: u64| log(m) / (m as f64).ln();
        // log a_n/log n = α + (log C + log L(n))/log n: the gap shrinks but
        // slowly. The two-point slope cancels the constant.
        let gap = (at(n) - est.value).abs();
        assert!(gap < (at(1000) - est.value).abs() || gap < 1e-9, "{}", e.name);
        let slope = (log(n) - log(1000)) / ((n as f64).ln() - 1000f64.ln());
        if !e.log_factor {
            assert!((slope - est.value).abs() < 0.05, "{}: slope {slope} vs {}", e.name, est.value);
        }
        // c_n → 0 below 0, → ∞ above 0
        let (a10, an) = (src.term(10).unwrap().logmag(), src.term(n).unwrap().logmag());
        if est.value < -0.1 {
            assert!(an < a10, "{}", e.name);
        } else if est.value > 0.1 {
            assert!(an > a10, "{}", e.name);
        }
    }
}

#[test]
fn monotone_tail_follows_the_index_sign() {
    let cfg = AnalysisConfig::default();
    for e in Catalog::standard().entries().iter().filter(|e| e.alpha.is_some_and(|a| a != 0.0)) {
        let src = Abs(e.source());
        let alpha = e.alpha.unwrap();
        for &n in cfg.grid().points().iter().skip(8) {
            let (a, _) = raabe_at(&src, n).unwrap();
            assert_eq!(a.signum(), alpha.signum(), "{} n={n}: {a}", e.name);
        }
    }
}

#[test]
fn gamma_ratio_statistic_within_ten_over_n() {
    let n = 1_000_000u64;
    let cat = Catalog::standard();
    for beta in [-0.5, 0.0, 1.0] {
        let src = cat.lookup(&format!("gamma_ratio({beta})")).unwrap().source();
        let (a, _) = raabe_at(&*src, n).unwrap();
        assert!((a - (beta - 0.5)).abs() <= 10.0 / n as f64, "beta={beta}: {a}");
    }
}
