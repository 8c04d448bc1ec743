//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every criterion is evaluated as stated. A few cannot hold as stated (the
//! reasons are printed next to the measured values); those are listed in
//! `KNOWN_FAILURES` and reported as FAIL without failing the test run. Any
//! other FAIL fails the test.

#[path = "../../core/tests/support/exprgen.rs"]
mod exprgen;

use std::io::Write as _;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regvar_core::classify::{
    classify_variation, construct_rs, ratio_envelope, RepresentationParams, VariationKind,
};
use regvar_core::diagnostics::{
    extrapolate_limit, raabe_statistic, second_order_statistic, IndexGrid, WeightFamily,
};
use regvar_core::expr::{eval_logdomain, parse};
use regvar_core::oracle::{partial_sum, sum_range, tail_sum};
use regvar_core::source::{Abs, FnSource};
use regvar_core::verdict::{karamata_estimate, run_ladder, PairDifference};
use regvar_core::{AnalysisConfig, Catalog, Conclusion, TermSource};

// Tolerances as stated by the criteria.
const RUNTIME_LIMIT_S: f64 = 30.0;
const INDEX_TOL: f64 = 1e-3;
const SECOND_ORDER_TOL: f64 = 1e-2;
const KARAMATA_BAND: f64 = 0.01;
const KARAMATA_BAND_NEAR_MINUS_ONE: f64 = 0.05;
const KARAMATA_TREND: f64 = 2.0;
const DIFFERENCE_REL: f64 = 0.05;
const ROUND_TRIP_TOL: f64 = 2e-3;
const LOG_RATIO_TOL: f64 = 0.05;
const ENVELOPE_SLACK: f64 = 0.05;
const PARSER_REL: f64 = 1e-9;

/// Criteria that cannot hold as stated, with the reason.
const KNOWN_FAILURES: &[(u8, &str)] = &[
    (3, "a_n = 4^(n-1)((n-1)!)^2/((2n-1)!!)^2 has a_(n+1)/a_n = 4n^2/(2n+1)^2, so n(alpha(n)+1) = n(3n+1)/(2n+1)^2 → 3/4, not 1"),
    (4, "n c_n/S_n ≈ 1/(log n + const) for n^-1 times a constant: the drop from 10^3 to 10^6 is (6.9+c)/(13.8+c) < 2 for c > 0"),
    (5, "1/log(2n+2) − 1/log(2n+1) ~ −1/(2n (log 2n)^2), half of −1/(n (log n)^2) asymptotically"),
    (6, "log c_n/log n − alpha = (log C + Σ δ_k/k)/log n, which is still ≥ 0.05 at 10^6 for δ_k = 1/k and 1/log(k+1)"),
    (7, "both sequences have unbounded alpha(n), so the ratio-envelope bounds do not apply; a_2n/a_n oscillates outside them"),
];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {line}", if ok { "ok" } else { "x" }));
    }

    fn info(&mut self, line: String) {
        self.lines.push(format!("    (info) {line}"));
    }
}

fn cat_source(name: &str) -> Box<dyn TermSource> {
    Catalog::standard()
        .lookup(name)
        .unwrap_or_else(|| panic!("no catalog entry {name}"))
        .source()
}

fn alpha_hat(src: &dyn TermSource, cfg: &AnalysisConfig) -> regvar_core::LimitEstimate {
    let s = raabe_statistic(&Abs(src), &cfg.grid()).unwrap();
    extrapolate_limit(&s.grid, &s.alpha, cfg.tol).unwrap()
}

fn power(p: f64) -> FnSource {
    FnSource::from_log("power", 1, move |n| p * (n as f64).ln())
        .with_ratio(move |n| (p * (1.0 / n as f64).ln_1p()).exp_m1())
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let cfg = AnalysisConfig::default();
    let start = Instant::now();
    let table: &[(&str, Conclusion)] = &[
        ("p_series_2", Conclusion::Converges),
        ("p_series_half", Conclusion::Diverges),
        ("harmonic", Conclusion::Diverges),
        ("inv_n_log", Conclusion::Diverges),
        ("inv_n_log_sq", Conclusion::Converges),
        ("log_over_n", Conclusion::Diverges),
        ("raabe_product", Conclusion::Diverges),
        ("gamma_ratio(-1)", Conclusion::Converges),
        ("gamma_ratio(-0.5)", Conclusion::Diverges),
        ("gamma_ratio(0)", Conclusion::Diverges),
        ("wallis", Conclusion::Diverges),
        ("dfact_ratio(1)", Conclusion::Diverges),
        ("dfact_ratio_sq", Conclusion::Diverges),
        ("dfact_ratio(3)", Conclusion::Converges),
        ("gauss_telescoping", Conclusion::Converges),
    ];
    let mut reproduced = 0;
    for &(name, want) in table {
        let src = cat_source(name);
        let v = run_ladder(&*src, &cfg);
        if v.conclusion == want {
            reproduced += 1;
            o.check(true, format!("{name}: {} ({})", v.conclusion, v.decided_by.map_or("-", |r| r.label())));
        } else if v.conclusion == Conclusion::Inconclusive && name == "inv_n_log" {
            let trace = partial_sum(&*src, cfg.n_max).unwrap();
            let oracle = regvar_core::oracle::empirical_verdict(&trace);
            let s = trace.partial_sums.last().unwrap();
            o.check(
                true,
                format!("{name}: Inconclusive (allowed); oracle note: S(2^20) = {s:.6}, empirical {oracle:?}"),
            );
        } else {
            o.check(false, format!("{name}: got {}, documented {want}", v.conclusion));
        }
    }
    let mut contradictions = 0;
    for e in Catalog::standard().entries() {
        if run_ladder(&*e.source(), &cfg).conclusion.contradicts(e.verdict) {
            contradictions += 1;
            o.check(false, format!("{} contradicts its documented verdict", e.name));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    o.check(reproduced >= 12, format!("{reproduced} of {} listed entries reproduced (need ≥ 12)", table.len()));
    o.check(contradictions == 0, format!("{contradictions} contradictions over the whole catalog"));
    o.check(secs < RUNTIME_LIMIT_S, format!("runtime {secs:.1} s (limit {RUNTIME_LIMIT_S} s)"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let cfg = AnalysisConfig::default();
    let mut cases: Vec<(String, Box<dyn TermSource>, f64)> = Vec::new();
    for p in [0.5, 1.0, 2.0] {
        cases.push((format!("1/n^{p}"), Box::new(power(-p)), -p));
    }
    for beta in [-1.0, -0.5, 0.0, 1.0] {
        let name = format!("gamma_ratio({beta})");
        cases.push((name.clone(), cat_source(&name), beta - 0.5));
    }
    for (name, a) in [("dfact_ratio(1)", 1.0), ("dfact_ratio_sq", 2.0), ("dfact_ratio(3)", 3.0)] {
        cases.push((name.into(), cat_source(name), -a / 2.0));
    }
    cases.push(("wallis".into(), cat_source("wallis"), -1.0));
    for (name, src, want) in cases {
        let est = alpha_hat(&*src, &cfg);
        let ok = est.decisive && (est.value - want).abs() <= INDEX_TOL;
        o.check(ok, format!("{name}: alpha_hat = {est} vs {want}"));
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let grid = AnalysisConfig::default().grid();
    for (name, want) in [
        ("dfact_ratio_sq", 1.25),
        ("wallis", 1.0),
        ("gamma_ratio(-0.5)", 19.0 / 16.0),
        ("raabe_product", 0.5),
    ] {
        let src = cat_source(name);
        let s = second_order_statistic(&*src, -1.0, WeightFamily::Power(1.0), &grid).unwrap();
        let beta = s.second_order.unwrap().beta;
        let est = extrapolate_limit(&s.grid, &beta, 1e-3).unwrap();
        let ok = (est.value - want).abs() <= SECOND_ORDER_TOL;
        o.check(ok, format!("{name}: n(alpha(n)+1) → {est} vs {want}"));
    }
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let cfg = AnalysisConfig::default();
    let n = 100_000u64;
    for alpha in [-3.0, -2.0, -1.5, -0.5, 0.0, 1.0] {
        let src = power(alpha);
        let est = alpha_hat(&src, &cfg);
        let k = karamata_estimate(&src, &est, n, cfg.tol).unwrap();
        let predicted = k.value.unwrap();
        let actual = if alpha > -1.0 {
            sum_range(&src, 1, n).unwrap()
        } else {
            tail_sum(&src, n, 64 * n).unwrap()
        };
        let band = if (alpha + 1.0f64).abs() <= 0.1 { KARAMATA_BAND_NEAR_MINUS_ONE } else { KARAMATA_BAND };
        let r = predicted / actual;
        o.check((r - 1.0).abs() <= band, format!("n^{alpha}: estimate/oracle = {r:.6} at n = 10^5"));
    }
    let cat = Catalog::standard();
    for e in cat.entries().iter().filter(|e| e.alpha == Some(-1.0) && !e.alternating) {
        let src = e.source();
        let ratio_at = |m: u64| {
            let s = sum_range(&*src, src.first_index(), m).unwrap();
            (m as f64) * src.term(m).unwrap().to_real() / s
        };
        let (r3, r6) = (ratio_at(1000), ratio_at(1_000_000));
        let drop = r3 / r6;
        o.check(
            drop >= KARAMATA_TREND,
            format!("{}: n c_n/S_n = {r3:.4e} at 10^3, {r6:.4e} at 10^6 (drop {drop:.3}x)", e.name),
        );
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let cfg = AnalysisConfig::default();
    for (name, want) in [
        ("alt_inv_log", Conclusion::Converges),
        ("alt_log", Conclusion::Diverges),
        ("alt_gamma_ratio(-1)", Conclusion::Converges),
        ("alt_gamma_ratio(0)", Conclusion::Converges),
        ("alt_gamma_ratio(1)", Conclusion::Diverges),
        ("alt_exp_theta(-0.5)", Conclusion::Converges),
    ] {
        let v = run_ladder(&*cat_source(name), &cfg);
        o.check(v.conclusion == want, format!("{name}: {}", v.conclusion));
    }
    let src = cat_source("alt_inv_log");
    let diff = PairDifference::new(&*src);
    let k = 10_000u64;
    let x = k as f64;
    let d = diff.term(k).unwrap().to_real();
    let stated = -1.0 / (x * x.ln().powi(2));
    let rel = (d / stated - 1.0).abs();
    o.check(rel <= DIFFERENCE_REL, format!("c_n - b_n = {d:.6e} vs -1/(n (log n)^2) = {stated:.6e} at n = 10^4 (rel. error {rel:.3})"));
    let exact = 1.0 / (2.0 * x + 2.0).ln() - 1.0 / (2.0 * x + 1.0).ln();
    let leading = -1.0 / (2.0 * x * (2.0 * x).ln().powi(2));
    o.info(format!(
        "closed form 1/log(2n+2) - 1/log(2n+1) = {exact:.6e} (rel. {:.1e}); -1/(2n (log 2n)^2) = {leading:.6e} (rel. {:.3})",
        (d / exact - 1.0).abs(),
        (d / leading - 1.0).abs()
    ));
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let cfg = AnalysisConfig::default();
    let deltas: [(&str, fn(u64) -> f64); 3] = [
        ("0", |_| 0.0),
        ("1/k", |k| 1.0 / k as f64),
        ("1/log(k+1)", |k| 1.0 / (k as f64 + 1.0).ln()),
    ];
    let n = 1_000_000u64;
    for alpha in [-2.0, -1.0, 0.0, 1.0] {
        for (label, delta) in deltas {
            let src = construct_rs(RepresentationParams::constant(1.0, alpha, delta)).unwrap();
            let class = classify_variation(&src, &cfg).unwrap();
            let recovered = match class.kind {
                VariationKind::Rs { alpha } => Some(alpha),
                _ => None,
            };
            let ok_alpha = recovered.is_some_and(|a| (a - alpha).abs() <= ROUND_TRIP_TOL);
            let ratio = src.term(n).unwrap().logmag() / (n as f64).ln();
            let ok_ratio = (ratio - alpha).abs() <= LOG_RATIO_TOL;
            o.check(
                ok_alpha && ok_ratio,
                format!(
                    "C = 1, alpha = {alpha}, delta = {label}: class {}, log c_n/log n = {ratio:.4} at 10^6",
                    class.kind
                ),
            );
        }
    }
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let top = 1_000_000u64;
    let floor_exp = cat_source("floor_exp");
    let mut ok = true;
    floor_exp
        .scan(1, top, &mut |n, v| {
            let (a, x) = (v.to_real(), n as f64);
            ok &= a >= x / std::f64::consts::E * (1.0 - 1e-12) && a <= x * (1.0 + 1e-12);
        })
        .unwrap();
    o.check(ok, "floor_exp: n/e ≤ a_n ≤ n for every n ≤ 10^6".into());
    let sin_power = cat_source("sin_log_power");
    let mut ok = true;
    sin_power
        .scan(1, top, &mut |n, v| {
            let (l, x) = (v.logmag(), (n as f64).ln());
            ok &= l >= 0.25 * x - 1e-12 && l <= 0.75 * x + 1e-12;
        })
        .unwrap();
    o.check(ok, "sin_log_power: n^0.25 ≤ a_n ≤ n^0.75 for every n ≤ 10^6".into());
    let grid = IndexGrid::geometric(16, top / 2);
    for (name, lo, hi) in [("floor_exp", 1.0, 1.0), ("sin_log_power", 0.25, 0.75)] {
        let env = ratio_envelope(&*cat_source(name), 2.0, &grid).unwrap();
        let ok = env.within_power_bounds(lo, hi, ENVELOPE_SLACK);
        o.check(
            ok,
            format!(
                "{name}: a_2n/a_n in [{:.4}, {:.4}] vs [{:.4}, {:.4}] ±5%",
                env.liminf,
                env.limsup,
                2f64.powf(lo),
                2f64.powf(hi)
            ),
        );
    }
    let env = ratio_envelope(&*cat_source("oscillating_power"), 2.0, &grid).unwrap();
    o.info(format!(
        "oscillating_power (alpha(n) bounded in [-1.8, -1.2]): a_2n/a_n in [{:.4}, {:.4}], bounds [{:.4}, {:.4}] ±5%: {}",
        env.liminf,
        env.limsup,
        2f64.powf(-1.8),
        2f64.powf(-1.2),
        if env.within_power_bounds(-1.8, -1.2, ENVELOPE_SLACK) { "inside" } else { "outside" }
    ));
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    let (mut trees, mut points, mut worst) = (0, 0, 0.0f64);
    let mut mismatches = Vec::new();
    while trees < 1000 {
        let tree = exprgen::gen(&mut rng, 4);
        let text = tree.render(&mut rng);
        let Ok(expr) = parse(&text) else {
            mismatches.push(format!("{text}: parse error"));
            trees += 1;
            continue;
        };
        let mut used = false;
        for n in [1u64, 2, 7, 19] {
            let Some((want, scale)) = tree.eval(n) else { continue };
            used = true;
            points += 1;
            match eval_logdomain(&expr, n) {
                Ok(v) => {
                    let err = (v.to_real() - want).abs() / scale.max(want.abs()).max(f64::MIN_POSITIVE);
                    worst = worst.max(err);
                    if err > PARSER_REL {
                        mismatches.push(format!("{text} at n={n}: {} vs {want}", v.to_real()));
                    }
                }
                Err(e) => mismatches.push(format!("{text} at n={n}: {e}")),
            }
        }
        trees += used as usize;
    }
    o.check(
        mismatches.is_empty(),
        format!("{trees} random trees, {points} evaluations, worst relative error {worst:.1e} (limit {PARSER_REL:e})"),
    );
    for m in mismatches.iter().take(5) {
        o.info(m.clone());
    }
    let malformed = ["", "n +", "(n", "n)", "2**n", "log(", "sin(n, 2)", "foo(n)", "n # 1", "1/(n - )", "pow(n 2)", "1..2"];
    let positioned = malformed
        .iter()
        .filter(|t| parse(t).is_err_and(|e| e.offset <= t.len()))
        .count();
    o.check(
        positioned == malformed.len(),
        format!("{positioned} of {} malformed inputs rejected with an offset", malformed.len()),
    );
    o
}

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_regvar"))
        .args(args)
        .output()
        .expect("run regvar");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    for args in [
        &["analyze", "--expr", "1/n^2", "--json"][..],
        &["analyze", "--name", "dfact_ratio_sq", "--json"][..],
        &["analyze", "--name", "alt_inv_log", "--json"][..],
    ] {
        let (a, code_a) = run_cli(args);
        let (b, code_b) = run_cli(args);
        o.check(
            a == b && code_a == code_b && !a.is_empty(),
            format!("{}: {} bytes, identical = {}, exit {code_a}", args[1..].join(" "), a.len(), a == b),
        );
    }
    let (out, _) = run_cli(&["analyze", "--expr", "1/n^2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let alpha = v["verdict"]["alpha"]["value"].as_f64().unwrap_or(f64::NAN);
    o.check(
        v["verdict"]["conclusion"] == "Converges" && (alpha + 2.0).abs() < INDEX_TOL,
        format!("1/n^2: {} with alpha {alpha:.6}", v["verdict"]["conclusion"]),
    );
    o
}

#[test]
fn acceptance() {
    let criteria: [(u8, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    let mut report = String::new();
    for (id, run) in criteria {
        let out = run();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        report.push_str(&format!("criterion {id}: {}\n", if out.pass { "PASS" } else { "FAIL" }));
        for l in &out.lines {
            report.push_str(l);
            report.push('\n');
        }
        match (out.pass, known) {
            (false, Some((_, why))) => report.push_str(&format!("    known failure: {why}\n")),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => report.push_str("    listed as a known failure but passes now\n"),
            (true, None) => {}
        }
    }
    // Written past libtest's capture so the lines show in a plain `cargo test`.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "\n{report}");
    let _ = out.flush();
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}\n{report}");
}
