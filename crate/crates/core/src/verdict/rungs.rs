//! The individual tests of the ladder.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AnalysisConfig, AsymptoticEstimate, BetaEstimate, Conclusion, LadderContext, Rung, SumTarget};
use crate::classify::{VariationClass, VariationKind};
use crate::diagnostics::{
    doubling_ratios, extrapolate_limit, raabe_at, scan_alpha, second_order_statistic, tail_start,
    DiagnosticSeries, IndexGrid, LimitEstimate, WeightFamily,
};
use crate::lsq;
use crate::source::{TermError, TermSource};
use crate::value::CompensatedSum;

use super::karamata::karamata_estimate;

/// Width of the `±ε` envelopes reported by the second-order rungs.
pub const ENVELOPE_EPS: f64 = 0.05;
/// Distance from `1/2` the doubling ratios must keep.
pub const DOUBLING_MARGIN: f64 = 0.02;
/// Smallest Gauss exponent `r` accepted from the regression.
pub const GAUSS_MIN_R: f64 = 1.1;
/// Margin around `−1` for the exponents of an O-regular class.
pub const ORS_MARGIN: f64 = 0.1;
/// Margin around `−1` for fitted sandwich exponents.
pub const SANDWICH_MARGIN: f64 = 0.25;

/// What one rung found.
#[derive(Debug, Clone, PartialEq)]
pub struct RungOutcome {
    pub rung: Rung,
    /// `Inconclusive` means escalate.
    pub conclusion: Conclusion,
    pub note: String,
    pub estimate: Option<AsymptoticEstimate>,
    pub beta: Option<BetaEstimate>,
    pub gauss: Option<GaussForm>,
}

impl RungOutcome {
    pub fn skip(rung: Rung, note: impl Into<String>) -> Self {
        RungOutcome {
            rung,
            conclusion: Conclusion::Inconclusive,
            note: note.into(),
            estimate: None,
            beta: None,
            gauss: None,
        }
    }

    fn decide(rung: Rung, conclusion: Conclusion, note: impl Into<String>) -> Self {
        RungOutcome {
            conclusion,
            ..Self::skip(rung, note)
        }
    }

    fn with_estimate(mut self, e: Option<AsymptoticEstimate>) -> Self {
        self.estimate = e;
        self
    }
}

fn snap(alpha_hat: &LimitEstimate, config: &AnalysisConfig) -> (f64, bool) {
    if config.in_band(alpha_hat, -1.0) {
        (-1.0, true)
    } else {
        (alpha_hat.value, false)
    }
}

/// Sum estimate from `|a_n| ∼ c·n^p`.
fn power_law_sum(c: f64, p: f64, at_minus_one: bool) -> AsymptoticEstimate {
    let mut e = if at_minus_one {
        AsymptoticEstimate::order(SumTarget::PartialSum, 0.0, 1.0)
    } else if p > -1.0 {
        AsymptoticEstimate::order(SumTarget::PartialSum, p + 1.0, 0.0)
    } else {
        AsymptoticEstimate::order(SumTarget::TailSum, p + 1.0, 0.0)
    };
    e.constant = Some(if at_minus_one { c } else { c / libm::fabs(p + 1.0) });
    e
}

fn power_law_constant(src: &dyn TermSource, n: u64, p: f64) -> Option<f64> {
    let l = src.term(n).ok()?.logmag();
    let c = libm::exp(l - p * libm::log(n as f64));
    c.is_finite().then_some(c)
}

/// Raabe's test on an extrapolated `α̂`.
pub fn raabe_test(
    src: &dyn TermSource,
    alpha_hat: &LimitEstimate,
    grid: &IndexGrid,
    config: &AnalysisConfig,
) -> RungOutcome {
    if !alpha_hat.decisive {
        return RungOutcome::skip(
            Rung::Raabe,
            format!("alpha_hat not decisive (± {:.1e})", alpha_hat.half_width),
        );
    }
    if config.in_band(alpha_hat, -1.0) {
        return RungOutcome::skip(
            Rung::Raabe,
            format!(
                "alpha_hat = {:.6} is in the -1 band (± {:.1e}); escalating",
                alpha_hat.value,
                config.tol.max(3.0 * alpha_hat.half_width)
            ),
        );
    }
    let n = grid.last().unwrap_or(1);
    let estimate = karamata_estimate(src, alpha_hat, n, config.tol).ok();
    let (conclusion, note) = if alpha_hat.value < -1.0 {
        (
            Conclusion::Converges,
            format!("alpha_hat = {:.6} < -1: Σ|a_k| < ∞; tail ~ n|a_n|/(-1-alpha)", alpha_hat.value),
        )
    } else {
        (
            Conclusion::Diverges,
            format!("alpha_hat = {:.6} > -1: Σ|a_k| = ∞; partial sums ~ n|a_n|/(alpha+1)", alpha_hat.value),
        )
    };
    RungOutcome::decide(Rung::Raabe, conclusion, note).with_estimate(estimate)
}

/// `α(n) = p + n^{1−r} B_n` fitted on the grid tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussForm {
    pub p: f64,
    /// `f64::INFINITY` when `α(n) = p` exactly on the tail.
    pub r: f64,
    /// `sup |n^{r−1}(α(n) − p)|` over the grid tail.
    pub bound_estimate: f64,
}

/// Level below which `|α(n) − p|` is indistinguishable from rounding.
fn noise_floor(src: &dyn TermSource, n: u64, p: f64) -> f64 {
    let x = n as f64;
    if src.magnitude_ratio(n).is_some() {
        1e-13 * (1.0 + libm::fabs(p))
    } else {
        8.0 * f64::EPSILON * x * (2.0 + libm::fabs(p) * libm::log(x))
    }
}

/// Gauss's test: `α(n) = p + n^{1−r}B_n` with `r > 1` and bounded `B_n`
/// gives `a_n ∼ c·n^p`, hence divergence iff `p ≥ −1`.
pub fn gauss_test(
    src: &dyn TermSource,
    series: &DiagnosticSeries,
    alpha_hat: &LimitEstimate,
    config: &AnalysisConfig,
) -> RungOutcome {
    if !alpha_hat.decisive {
        return RungOutcome::skip(Rung::Gauss, "alpha_hat not decisive");
    }
    let (p, at_minus_one) = snap(alpha_hat, config);
    let m = series.grid.len();
    if m < 4 {
        return RungOutcome::skip(Rung::Gauss, "fewer than 4 grid points");
    }
    let tail: Vec<(u64, f64)> = series.grid[tail_start(m)..]
        .iter()
        .zip(&series.alpha[tail_start(m)..])
        .map(|(&n, &a)| (n, a - p))
        .collect();
    let above: Vec<(f64, f64)> = tail
        .iter()
        .filter(|(n, d)| libm::fabs(*d) > noise_floor(src, *n, p))
        .map(|&(n, d)| (libm::log(n as f64), libm::log(libm::fabs(d))))
        .collect();

    let form = if above.is_empty() {
        GaussForm {
            p,
            r: f64::INFINITY,
            bound_estimate: 0.0,
        }
    } else {
        if above.len() < 3 {
            return RungOutcome::skip(
                Rung::Gauss,
                "alpha(n) - p is at rounding level on part of the tail; no regression",
            );
        }
        let last = &above[above.len().saturating_sub(4)..];
        let (x, y): (Vec<f64>, Vec<f64>) = last.iter().copied().unzip();
        let Some((_, slope)) = lsq::line(&x, &y) else {
            return RungOutcome::skip(Rung::Gauss, "log-log regression failed");
        };
        let r = 1.0 - slope;
        if !(r > GAUSS_MIN_R) {
            return RungOutcome::skip(
                Rung::Gauss,
                format!("fitted r = {r:.3} ≤ {GAUSS_MIN_R}: no Gauss form"),
            );
        }
        let b: Vec<f64> = tail
            .iter()
            .map(|&(n, d)| libm::fabs(d) * libm::pow(n as f64, r - 1.0))
            .collect();
        let recent = &b[b.len().saturating_sub(4)..];
        let hi = recent.iter().copied().fold(0.0, f64::max);
        let lo = recent.iter().copied().fold(f64::INFINITY, f64::min);
        if !(hi.is_finite()) || hi > 2.0 * lo.max(f64::MIN_POSITIVE) {
            return RungOutcome::skip(
                Rung::Gauss,
                format!("n^(r-1)|alpha(n) - p| not bounded on the tail (r = {r:.3})"),
            );
        }
        GaussForm {
            p,
            r,
            bound_estimate: b.iter().copied().fold(0.0, f64::max),
        }
    };

    let n = series.grid[m - 1];
    let c = power_law_constant(src, n, p);
    let estimate = c.map(|c| {
        let mut e = power_law_sum(c, p, at_minus_one);
        e.at = Some(n);
        e
    });
    let conclusion = if at_minus_one || p > -1.0 {
        Conclusion::Diverges
    } else {
        Conclusion::Converges
    };
    let r_text = if form.r.is_infinite() {
        String::from("alpha(n) = p exactly")
    } else {
        format!("r = {:.3}, sup|B_n| = {:.4}", form.r, form.bound_estimate)
    };
    let c_text = c.map_or(String::new(), |c| format!(" with c ≈ {c:.6}"));
    let note = format!(
        "alpha(n) = p + n^(1-r) B_n with p = {p:.6}, {r_text}; a_n ~ c n^p{c_text}; {}",
        if conclusion == Conclusion::Diverges {
            "p ≥ -1 so Σ a_n = ∞"
        } else {
            "p < -1 so Σ a_n < ∞"
        }
    );
    let mut out = RungOutcome::decide(Rung::Gauss, conclusion, note).with_estimate(estimate);
    out.gauss = Some(form);
    out
}

/// Whether `|β(n)|` stays bounded on the grid tail: either it has a limit,
/// or its recent samples do not exceed the earlier tail by more than 25%.
fn bounded_tail(beta: &[f64], est: Option<&LimitEstimate>) -> bool {
    if est.is_some_and(|e| e.decisive) {
        return true;
    }
    let m = beta.len();
    if m < 6 || beta.iter().any(|b| !b.is_finite()) {
        return false;
    }
    let t = tail_start(m);
    let (early, recent) = beta[t..].split_at((m - t) / 2);
    let sup = |s: &[f64]| s.iter().map(|b| libm::fabs(*b)).fold(0.0, f64::max);
    sup(recent) <= 1.25 * sup(early) + 1e-12
}

/// Second-order test with weight `b(n)`.
///
/// For summable `Σ 1/(k b(k))`, a bounded `β(n)` gives `|a_n| ∼ C n^α` and
/// the verdict follows the sign of `α + 1` (including `α = −1`). For the
/// divergent families `β(n) → β` gives power bounds `n^{α+β±ε}`, which decide
/// when `β ≥ 0, α + β < −1` or `β ≤ 0, α + β > −1`.
pub fn refined_test(
    src: &dyn TermSource,
    alpha_hat: &LimitEstimate,
    family: WeightFamily,
    grid: &IndexGrid,
    config: &AnalysisConfig,
) -> RungOutcome {
    if !alpha_hat.decisive {
        return RungOutcome::skip(Rung::Refined, "alpha_hat not decisive");
    }
    let (alpha, at_minus_one) = snap(alpha_hat, config);
    let grid = grid.starting_at(family.min_index());
    let series = match second_order_statistic(src, alpha, family, &grid) {
        Ok(s) => s,
        Err(e) => return RungOutcome::skip(Rung::Refined, format!("b(n) = {family}: {e}")),
    };
    let beta = series.second_order.as_ref().map(|s| s.beta.clone()).unwrap_or_default();
    let est = extrapolate_limit(&series.grid, &beta, config.tol).ok();
    let beta_est = est.map(|estimate| BetaEstimate { family, estimate });

    let mut out = if family.summable() {
        if !bounded_tail(&beta, est.as_ref()) {
            RungOutcome::skip(
                Rung::Refined,
                format!("b(n) = {family} (Σ1/(k b(k)) < ∞) but b(n)(alpha(n) - alpha) is not bounded"),
            )
        } else {
            let n = series.grid.last().copied().unwrap_or(1);
            let c = power_law_constant(src, n, alpha);
            let conclusion = if at_minus_one || alpha > -1.0 {
                Conclusion::Diverges
            } else {
                Conclusion::Converges
            };
            let limit = est.map_or(String::from("bounded"), |e| format!("→ {:.6}", e.value));
            let note = format!(
                "b(n) = {family}, Σ1/(k b(k)) < ∞ and b(n)(alpha(n) - alpha) {limit}; |a_n| ~ C n^{alpha:.6}{}; {}",
                c.map_or(String::new(), |c| format!(" with C ≈ {c:.6}")),
                if conclusion == Conclusion::Diverges {
                    "alpha ≥ -1 so Σ|a_k| = ∞"
                } else {
                    "alpha < -1 so Σ|a_k| < ∞"
                }
            );
            let estimate = c.map(|c| {
                let mut e = power_law_sum(c, alpha, at_minus_one);
                e.at = Some(n);
                e
            });
            RungOutcome::decide(Rung::Refined, conclusion, note).with_estimate(estimate)
        }
    } else {
        match est {
            Some(e) if e.decisive => {
                let b = e.value;
                let band = config.tol.max(3.0 * e.half_width);
                let s = alpha + b;
                let env = format!(
                    "n^{:.4} ⪯ |a_n| ⪯ n^{:.4}",
                    s - ENVELOPE_EPS,
                    s + ENVELOPE_EPS
                );
                if b >= -band && s + band < -1.0 {
                    RungOutcome::decide(
                        Rung::Refined,
                        Conclusion::Converges,
                        format!("b(n) = {family}, beta = {b:.6} ≥ 0 and alpha + beta = {s:.6} < -1: Σ|a_k| < ∞ ({env})"),
                    )
                    .with_estimate(Some(AsymptoticEstimate::order(SumTarget::TailSum, s + 1.0, 0.0)))
                } else if b <= band && s - band > -1.0 {
                    RungOutcome::decide(
                        Rung::Refined,
                        Conclusion::Diverges,
                        format!("b(n) = {family}, beta = {b:.6} ≤ 0 and alpha + beta = {s:.6} > -1: Σ|a_k| = ∞ ({env})"),
                    )
                    .with_estimate(Some(AsymptoticEstimate::order(SumTarget::PartialSum, s + 1.0, 0.0)))
                } else {
                    RungOutcome::skip(
                        Rung::Refined,
                        format!("b(n) = {family}, beta = {b:.6}, alpha + beta = {s:.6}: power bounds {env} do not decide"),
                    )
                }
            }
            _ => RungOutcome::skip(
                Rung::Refined,
                format!("b(n) = {family}: b(n)(alpha(n) - alpha) has no decisive limit"),
            ),
        }
    };
    out.beta = beta_est;
    out
}

/// Bertrand's test with `b(n) = log n`.
pub fn bertrand_test(
    src: &dyn TermSource,
    alpha_hat: &LimitEstimate,
    grid: &IndexGrid,
    config: &AnalysisConfig,
) -> RungOutcome {
    if !alpha_hat.decisive {
        return RungOutcome::skip(Rung::Bertrand, "alpha_hat not decisive");
    }
    let (alpha, at_minus_one) = snap(alpha_hat, config);
    let family = WeightFamily::Log;
    let grid = grid.starting_at(family.min_index());
    let series = match second_order_statistic(src, alpha, family, &grid) {
        Ok(s) => s,
        Err(e) => return RungOutcome::skip(Rung::Bertrand, e.to_string()),
    };
    let beta = series.second_order.as_ref().map(|s| s.beta.clone()).unwrap_or_default();
    let est = match extrapolate_limit(&series.grid, &beta, config.tol) {
        Ok(e) => e,
        Err(e) => return RungOutcome::skip(Rung::Bertrand, e.to_string()),
    };
    let beta_est = Some(BetaEstimate {
        family,
        estimate: est,
    });
    if !est.decisive {
        let mut out = RungOutcome::skip(
            Rung::Bertrand,
            format!("log n (alpha(n) - alpha) not decisive (± {:.1e})", est.half_width),
        );
        out.beta = beta_est;
        return out;
    }
    let b = est.value;
    let eps = ENVELOPE_EPS;
    let mut out = if at_minus_one {
        if config.in_band(&est, -1.0) {
            RungOutcome::skip(
                Rung::Bertrand,
                format!(
                    "case (v): alpha = -1 and beta = {b:.6} ≈ -1; Bertrand's test gives no conclusion"
                ),
            )
        } else if b > -1.0 {
            RungOutcome::decide(
                Rung::Bertrand,
                Conclusion::Diverges,
                format!(
                    "case (iii): alpha = -1, beta = {b:.6} > -1: Σ|a_k| = ∞, (log n)^{:.4} ⪯ S_n ⪯ (log n)^{:.4}",
                    b + 1.0 - eps,
                    b + 1.0 + eps
                ),
            )
            .with_estimate(Some(AsymptoticEstimate::order(SumTarget::PartialSum, 0.0, b + 1.0)))
        } else {
            RungOutcome::decide(
                Rung::Bertrand,
                Conclusion::Converges,
                format!(
                    "case (iv): alpha = -1, beta = {b:.6} < -1: Σ|a_k| < ∞, (log n)^{:.4} ⪯ tail ⪯ (log n)^{:.4}",
                    b + 1.0 - eps,
                    b + 1.0 + eps
                ),
            )
            .with_estimate(Some(AsymptoticEstimate::order(SumTarget::TailSum, 0.0, b + 1.0)))
        }
    } else {
        let env = format!(
            "n^{:.4}(log n)^{:.4} ⪯ · ⪯ n^{:.4}(log n)^{:.4}",
            alpha + 1.0,
            b - eps,
            alpha + 1.0,
            b + eps
        );
        if alpha < -1.0 {
            RungOutcome::decide(
                Rung::Bertrand,
                Conclusion::Converges,
                format!("case (i): alpha = {alpha:.6} < -1, beta = {b:.6}: Σ|a_k| < ∞, tail {env}"),
            )
            .with_estimate(Some(AsymptoticEstimate::order(SumTarget::TailSum, alpha + 1.0, b)))
        } else {
            RungOutcome::decide(
                Rung::Bertrand,
                Conclusion::Diverges,
                format!("case (ii): alpha = {alpha:.6} > -1, beta = {b:.6}: Σ|a_k| = ∞, S_n {env}"),
            )
            .with_estimate(Some(AsymptoticEstimate::order(SumTarget::PartialSum, alpha + 1.0, b)))
        }
    };
    out.beta = beta_est;
    out
}

/// `log n^{−α}|a_{n+1}| = C° + D(n) + αE(n) + B(n)` evaluated from `k°` on.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulationTrace {
    /// First index with `|α(k) − α| < 1/2`.
    pub k0: u64,
    pub alpha: f64,
    /// `log|a_{k°}|`
    pub c0: f64,
    /// Indices `n` at which the sums below were recorded.
    pub checkpoints: Vec<u64>,
    /// `Σ_{k°≤k≤n} (α(k) − α)/k`
    pub b: Vec<f64>,
    /// `Σ_{k°≤k≤n} (log(1 + α(k)/k) − α(k)/k)`
    pub d: Vec<f64>,
    /// `Σ_{k°≤k≤n} 1/k − log n`
    pub e: Vec<f64>,
    /// `C° + D(n) + αE(n)`
    pub q: Vec<f64>,
    /// Smallest `B(n)` over every `n` in `[k°, last checkpoint]`.
    pub b_min: f64,
}

/// Builds the accumulation trace over `[k°, n_max]`, recording the sums at
/// the grid points past `k°` and at `n_max`.
pub fn accumulation_trace(
    src: &dyn TermSource,
    alpha: f64,
    grid: &IndexGrid,
    n_max: u64,
) -> Result<Option<AccumulationTrace>, TermError> {
    let mut k0 = None;
    for &n in grid.starting_at(src.first_index()).points() {
        if libm::fabs(raabe_at(src, n)?.0 - alpha) < 0.5 {
            k0 = Some(n);
            break;
        }
    }
    let Some(k0) = k0 else {
        return Ok(None);
    };
    let mut checkpoints: Vec<u64> = grid.points().iter().copied().filter(|&n| n >= k0 && n <= n_max).collect();
    if checkpoints.last() != Some(&n_max) && n_max >= k0 {
        checkpoints.push(n_max);
    }
    let c0 = src.term(k0)?.logmag();
    let (mut b, mut d, mut h) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    let mut trace = AccumulationTrace {
        k0,
        alpha,
        c0,
        checkpoints: Vec::new(),
        b: Vec::new(),
        d: Vec::new(),
        e: Vec::new(),
        q: Vec::new(),
        b_min: f64::INFINITY,
    };
    let mut next = 0;
    scan_alpha(src, k0, n_max, &mut |k, a| {
        let x = k as f64;
        let step = a / x;
        b.add((a - alpha) / x);
        d.add(libm::log1p(step) - step);
        h.add(1.0 / x);
        trace.b_min = trace.b_min.min(b.value());
        if next < checkpoints.len() && k == checkpoints[next] {
            let e = h.value() - libm::log(x);
            trace.checkpoints.push(k);
            trace.b.push(b.value());
            trace.d.push(d.value());
            trace.e.push(e);
            trace.q.push(c0 + d.value() + alpha * e);
            next += 1;
        }
    })?;
    Ok(Some(trace))
}

/// Largest ratio between successive octave increments of `B(n)` that counts
/// as numerical convergence.
const B_CONTRACTION: f64 = 0.8;

/// Divergence from `B(n) ≥ 0` or `B(n) → L` when `α ≥ −1`.
pub fn accumulation_test(
    trace: &AccumulationTrace,
    alpha_hat: &LimitEstimate,
    config: &AnalysisConfig,
) -> RungOutcome {
    if alpha_hat.value < -1.0 - config.tol.max(3.0 * alpha_hat.half_width) {
        return RungOutcome::skip(Rung::Accumulation, "alpha < -1; not applicable");
    }
    let last = trace.checkpoints.last().copied().unwrap_or(trace.k0);
    let range = format!("k in [{}, {last}]", trace.k0);
    let estimate = |converged: bool| {
        if !converged {
            return None;
        }
        let (qn, bn) = (*trace.q.last()?, *trace.b.last()?);
        // a_{n+1} (n)^{-α} → exp(C° + D(∞) + αE(∞) + L)
        let c = libm::exp(qn + bn);
        let mut e = power_law_sum(c, trace.alpha, trace.alpha == -1.0);
        e.at = Some(last);
        Some(e)
    };
    let increments: Vec<f64> = trace.b.windows(2).map(|w| w[1] - w[0]).collect();
    let converges = increments.len() >= 5
        && increments[increments.len() - 5..].windows(2).all(|w| {
            libm::fabs(w[1]) <= B_CONTRACTION * libm::fabs(w[0]) || (w[0] == 0.0 && w[1] == 0.0)
        });
    if trace.b_min >= 0.0 {
        return RungOutcome::decide(
            Rung::Accumulation,
            Conclusion::Diverges,
            format!(
                "B(n) ≥ 0 for every {range} (alpha = {:.6} ≥ -1): Σ|a_k| = ∞",
                trace.alpha
            ),
        )
        .with_estimate(estimate(converges));
    }
    if converges {
        let bn = trace.b.last().copied().unwrap_or(0.0);
        return RungOutcome::decide(
            Rung::Accumulation,
            Conclusion::Diverges,
            format!(
                "B(n) → {bn:.6}: octave increments contract by ≤ {B_CONTRACTION} over the last 4 octaves ({range}); alpha ≥ -1 so Σ|a_k| = ∞"
            ),
        )
        .with_estimate(estimate(true));
    }
    RungOutcome::skip(
        Rung::Accumulation,
        format!(
            "B(n) takes negative values (min {:.4}) and does not settle on {range}",
            trace.b_min
        ),
    )
}

/// Doubling test: `c_{n+1}/c_n → 1` and `c_{2n}/c_n` eventually
/// on one side of `1/2`.
pub fn doubling_test(src: &dyn TermSource, grid: &IndexGrid, config: &AnalysisConfig) -> RungOutcome {
    let grid = grid.starting_at(src.first_index());
    let m = grid.len();
    if m < 4 {
        return RungOutcome::skip(Rung::Doubling, "fewer than 4 grid points");
    }
    let from = grid.points()[tail_start(m)];
    let to = grid.last().unwrap_or(from);
    let mut worst: f64 = 0.0;
    if let Err(e) = scan_alpha(src, from, to, &mut |k, a| {
        worst = worst.max(libm::fabs(a) / k as f64);
    }) {
        return RungOutcome::skip(Rung::Doubling, e.to_string());
    }
    if !(worst <= 0.1) {
        return RungOutcome::skip(
            Rung::Doubling,
            format!("c_(n+1)/c_n - 1 reaches {worst:.3} on [{from}, {to}]; ratio does not tend to 1, test skipped"),
        );
    }
    let dr = match doubling_ratios(src, &grid) {
        Ok(d) => d,
        Err(e) => return RungOutcome::skip(Rung::Doubling, e.to_string()),
    };
    let (lo, hi) = (0.5 - DOUBLING_MARGIN, 0.5 + DOUBLING_MARGIN);
    let window = format!("c_2n/c_n in [{:.4}, {:.4}] on the grid tail", dr.tail_inf, dr.tail_sup);
    let limit = extrapolate_limit(&dr.grid, &dr.ratios, config.tol).ok();
    let (l_lo, l_hi) = limit.map_or((f64::NAN, f64::NAN), |l| {
        let w = l.half_width.max(config.tol);
        (l.value - w, l.value + w)
    });
    let limit_text = limit.map_or(String::from("no extrapolated limit"), |l| {
        format!("extrapolated limit {:.4} ± {:.1e}", l.value, l.half_width)
    });
    if dr.tail_sup < lo {
        if l_hi < lo {
            return RungOutcome::decide(
                Rung::Doubling,
                Conclusion::Converges,
                format!("{window}, {limit_text}: below 1/2 - {DOUBLING_MARGIN}, Σ c_n < ∞"),
            );
        }
        return RungOutcome::skip(
            Rung::Doubling,
            format!("{window} but {limit_text}: the ratios drift toward 1/2"),
        );
    }
    if dr.tail_inf > hi {
        if l_lo > hi {
            return RungOutcome::decide(
                Rung::Doubling,
                Conclusion::Diverges,
                format!("{window}, {limit_text}: above 1/2 + {DOUBLING_MARGIN}, Σ c_n = ∞"),
            );
        }
        return RungOutcome::skip(
            Rung::Doubling,
            format!("{window} but {limit_text}: the ratios drift toward 1/2"),
        );
    }
    RungOutcome::skip(Rung::Doubling, format!("{window}: within {DOUBLING_MARGIN} of 1/2"))
}

/// Power bounds from an O-regular or sandwich class.
pub fn sandwich_test(class: &VariationClass) -> RungOutcome {
    let (lower, upper, margin, what) = match class.kind {
        VariationKind::Ors { lower, upper } => (lower, upper, ORS_MARGIN, "alpha(n) bounds"),
        VariationKind::MSandwich { phi, psi } => (phi, psi, SANDWICH_MARGIN, "fitted envelope"),
        VariationKind::Rs { .. } => {
            return RungOutcome::skip(Rung::Sandwich, "class is RS; power bounds add nothing")
        }
        VariationKind::Unknown => return RungOutcome::skip(Rung::Sandwich, "class unknown"),
    };
    let env = format!("n^{lower:.4} ⪯ a_n ⪯ n^{upper:.4} ({what})");
    if upper < -1.0 - margin {
        RungOutcome::decide(
            Rung::Sandwich,
            Conclusion::Converges,
            format!("{env}; upper exponent below -1 - {margin}: Σ a_n < ∞"),
        )
        .with_estimate(Some(AsymptoticEstimate::order(SumTarget::TailSum, upper + 1.0, 0.0)))
    } else if lower > -1.0 + margin {
        RungOutcome::decide(
            Rung::Sandwich,
            Conclusion::Diverges,
            format!("{env}; lower exponent above -1 + {margin}: Σ a_n = ∞"),
        )
        .with_estimate(Some(AsymptoticEstimate::order(SumTarget::PartialSum, lower + 1.0, 0.0)))
    } else {
        RungOutcome::skip(Rung::Sandwich, format!("{env}; exponents straddle -1"))
    }
}

const NOT_RS: &str = "alpha(n) has no verified limit (class is not RS); skipped";

pub(crate) fn raabe_rung(cx: &LadderContext<'_>) -> RungOutcome {
    if !cx.regular {
        return RungOutcome::skip(Rung::Raabe, NOT_RS);
    }
    raabe_test(cx.src, &cx.alpha_hat, &cx.grid, cx.config)
}

pub(crate) fn gauss_rung(cx: &LadderContext<'_>) -> RungOutcome {
    if !cx.regular {
        return RungOutcome::skip(Rung::Gauss, NOT_RS);
    }
    gauss_test(cx.src, &cx.series, &cx.alpha_hat, cx.config)
}

pub(crate) fn refined_rung(cx: &LadderContext<'_>) -> RungOutcome {
    if !cx.regular {
        return RungOutcome::skip(Rung::Refined, NOT_RS);
    }
    refined_test(cx.src, &cx.alpha_hat, cx.config.family, &cx.grid, cx.config)
}

pub(crate) fn bertrand_rung(cx: &LadderContext<'_>) -> RungOutcome {
    if !cx.regular {
        return RungOutcome::skip(Rung::Bertrand, NOT_RS);
    }
    bertrand_test(cx.src, &cx.alpha_hat, &cx.grid, cx.config)
}

pub(crate) fn accumulation_rung(cx: &LadderContext<'_>) -> RungOutcome {
    if !cx.regular {
        return RungOutcome::skip(Rung::Accumulation, NOT_RS);
    }
    match accumulation_trace(cx.src, cx.alpha, &cx.grid, cx.config.n_max) {
        Ok(Some(trace)) => accumulation_test(&trace, &cx.alpha_hat, cx.config),
        Ok(None) => RungOutcome::skip(
            Rung::Accumulation,
            "no grid index with |alpha(k) - alpha| < 1/2",
        ),
        Err(e) => RungOutcome::skip(Rung::Accumulation, e.to_string()),
    }
}

pub(crate) fn doubling_rung(cx: &LadderContext<'_>) -> RungOutcome {
    doubling_test(cx.src, &cx.grid, cx.config)
}
