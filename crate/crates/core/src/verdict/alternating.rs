//! Alternating series through the even/odd split `b_k = |a_{2k}|`,
//! `c_k = |a_{2k+1}|`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    absolute_ladder, sign_pattern, AnalysisConfig, AsymptoticEstimate, Conclusion, Rung,
    SignPattern, SumTarget, Verdict,
};
use crate::classify::VariationKind;
use crate::source::{Abs, TermError, TermSource};
use crate::value::{Sign, SignedLogValue};

/// `d_k = |a_{2k+1}| − |a_{2k}|`, computed as `|a_{2k}|·(|a_{2k+1}/a_{2k}| − 1)`
/// so that the exact ratio of the inner source is used when it exists.
pub struct PairDifference<S> {
    inner: S,
    name: String,
}

impl<S: TermSource> PairDifference<S> {
    pub fn new(inner: S) -> Self {
        let name = format!("pairs({})", inner.name());
        PairDifference { inner, name }
    }

    fn step_from_logs(&self, n: u64, even: f64, odd: f64) -> f64 {
        match self.inner.magnitude_ratio(n) {
            Some(m) => m,
            None => libm::expm1(odd - even),
        }
    }

    fn combine(even: SignedLogValue, m: f64) -> SignedLogValue {
        if m == 0.0 {
            SignedLogValue::ZERO
        } else {
            SignedLogValue::from_parts(Sign::of(m), even.logmag() + libm::log(libm::fabs(m)))
        }
    }
}

impl<S: TermSource> TermSource for PairDifference<S> {
    fn name(&self) -> &str {
        &self.name
    }

    fn first_index(&self) -> u64 {
        self.inner.first_index().div_ceil(2).max(1)
    }

    fn term(&self, k: u64) -> Result<SignedLogValue, TermError> {
        let n = 2 * k;
        let even = self.inner.term(n)?;
        let m = match self.inner.magnitude_ratio(n) {
            Some(m) => m,
            None => libm::expm1(self.inner.log_span(n, n + 1)?),
        };
        Ok(Self::combine(even, m))
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        let mut even: Option<SignedLogValue> = None;
        self.inner.scan(2 * from, 2 * to + 1, &mut |n, v| {
            if n % 2 == 0 {
                even = Some(v);
            } else if let Some(e) = even.take() {
                let m = self.step_from_logs(n - 1, e.logmag(), v.logmag());
                f(n / 2, Self::combine(e, m));
            }
        })
    }
}

/// Analysis of `Σ p_n` for strictly alternating `p_n`.
///
/// `Σ|p_n| < ∞` settles it. Otherwise, with `α̂` the index of `|p_n|`:
/// `−1 < α̂ < 0` converges with tail `Σ_{k≥n}(c_k − b_k) ∼ −2^{α−1}|p_n|`,
/// `α̂ > 0` diverges with `Σ(c_k − b_k) ∼ 2^{α−1}|p_n|`. When `α̂` is at 0
/// or −1, or has no verified limit, the ladder is run on `|c_k − b_k|`.
pub fn analyze_alternating(src: &dyn TermSource, config: &AnalysisConfig) -> Verdict {
    let absolute = absolute_ladder(&Abs(src), config);
    let mut notes: Vec<String> = alloc::vec![
        String::from("signs alternate on the probed indices; b_k = |a_2k|, c_k = |a_2k+1|"),
        format!(
            "Σ|a_n|: {}{}",
            absolute.conclusion,
            absolute.decided_by.map_or(String::new(), |r| format!(" ({r})"))
        ),
    ];
    let mut verdict = Verdict {
        conclusion: Conclusion::Inconclusive,
        decided_by: None,
        alpha: absolute.alpha,
        beta: None,
        estimate: None,
        gauss: None,
        class: absolute.class.clone(),
        absolute: None,
        notes: Vec::new(),
    };
    let regular = matches!(
        absolute.class.as_ref().map(|c| c.kind),
        Some(VariationKind::Rs { .. })
    );

    if absolute.conclusion == Conclusion::Converges {
        notes.push(String::from("case 1: Σ|a_n| < ∞, so Σ c_k and Σ b_k are both finite"));
        verdict.conclusion = Conclusion::Converges;
        verdict.decided_by = Some(Rung::Alternating);
        verdict.estimate = absolute.estimate;
    } else if let Some(a) = absolute.alpha.filter(|a| {
        a.decisive && regular && !config.in_band(a, 0.0) && !config.in_band(a, -1.0)
    }) {
        let alpha = a.value;
        let n = config.grid().starting_at(src.first_index()).last().unwrap_or(1);
        let constant = src.term(n).ok().map(|t| {
            libm::exp(t.logmag() - alpha * libm::log(n as f64) + (alpha - 1.0) * core::f64::consts::LN_2)
        });
        if alpha < -1.0 {
            notes.push(format!("alpha_hat = {alpha:.6} < -1 (case 1)"));
            verdict.conclusion = Conclusion::Converges;
        } else if alpha < 0.0 {
            notes.push(format!(
                "case 2: -1 < alpha_hat = {alpha:.6} < 0, c_k - b_k ~ (alpha/2k) a_2k; Σ_(k≥n)(c_k - b_k) ~ -2^(alpha-1) a_n → 0"
            ));
            verdict.conclusion = Conclusion::Converges;
            let mut e = AsymptoticEstimate::order(SumTarget::TailSum, alpha, 0.0);
            e.constant = constant;
            e.at = Some(n);
            verdict.estimate = Some(e);
        } else {
            notes.push(format!(
                "case 2: alpha_hat = {alpha:.6} > 0, Σ(c_k - b_k) ~ 2^(alpha-1) a_n → ∞"
            ));
            verdict.conclusion = Conclusion::Diverges;
            let mut e = AsymptoticEstimate::order(SumTarget::PartialSum, alpha, 0.0);
            e.constant = constant;
            e.at = Some(n);
            verdict.estimate = Some(e);
        }
        verdict.decided_by = Some(Rung::Alternating);
    } else {
        let (conclusion, extra) = difference_route(src, config);
        notes.extend(extra);
        verdict.conclusion = conclusion;
        if conclusion.is_decisive() {
            verdict.decided_by = Some(Rung::Alternating);
        }
    }
    verdict.absolute = Some(Box::new(absolute));
    verdict.notes = notes;
    verdict
}

/// Decides `Σ(c_k − b_k)` by the ladder on `|c_k − b_k|`.
fn difference_route(src: &dyn TermSource, config: &AnalysisConfig) -> (Conclusion, Vec<String>) {
    let mut notes = alloc::vec![String::from(
        "alpha_hat at 0 or -1 (or without a verified limit): deciding Σ(c_k - b_k) from the differences"
    )];
    let diff = PairDifference::new(src);
    let half = AnalysisConfig {
        n_max: config.n_max / 2,
        ..*config
    };
    let grid = half.grid().starting_at(diff.first_index());
    let pattern = match sign_pattern(&diff, &grid) {
        Ok(p) => p,
        Err(e) => {
            notes.push(format!("pair differences unavailable: {e}"));
            return (Conclusion::Inconclusive, notes);
        }
    };
    if !matches!(pattern, SignPattern::Positive | SignPattern::Negative) {
        notes.push(String::from("c_k - b_k changes sign on the probed indices; no conclusion"));
        return (Conclusion::Inconclusive, notes);
    }
    let inner = absolute_ladder(&Abs(&diff), &half);
    notes.push(format!(
        "|c_k - b_k|: {}{}; alpha_hat = {}",
        inner.conclusion,
        inner.decided_by.map_or(String::new(), |r| format!(" ({r})")),
        inner.alpha.map_or(String::from("n/a"), |a| format!("{a}"))
    ));
    if let Some(last) = inner
        .notes
        .iter()
        .rev()
        .find(|n| inner.decided_by.is_some_and(|r| n.starts_with(r.label())))
    {
        notes.push(format!("differences, {last}"));
    }
    if inner.conclusion == Conclusion::Converges {
        let n = grid.last().map_or(2, |k| 2 * k);
        let shrinking = src.log_span(n / 2, n).map_or(false, |s| s < -1e-3);
        if !shrinking {
            notes.push(String::from(
                "|a_n| does not visibly tend to 0; the conclusion is for the paired sums Σ(c_k - b_k)",
            ));
        }
    }
    (inner.conclusion, notes)
}
