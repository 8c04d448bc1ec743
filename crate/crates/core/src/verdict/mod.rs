//! The convergence test ladder, Karamata estimates and alternating series.

mod alternating;
mod karamata;
mod rungs;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use alternating::{analyze_alternating, PairDifference};
pub use karamata::karamata_estimate;
pub use rungs::{
    accumulation_test, accumulation_trace, bertrand_test, doubling_test, gauss_test,
    raabe_test, refined_test, sandwich_test, AccumulationTrace, GaussForm, RungOutcome,
};

use crate::classify::{classify_variation, VariationClass};
use crate::diagnostics::{
    describe_limit, extrapolate_limit, raabe_statistic, second_order_statistic, DiagnosticSeries,
    IndexGrid, LimitEstimate, WeightFamily,
};
use crate::source::{Abs, TermSource};
use crate::value::Sign;

/// Knobs shared by the diagnostics, the classifier and the ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    /// Largest index probed.
    pub n_max: u64,
    /// Half-width below which an extrapolated limit counts as decisive.
    pub tol: f64,
    /// Weight of the refined second-order test.
    pub family: WeightFamily,
    /// First grid point; the grid is `grid_start·2^j ≤ n_max`.
    pub grid_start: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            n_max: 1 << 20,
            tol: 1e-3,
            family: WeightFamily::Power(1.0),
            grid_start: 16,
        }
    }
}

impl AnalysisConfig {
    pub fn grid(&self) -> IndexGrid {
        IndexGrid::geometric(self.grid_start, self.n_max)
    }

    /// Whether `est` lies in the band `|est − x| ≤ max(tol, 3·half_width)`.
    pub fn in_band(&self, est: &LimitEstimate, x: f64) -> bool {
        est.within(x, self.tol, 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conclusion {
    Converges,
    Diverges,
    Inconclusive,
}

impl Conclusion {
    pub fn label(&self) -> &'static str {
        match self {
            Conclusion::Converges => "Converges",
            Conclusion::Diverges => "Diverges",
            Conclusion::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_decisive(&self) -> bool {
        *self != Conclusion::Inconclusive
    }

    /// Whether the two conclusions are both decisive and opposite.
    pub fn contradicts(&self, other: Conclusion) -> bool {
        self.is_decisive() && other.is_decisive() && *self != other
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The tests of the ladder, in the order they are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rung {
    Raabe,
    Gauss,
    Refined,
    Bertrand,
    Accumulation,
    Doubling,
    /// Power bounds from an O-regular or sandwich classification.
    Sandwich,
    Alternating,
}

impl Rung {
    pub fn label(&self) -> &'static str {
        match self {
            Rung::Raabe => "raabe",
            Rung::Gauss => "gauss",
            Rung::Refined => "refined",
            Rung::Bertrand => "bertrand",
            Rung::Accumulation => "accumulation",
            Rung::Doubling => "doubling",
            Rung::Sandwich => "sandwich",
            Rung::Alternating => "alternating",
        }
    }
}

impl fmt::Display for Rung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumTarget {
    PartialSum,
    TailSum,
}

impl SumTarget {
    pub fn label(&self) -> &'static str {
        match self {
            SumTarget::PartialSum => "partial_sum",
            SumTarget::TailSum => "tail_sum",
        }
    }
}

/// `C·n^p·(log n)^q` for a partial or tail sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate {
    pub target: SumTarget,
    /// `None` when only the growth order is known.
    pub constant: Option<f64>,
    pub p: f64,
    pub q: f64,
    /// Index at which `value` was evaluated.
    pub at: Option<u64>,
    /// The estimated sum at `at`.
    pub value: Option<f64>,
    /// `n·c_n / S_n` at `at`, for the `α = −1` case.
    pub ratio_diagnostic: Option<f64>,
}

impl AsymptoticEstimate {
    pub(crate) fn order(target: SumTarget, p: f64, q: f64) -> Self {
        AsymptoticEstimate {
            target,
            constant: None,
            p,
            q,
            at: None,
            value: None,
            ratio_diagnostic: None,
        }
    }
}

impl fmt::Display for AsymptoticEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = match self.target {
            SumTarget::PartialSum => "S_n",
            SumTarget::TailSum => "T_n",
        };
        match self.constant {
            Some(c) => write!(f, "{lhs} ~ {c:.6}·n^{:.4}", self.p)?,
            None => write!(f, "{lhs} ≍ n^{:.4}", self.p)?,
        }
        if self.q != 0.0 {
            write!(f, "·(log n)^{:.4}", self.q)?;
        }
        Ok(())
    }
}

/// `β̂` together with the weight it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEstimate {
    pub family: WeightFamily,
    pub estimate: LimitEstimate,
}

/// The outcome of the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub decided_by: Option<Rung>,
    pub alpha: Option<LimitEstimate>,
    pub beta: Option<BetaEstimate>,
    pub estimate: Option<AsymptoticEstimate>,
    pub gauss: Option<GaussForm>,
    pub class: Option<VariationClass>,
    /// The verdict for `Σ|a_n|` when the series was analyzed as alternating.
    pub absolute: Option<Box<Verdict>>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub(crate) fn inconclusive(notes: Vec<String>) -> Verdict {
        Verdict {
            conclusion: Conclusion::Inconclusive,
            decided_by: None,
            alpha: None,
            beta: None,
            estimate: None,
            gauss: None,
            class: None,
            absolute: None,
            notes,
        }
    }
}

/// `p/q` with `1 < q ≤ 16` within `1e-6` of a non-integer `x`, for
/// readable notes.
fn simple_fraction(x: f64) -> Option<(i64, i64)> {
    (1..=16).find_map(|q| {
        let p = libm::round(x * q as f64);
        (libm::fabs(x - p / q as f64) < 1e-6 && libm::fabs(p) < 1e6).then_some((p as i64, q))
    })
    .filter(|&(_, q)| q > 1)
}

/// Sign structure of the terms on the probed indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    Positive,
    Negative,
    Alternating,
    Mixed,
}

/// Checks signs on the first 16 consecutive pairs and on `(n, n+1)` for every
/// grid point.
pub fn sign_pattern(src: &dyn TermSource, grid: &IndexGrid) -> Result<SignPattern, crate::TermError> {
    let first = src.first_index();
    let mut pairs: Vec<u64> = (first..first + 16).collect();
    pairs.extend(grid.starting_at(first).points().iter().copied());
    let (mut pos, mut neg, mut same, mut flip) = (false, false, false, false);
    for n in pairs {
        let s = src.term(n)?.sign();
        let t = match src.ratio(n) {
            Some(r) => s * Sign::of(1.0 + r),
            None => src.term(n + 1)?.sign(),
        };
        for x in [s, t] {
            match x {
                Sign::Positive => pos = true,
                Sign::Negative => neg = true,
                Sign::Zero => return Ok(SignPattern::Mixed),
            }
        }
        if s == t {
            same = true;
        } else {
            flip = true;
        }
    }
    Ok(match (pos, neg, same, flip) {
        (true, false, _, _) => SignPattern::Positive,
        (false, true, _, _) => SignPattern::Negative,
        (_, _, false, true) => SignPattern::Alternating,
        _ => SignPattern::Mixed,
    })
}

/// Runs the ladder on `src`.
///
/// Positive (or all-negative) series go through raabe, gauss, refined,
/// bertrand, accumulation and doubling, stopping at the first decisive rung,
/// followed by the power bounds of the variation class when `α(n)` has no
/// limit. Strictly alternating series are routed to [`analyze_alternating`].
/// Series with irregular signs are decided only when `Σ|a_n|` converges.
pub fn run_ladder(src: &dyn TermSource, config: &AnalysisConfig) -> Verdict {
    let grid = config.grid().starting_at(src.first_index());
    let pattern = match sign_pattern(src, &grid) {
        Ok(p) => p,
        Err(e) => return Verdict::inconclusive(alloc::vec![format!("term evaluation failed: {e}")]),
    };
    match pattern {
        SignPattern::Positive => absolute_ladder(src, config),
        SignPattern::Negative => {
            let mut v = absolute_ladder(&Abs(src), config);
            v.notes.insert(0, String::from("all probed terms negative; analyzing -a_n"));
            v
        }
        SignPattern::Alternating => analyze_alternating(src, config),
        SignPattern::Mixed => {
            let inner = absolute_ladder(&Abs(src), config);
            let mut notes = alloc::vec![String::from(
                "signs neither constant nor strictly alternating; only absolute convergence can be decided"
            )];
            let conclusion = if inner.conclusion == Conclusion::Converges {
                notes.push(String::from("Σ|a_n| converges, hence Σ a_n converges absolutely"));
                Conclusion::Converges
            } else {
                notes.push(format!("Σ|a_n|: {}; no conclusion for Σ a_n", inner.conclusion));
                Conclusion::Inconclusive
            };
            Verdict {
                conclusion,
                decided_by: (conclusion == Conclusion::Converges).then_some(inner.decided_by).flatten(),
                alpha: inner.alpha,
                beta: None,
                estimate: None,
                gauss: None,
                class: inner.class.clone(),
                absolute: Some(Box::new(inner)),
                notes,
            }
        }
    }
}

/// Everything the rungs share.
pub(crate) struct LadderContext<'a> {
    pub src: &'a dyn TermSource,
    pub config: &'a AnalysisConfig,
    pub grid: IndexGrid,
    pub series: DiagnosticSeries,
    pub alpha_hat: LimitEstimate,
    /// `−1` inside the band, `α̂` otherwise.
    pub alpha: f64,
    pub regular: bool,
}

/// The ladder for a series of positive terms.
pub(crate) fn absolute_ladder(src: &dyn TermSource, config: &AnalysisConfig) -> Verdict {
    let mut verdict = Verdict::inconclusive(Vec::new());
    let grid = config.grid().starting_at(src.first_index());

    let class = match classify_variation(src, config) {
        Ok(c) => c,
        Err(e) => {
            verdict.notes.push(format!("classification failed: {e}"));
            return verdict;
        }
    };
    let regular = matches!(class.kind, crate::classify::VariationKind::Rs { .. });
    verdict.notes.push(format!("class: {}", class.kind));
    verdict.class = Some(class.clone());

    let series = match raabe_statistic(src, &grid) {
        Ok(s) => s,
        Err(e) => {
            verdict.notes.push(format!("Raabe statistic unavailable: {e}"));
            return verdict;
        }
    };
    let alpha_hat = match extrapolate_limit(&series.grid, &series.alpha, config.tol) {
        Ok(a) => a,
        Err(e) => {
            verdict.notes.push(format!("alpha(n) extrapolation failed: {e}"));
            return verdict;
        }
    };
    verdict.alpha = Some(alpha_hat);
    verdict.notes.push(describe_limit("alpha(n)", &alpha_hat));

    let at_minus_one = config.in_band(&alpha_hat, -1.0);
    let alpha = if at_minus_one { -1.0 } else { alpha_hat.value };
    if at_minus_one && regular {
        // The n^1 second-order statistic is reported as evidence whichever
        // rung decides.
        if let Ok(s) = second_order_statistic(src, -1.0, WeightFamily::Power(1.0), &grid) {
            if let Some(so) = &s.second_order {
                if let Ok(est) = extrapolate_limit(&s.grid, &so.beta, config.tol) {
                    let mut note = describe_limit("n(alpha(n)+1)", &est);
                    if let Some((p, q)) = est.decisive.then(|| simple_fraction(est.value)).flatten() {
                        note.push_str(&format!(" ≈ {p}/{q}"));
                    }
                    verdict.notes.push(note);
                }
            }
        }
    }

    let cx = LadderContext {
        src,
        config,
        grid,
        series,
        alpha_hat,
        alpha,
        regular,
    };

    type RungFn = fn(&LadderContext<'_>) -> RungOutcome;
    let ladder: [RungFn; 6] = [
        rungs::raabe_rung,
        rungs::gauss_rung,
        rungs::refined_rung,
        rungs::bertrand_rung,
        rungs::accumulation_rung,
        rungs::doubling_rung,
    ];
    let outcomes = ladder
        .iter()
        .map(|rung| rung(&cx))
        .chain(core::iter::once_with(|| sandwich_test(&class)));
    for out in outcomes {
        verdict.notes.push(format!("{}: {}", out.rung, out.note));
        if out.beta.is_some() {
            verdict.beta = out.beta;
        }
        if out.gauss.is_some() {
            verdict.gauss = out.gauss;
        }
        if out.conclusion.is_decisive() {
            verdict.conclusion = out.conclusion;
            verdict.decided_by = Some(out.rung);
            verdict.estimate = out.estimate;
            return verdict;
        }
    }
    verdict
}
