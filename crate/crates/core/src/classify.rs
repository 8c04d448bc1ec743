//! Regular-variation classification and the `C·n^α·exp Σ δ_k/k`
//! representation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::diagnostics::{
    doubling_ratios, extrapolate_limit, raabe_statistic, scan_alpha, tail_start, DiagnosticsError,
    IndexGrid, LimitEstimate,
};
use crate::expr::{eval_with_x, Expr};
use crate::lsq;
use crate::source::{TermError, TermSource};
use crate::value::{CompensatedSum, Sign, SignedLogValue};
use crate::verdict::AnalysisConfig;

pub type SeqFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// `(C, α, m(n), δ_k)` with `c_n = m(n)·n^α·exp Σ_{k≤n} δ_k/k` and `m(n) → C`.
#[derive(Clone)]
pub struct RepresentationParams {
    pub c: f64,
    pub alpha: f64,
    pub mantissa: SeqFn,
    pub delta: SeqFn,
}

impl RepresentationParams {
    pub fn new(
        c: f64,
        alpha: f64,
        mantissa: impl Fn(u64) -> f64 + Send + Sync + 'static,
        delta: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RepresentationParams {
            c,
            alpha,
            mantissa: Arc::new(mantissa),
            delta: Arc::new(delta),
        }
    }

    /// Constant mantissa `m(n) = C`.
    pub fn constant(c: f64, alpha: f64, delta: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(c, alpha, move |_| c, delta)
    }
}

impl fmt::Debug for RepresentationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepresentationParams")
            .field("c", &self.c)
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("mantissa m({index}) = {value} is not positive")]
    NonpositiveMantissa { index: u64, value: f64 },
    #[error("terms change sign at n = {index}; classify |a_n| instead")]
    SignChange { index: u64 },
    #[error("x must be positive, got {0}")]
    BadScale(f64),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

impl From<TermError> for ClassifyError {
    fn from(e: TermError) -> Self {
        ClassifyError::Diagnostics(DiagnosticsError::Term(e))
    }
}

/// Sequence generated from a [`RepresentationParams`].
pub struct RepresentationSource {
    params: RepresentationParams,
    name: String,
}

impl RepresentationSource {
    fn log_mantissa(&self, n: u64) -> Result<f64, TermError> {
        let m = (self.params.mantissa)(n);
        if !(m > 0.0) || !m.is_finite() {
            return Err(TermError::Domain {
                index: n,
                detail: format!("mantissa {m} is not positive"),
            });
        }
        Ok(libm::log(m))
    }

    fn delta_step(&self, k: u64) -> Result<f64, TermError> {
        let d = (self.params.delta)(k);
        if !d.is_finite() {
            return Err(TermError::NonFinite { index: k });
        }
        Ok(d / k as f64)
    }
}

impl TermSource for RepresentationSource {
    fn name(&self) -> &str {
        &self.name
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        let mut out = SignedLogValue::ZERO;
        self.scan(n, n, &mut |_, v| out = v)?;
        Ok(out)
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        let lm = self.log_mantissa(n + 1).ok()? - self.log_mantissa(n).ok()?;
        let step = self.delta_step(n + 1).ok()?;
        Some(libm::expm1(
            lm + self.params.alpha * libm::log1p(1.0 / n as f64) + step,
        ))
    }

    fn known_index(&self) -> Option<f64> {
        Some(self.params.alpha)
    }

    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        if from == 0 {
            return Err(TermError::BeforeStart { index: 0, first: 1 });
        }
        let (lo, hi, sgn) = if from <= to { (from, to, 1.0) } else { (to, from, -1.0) };
        let mut acc = CompensatedSum::new();
        acc.add(self.log_mantissa(hi)? - self.log_mantissa(lo)?);
        acc.add(self.params.alpha * libm::log(hi as f64 / lo as f64));
        for k in lo + 1..=hi {
            acc.add(self.delta_step(k)?);
        }
        Ok(sgn * acc.value())
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        if from == 0 {
            return Err(TermError::BeforeStart { index: 0, first: 1 });
        }
        let mut acc = CompensatedSum::new();
        for n in 1..=to {
            acc.add(self.delta_step(n)?);
            if n >= from {
                let l = self.log_mantissa(n)? + self.params.alpha * libm::log(n as f64) + acc.value();
                f(n, SignedLogValue::from_parts(Sign::Positive, l));
            }
        }
        Ok(())
    }
}

/// `c_n = m(n)·n^α·exp Σ_{k=1}^n δ_k/k`, evaluated in log domain.
///
/// The mantissa is checked at the first 16 indices and at powers of two up to
/// `2^21`; later violations surface as term errors.
pub fn construct_rs(params: RepresentationParams) -> Result<RepresentationSource, ClassifyError> {
    let probe = (1..=16u64).chain((5..=21).map(|j| 1u64 << j));
    for n in probe {
        let v = (params.mantissa)(n);
        if !(v > 0.0) || !v.is_finite() {
            return Err(ClassifyError::NonpositiveMantissa { index: n, value: v });
        }
    }
    let name = format!("rs(C={}, alpha={})", params.c, params.alpha);
    Ok(RepresentationSource { params, name })
}

/// The kind of variation detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariationKind {
    /// Regularly varying with index `alpha`.
    Rs { alpha: f64 },
    /// `α(n)` eventually within `[lower, upper]`, hence
    /// `n^lower ⪯ a_n ⪯ n^upper`.
    Ors { lower: f64, upper: f64 },
    /// `n^phi ⪯ a_n ⪯ n^psi`, from per-octave extremes of `log a_n`.
    MSandwich { phi: f64, psi: f64 },
    Unknown,
}

impl VariationKind {
    pub fn tag(&self) -> &'static str {
        match self {
            VariationKind::Rs { .. } => "RS",
            VariationKind::Ors { .. } => "ORS",
            VariationKind::MSandwich { .. } => "M_sandwich",
            VariationKind::Unknown => "Unknown",
        }
    }

    /// Lower and upper power exponents, when the class provides them.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match *self {
            VariationKind::Rs { alpha } => Some((alpha, alpha)),
            VariationKind::Ors { lower, upper } => Some((lower, upper)),
            VariationKind::MSandwich { phi, psi } => Some((phi, psi)),
            VariationKind::Unknown => None,
        }
    }
}

impl fmt::Display for VariationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariationKind::Rs { alpha } => write!(f, "RS({alpha:.6})"),
            VariationKind::Ors { lower, upper } => write!(f, "ORS({lower:.4}, {upper:.4})"),
            VariationKind::MSandwich { phi, psi } => {
                write!(f, "M(n^{phi:.4}, n^{psi:.4})")
            }
            VariationKind::Unknown => f.write_str("Unknown"),
        }
    }
}

/// Bounds observed over one index window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceWindow {
    pub from: u64,
    pub to: u64,
    pub lower: f64,
    pub upper: f64,
}

/// What the classification is based on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    pub alpha: Option<LimitEstimate>,
    /// Tail inf/sup of `c_{2n}/c_n` on the grid.
    pub doubling: Option<(f64, f64)>,
    /// Per-octave windows: `α(n)` bounds for ORS, `log a_n` extremes for
    /// the sandwich class.
    pub windows: Vec<EvidenceWindow>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationClass {
    pub kind: VariationKind,
    pub evidence: Evidence,
}

/// Largest allowed gap between `log2(c_{2n}/c_n)` and `α̂` on the grid tail
/// before a decisive `α̂` is rejected as an RS index.
const DOUBLING_SLACK: f64 = 0.3;

/// Relative growth of the running bounds in the last octave that still counts
/// as "eventually bounded".
const STABILITY: f64 = 0.1;

/// Octave windows `[2^j, 2^{j+1})` covering `[from, to]`.
fn octaves(from: u64, to: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = from.max(1);
    while lo <= to {
        let mut hi = lo.saturating_mul(2) - 1;
        // A short remainder joins the current octave.
        if hi >= to || to - hi < lo {
            hi = to;
        }
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

/// Whether the last window stays within the running bounds of the earlier
/// ones, widened by [`STABILITY`].
fn bounds_stable(windows: &[EvidenceWindow]) -> bool {
    if windows.len() < 2 {
        return false;
    }
    let (prev, last) = windows.split_at(windows.len() - 1);
    let lo = prev.iter().map(|w| w.lower).fold(f64::INFINITY, f64::min);
    let hi = prev.iter().map(|w| w.upper).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return false;
    }
    let slack = STABILITY * (hi - lo).max(1.0);
    if !(last[0].lower >= lo - slack && last[0].upper <= hi + slack) {
        return false;
    }
    // Jumps of size ∝ n can sit in some octaves only; compare the halves.
    let peak = |ws: &[EvidenceWindow]| {
        ws.iter()
            .map(|w| libm::fmax(libm::fabs(w.lower), libm::fabs(w.upper)))
            .fold(0.0, f64::max)
    };
    let (early, late) = windows.split_at(windows.len() / 2);
    peak(late) <= 2.0 * peak(early) + 1.0
}

/// `α(n)` bounds per octave over `[from, to]`.
fn alpha_windows(
    src: &dyn TermSource,
    from: u64,
    to: u64,
) -> Result<Vec<EvidenceWindow>, TermError> {
    let mut out: Vec<EvidenceWindow> = octaves(from, to)
        .into_iter()
        .map(|(lo, hi)| EvidenceWindow {
            from: lo,
            to: hi,
            lower: f64::INFINITY,
            upper: f64::NEG_INFINITY,
        })
        .collect();
    let mut idx = 0;
    scan_alpha(src, from, to, &mut |n, a| {
        while n > out[idx].to {
            idx += 1;
        }
        let w = &mut out[idx];
        w.lower = w.lower.min(a);
        w.upper = w.upper.max(a);
    })?;
    Ok(out)
}

/// Per-octave `(ln n*, max log a_n)` and `(ln n_*, min log a_n)`.
struct OctaveExtremes {
    windows: Vec<EvidenceWindow>,
    argmax: Vec<f64>,
    argmin: Vec<f64>,
}

fn log_extremes(src: &dyn TermSource, from: u64, to: u64) -> Result<OctaveExtremes, TermError> {
    let octs = octaves(from, to);
    let mut out = OctaveExtremes {
        windows: Vec::with_capacity(octs.len()),
        argmax: Vec::with_capacity(octs.len()),
        argmin: Vec::with_capacity(octs.len()),
    };
    let mut state: Option<(usize, f64, u64, f64, u64)> = None;
    let mut idx = 0usize;
    let flush = |st: (usize, f64, u64, f64, u64), out: &mut OctaveExtremes| {
        let (i, mn, amin, mx, amax) = st;
        out.windows.push(EvidenceWindow {
            from: octs[i].0,
            to: octs[i].1,
            lower: mn,
            upper: mx,
        });
        out.argmin.push(libm::log(amin as f64));
        out.argmax.push(libm::log(amax as f64));
    };
    let mut err = None;
    src.scan(from, to, &mut |n, v| {
        if err.is_some() {
            return;
        }
        if v.is_zero() {
            err = Some(TermError::Zero { index: n });
            return;
        }
        let l = v.logmag();
        while n > octs[idx].1 {
            idx += 1;
        }
        match &mut state {
            Some(st) if st.0 == idx => {
                if l < st.1 {
                    st.1 = l;
                    st.2 = n;
                }
                if l > st.3 {
                    st.3 = l;
                    st.4 = n;
                }
            }
            _ => {
                if let Some(st) = state.take() {
                    flush(st, &mut out);
                }
                state = Some((idx, l, n, l, n));
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(st) = state {
        flush(st, &mut out);
    }
    Ok(out)
}

/// Slope of `y` against `x` and the largest absolute residual.
fn slope_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let (a, b) = lsq::line(x, y)?;
    let worst = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| libm::fabs(yi - (a + b * xi)))
        .fold(0.0, f64::max);
    Some((b, worst))
}

/// Classifies `|a_n|` as RS, O-regular, sandwiched between powers, or
/// unknown.
///
/// RS needs a decisive extrapolated `α̂` whose doubling ratios agree with
/// `2^α̂` on the grid tail. ORS needs `α(n)` bounded on every index of the
/// tail, with the last octave inside the earlier running bounds. The sandwich
/// class fits power laws through the per-octave maxima and minima of
/// `log a_n` and requires bounded residuals.
pub fn classify_variation(
    src: &dyn TermSource,
    config: &AnalysisConfig,
) -> Result<VariationClass, ClassifyError> {
    let grid = config.grid().starting_at(src.first_index());
    let series = raabe_statistic(src, &grid)?;
    let mut evidence = Evidence::default();
    let est = extrapolate_limit(&series.grid, &series.alpha, config.tol)?;
    evidence.alpha = Some(est);
    let doubling = doubling_ratios(src, &grid)?;
    evidence.doubling = Some((doubling.tail_inf, doubling.tail_sup));

    let tail = tail_start(doubling.grid.len());
    let worst_gap = doubling.ratios[tail..]
        .iter()
        .map(|r| libm::fabs(libm::log2(*r) - est.value))
        .fold(0.0, f64::max);
    if est.decisive {
        if worst_gap <= DOUBLING_SLACK {
            evidence.notes.push(format!(
                "alpha(n) → {:.6} ± {:.1e}; log2(c_2n/c_n) within {:.3} of it on the grid tail",
                est.value, est.half_width, worst_gap
            ));
            return Ok(VariationClass {
                kind: VariationKind::Rs { alpha: est.value },
                evidence,
            });
        }
        evidence.notes.push(format!(
            "alpha(n) samples settle at {:.6} but log2(c_2n/c_n) strays {:.3} from it: not RS",
            est.value, worst_gap
        ));
    } else {
        evidence.notes.push(format!(
            "alpha(n) extrapolation not decisive (± {:.1e})",
            est.half_width
        ));
    }

    let from = grid.points()[tail_start(grid.len())];
    let to = grid.last().unwrap_or(from);
    let windows = alpha_windows(src, from, to)?;
    if bounds_stable(&windows) && doubling.tail_inf > 0.0 && doubling.tail_sup.is_finite() {
        let lower = windows.iter().map(|w| w.lower).fold(f64::INFINITY, f64::min);
        let upper = windows.iter().map(|w| w.upper).fold(f64::NEG_INFINITY, f64::max);
        evidence.notes.push(format!(
            "alpha(n) within [{lower:.4}, {upper:.4}] for n in [{from}, {to}]; last octave inside earlier bounds (+{:.0}%)",
            STABILITY * 100.0
        ));
        evidence.windows = windows;
        return Ok(VariationClass {
            kind: VariationKind::Ors { lower, upper },
            evidence,
        });
    }
    evidence
        .notes
        .push(String::from("alpha(n) not eventually bounded on the probed tail"));

    let ext = log_extremes(src, from, to)?;
    if ext.windows.len() >= 3 {
        let maxes: Vec<f64> = ext.windows.iter().map(|w| w.upper).collect();
        let mins: Vec<f64> = ext.windows.iter().map(|w| w.lower).collect();
        if let (Some((psi, rmax)), Some((phi, rmin))) =
            (slope_fit(&ext.argmax, &maxes), slope_fit(&ext.argmin, &mins))
        {
            if phi <= psi + 1e-9 && rmax <= 1.0 && rmin <= 1.0 {
                evidence.notes.push(format!(
                    "per-octave extremes of log a_n follow slopes {phi:.4} (min) and {psi:.4} (max), residuals ≤ {:.3}",
                    rmax.max(rmin)
                ));
                evidence.windows = ext.windows;
                return Ok(VariationClass {
                    kind: VariationKind::MSandwich { phi, psi },
                    evidence,
                });
            }
            evidence.notes.push(format!(
                "power-law envelope fit rejected (slopes {phi:.4}/{psi:.4}, residuals {rmin:.3}/{rmax:.3})"
            ));
        }
    }
    Ok(VariationClass {
        kind: VariationKind::Unknown,
        evidence,
    })
}

/// Operations of the class algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassOp {
    Product,
    Quotient,
    Power(f64),
    Sum,
    Difference,
}

/// Combines two RS classes. `Power` uses only `x`.
pub fn class_algebra(x: &VariationKind, y: &VariationKind, op: ClassOp) -> VariationClass {
    let unknown = |why: String| VariationClass {
        kind: VariationKind::Unknown,
        evidence: Evidence {
            notes: alloc::vec![why],
            ..Evidence::default()
        },
    };
    let rs = |alpha: f64, why: String| VariationClass {
        kind: VariationKind::Rs { alpha },
        evidence: Evidence {
            notes: alloc::vec![why],
            ..Evidence::default()
        },
    };
    let VariationKind::Rs { alpha: a } = *x else {
        return unknown(format!("left operand is {}, not RS", x.tag()));
    };
    if let ClassOp::Power(r) = op {
        return rs(a * r, format!("(c_n^r) ∈ RS_(αr) with r = {r}"));
    }
    let VariationKind::Rs { alpha: b } = *y else {
        return unknown(format!("right operand is {}, not RS", y.tag()));
    };
    match op {
        ClassOp::Product => rs(a + b, "(c_n b_n) ∈ RS_(α+β)".to_string()),
        ClassOp::Quotient => rs(a - b, "(c_n / b_n) ∈ RS_(α−β)".to_string()),
        ClassOp::Sum => rs(a.max(b), "(c_n + b_n) ∈ RS_max(α,β)".to_string()),
        ClassOp::Difference if b < a => rs(a, "β < α, so c_n − b_n ~ c_n".to_string()),
        ClassOp::Difference => unknown(format!(
            "difference with β = {b} ≥ α = {a}: no rule applies"
        )),
        ClassOp::Power(_) => unreachable!(),
    }
}

/// Raabe index of `f(a_n)` when `a_n ∈ RS_α` and `x f'(x)/f(x) → β`.
pub fn transform_index(alpha: f64, beta: f64) -> f64 {
    alpha * beta
}

/// `f(a_n)` for a transform written in the variable `x`.
pub struct Transformed<'a> {
    inner: &'a dyn TermSource,
    f: &'a Expr,
    name: String,
}

impl<'a> Transformed<'a> {
    pub fn new(inner: &'a dyn TermSource, f: &'a Expr) -> Self {
        let name = format!("f(a_n) with f(x) = {f}");
        Transformed { inner, f, name }
    }
}

impl TermSource for Transformed<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn first_index(&self) -> u64 {
        self.inner.first_index()
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        let x = self.inner.term(n)?;
        eval_with_x(self.f, n, x).map_err(|e| TermError::Domain {
            index: n,
            detail: e.to_string(),
        })
    }
}

/// Numeric side of [`transform_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransformCheck {
    pub expected: f64,
    pub estimate: LimitEstimate,
    pub agrees: bool,
}

/// Extrapolates the Raabe statistic of `f(a_n)` and compares it with `α·β`.
pub fn transform_check(
    src: &dyn TermSource,
    f: &Expr,
    alpha: f64,
    beta: f64,
    config: &AnalysisConfig,
) -> Result<TransformCheck, ClassifyError> {
    let t = Transformed::new(src, f);
    let grid = config.grid().starting_at(src.first_index());
    let series = raabe_statistic(&t, &grid)?;
    let estimate = extrapolate_limit(&series.grid, &series.alpha, config.tol)?;
    let expected = transform_index(alpha, beta);
    let agrees = estimate.decisive && estimate.within(expected, config.tol, 3.0);
    Ok(TransformCheck {
        expected,
        estimate,
        agrees,
    })
}

/// Windowed bounds of `a_{[xn]}/a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioEnvelope {
    pub x: f64,
    pub liminf: f64,
    pub limsup: f64,
    pub windows: Vec<EvidenceWindow>,
}

impl RatioEnvelope {
    /// Whether the envelope lies within the bounds implied by
    /// `n^lower ⪯ a_n ⪯ n^upper`, widened by the relative slack `eps`.
    /// For `x ≤ 1` the roles of the exponents swap.
    pub fn within_power_bounds(&self, lower: f64, upper: f64, eps: f64) -> bool {
        let (lo_exp, hi_exp) = if self.x > 1.0 { (lower, upper) } else { (upper, lower) };
        let lo = libm::pow(self.x, lo_exp) * (1.0 - eps);
        let hi = libm::pow(self.x, hi_exp) * (1.0 + eps);
        self.liminf >= lo && self.limsup <= hi
    }
}

/// Inf/sup of `|a_{[xn]}/a_n|` over every `n` in the tail half of the grid,
/// reported per octave. Terms up to `x·n_max` are materialized once.
pub fn ratio_envelope(
    src: &dyn TermSource,
    x: f64,
    grid: &IndexGrid,
) -> Result<RatioEnvelope, ClassifyError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(ClassifyError::BadScale(x));
    }
    let grid = grid.starting_at(src.first_index());
    let first = src.first_index();
    let Some(to) = grid.last() else {
        return Err(DiagnosticsError::TooFewSamples { got: 0 }.into());
    };
    let from = grid.points()[tail_start(grid.len())];
    let from = from.max(libm::ceil(first as f64 / x) as u64);
    let top = (libm::floor(x * to as f64) as u64).max(to);
    let mut logs: Vec<f64> = Vec::with_capacity((top - first + 1) as usize);
    let mut err = None;
    src.scan(first, top, &mut |n, v| {
        if err.is_none() && v.sign() != Sign::Positive {
            err = Some(if v.is_zero() {
                ClassifyError::from(TermError::Zero { index: n })
            } else {
                ClassifyError::SignChange { index: n }
            });
        }
        logs.push(v.logmag());
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let at = |n: u64| logs[(n - first) as usize];
    let mut windows = Vec::new();
    for (lo, hi) in octaves(from, to) {
        let mut w = EvidenceWindow {
            from: lo,
            to: hi,
            lower: f64::INFINITY,
            upper: f64::NEG_INFINITY,
        };
        for n in lo..=hi {
            let m = (libm::floor(x * n as f64) as u64).max(first);
            let r = libm::exp(at(m) - at(n));
            w.lower = w.lower.min(r);
            w.upper = w.upper.max(r);
        }
        windows.push(w);
    }
    let liminf = windows.iter().map(|w| w.lower).fold(f64::INFINITY, f64::min);
    let limsup = windows.iter().map(|w| w.upper).fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioEnvelope {
        x,
        liminf,
        limsup,
        windows,
    })
}
