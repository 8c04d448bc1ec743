//! Raabe-type statistics on a geometric index grid and limit extrapolation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::lsq;
use crate::source::{TermError, TermSource};

/// Errors from the diagnostics layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("extrapolation needs at least 4 samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("non-finite sample at n = {index}")]
    NonFinite { index: u64 },
    #[error("weight b(n) = {family} is below 1 or decreasing at n = {index}")]
    WeightPrecondition { family: WeightFamily, index: u64 },
}

/// Increasing sample indices `n_1 < … < n_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGrid {
    points: Vec<u64>,
}

impl IndexGrid {
    /// `start·2^j` for every `j` with `start·2^j ≤ n_max`.
    pub fn geometric(start: u64, n_max: u64) -> IndexGrid {
        let mut points = Vec::new();
        let mut n = start.max(1);
        while n <= n_max {
            points.push(n);
            match n.checked_mul(2) {
                Some(next) => n = next,
                None => break,
            }
        }
        IndexGrid { points }
    }

    /// Sorted, deduplicated copy of arbitrary positive indices.
    pub fn from_points(points: impl IntoIterator<Item = u64>) -> IndexGrid {
        let mut points: Vec<u64> = points.into_iter().filter(|&n| n >= 1).collect();
        points.sort_unstable();
        points.dedup();
        IndexGrid { points }
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.points.last().copied()
    }

    /// Drops points below `first`.
    pub fn starting_at(&self, first: u64) -> IndexGrid {
        IndexGrid {
            points: self.points.iter().copied().filter(|&n| n >= first).collect(),
        }
    }
}

/// The weight `b(n)` of a second-order statistic `b(n)(α(n) − α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFamily {
    /// `log n`
    Log,
    /// `log log n`
    LogLog,
    /// `n^r`, `r > 0`
    Power(f64),
    /// `(log n)^θ`, `θ > 0`
    LogPower(f64),
}

impl WeightFamily {
    pub fn weight(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            WeightFamily::Log => libm::log(x),
            WeightFamily::LogLog => libm::log(libm::log(x)),
            WeightFamily::Power(r) => libm::pow(x, r),
            WeightFamily::LogPower(t) => libm::pow(libm::log(x), t),
        }
    }

    /// Whether `Σ 1/(k·b(k))` converges.
    pub fn summable(&self) -> bool {
        match *self {
            WeightFamily::Log | WeightFamily::LogLog => false,
            WeightFamily::Power(r) => r > 0.0,
            WeightFamily::LogPower(t) => t > 1.0,
        }
    }

    /// Smallest index from which `b(n) ≥ 1`.
    pub fn min_index(&self) -> u64 {
        match *self {
            WeightFamily::Log => 3,
            // e^e ≈ 15.15
            WeightFamily::LogLog => 16,
            WeightFamily::Power(_) => 1,
            WeightFamily::LogPower(_) => 3,
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFamily::Log => f.write_str("log"),
            WeightFamily::LogLog => f.write_str("loglog"),
            WeightFamily::Power(r) => write!(f, "power:{r}"),
            WeightFamily::LogPower(t) => write!(f, "logpow:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown weight family `{0}` (expected log, loglog, power:r or logpow:t)")]
pub struct ParseFamilyError(pub String);

impl FromStr for WeightFamily {
    type Err = ParseFamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFamilyError(s.into());
        let positive = |t: &str| match t.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(err()),
        };
        match s.trim() {
            "log" => Ok(WeightFamily::Log),
            "loglog" => Ok(WeightFamily::LogLog),
            t => {
                if let Some(r) = t.strip_prefix("power:") {
                    Ok(WeightFamily::Power(positive(r)?))
                } else if let Some(r) = t.strip_prefix("logpow:") {
                    Ok(WeightFamily::LogPower(positive(r)?))
                } else {
                    Err(err())
                }
            }
        }
    }
}

/// Second-order samples `β(n_j) = b(n_j)(α(n_j) − α̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrder {
    pub family: WeightFamily,
    pub alpha_hat: f64,
    pub beta: Vec<f64>,
}

/// Raabe statistics sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub grid: Vec<u64>,
    /// `n(|a_{n+1}/a_n| − 1)`
    pub alpha: Vec<f64>,
    /// `n·log|a_{n+1}/a_n|`
    pub alpha_log: Vec<f64>,
    pub second_order: Option<SecondOrder>,
}

/// `α(n)` and `n·log|a_{n+1}/a_n|` at one index.
pub fn raabe_at(src: &dyn TermSource, n: u64) -> Result<(f64, f64), TermError> {
    let x = n as f64;
    let log_diff = src.log_span(n, n + 1)?;
    let alpha = match src.magnitude_ratio(n) {
        Some(m) if m == -1.0 => return Err(TermError::Zero { index: n + 1 }),
        Some(m) if !m.is_finite() => return Err(TermError::NonFinite { index: n + 1 }),
        Some(m) => x * m,
        None => x * libm::expm1(log_diff),
    };
    if !alpha.is_finite() || !log_diff.is_finite() {
        return Err(TermError::NonFinite { index: n + 1 });
    }
    Ok((alpha, x * log_diff))
}

/// Streams `α(n)` for `n` in `from..=to` from one pass over the terms.
pub fn scan_alpha(
    src: &dyn TermSource,
    from: u64,
    to: u64,
    f: &mut dyn FnMut(u64, f64),
) -> Result<(), TermError> {
    let mut prev: Option<(u64, f64)> = None;
    let mut err = None;
    src.scan(from, to + 1, &mut |n, v| {
        if err.is_some() {
            return;
        }
        if v.is_zero() {
            err = Some(TermError::Zero { index: n });
            return;
        }
        if let Some((k, l)) = prev {
            let x = k as f64;
            let a = match src.magnitude_ratio(k) {
                Some(m) => x * m,
                None => x * libm::expm1(v.logmag() - l),
            };
            f(k, a);
        }
        prev = Some((n, v.logmag()));
    })?;
    err.map_or(Ok(()), Err)
}

/// Samples the Raabe statistic and its log form on `grid`.
pub fn raabe_statistic(
    src: &dyn TermSource,
    grid: &IndexGrid,
) -> Result<DiagnosticSeries, DiagnosticsError> {
    let grid = grid.starting_at(src.first_index());
    let mut alpha = Vec::with_capacity(grid.len());
    let mut alpha_log = Vec::with_capacity(grid.len());
    for &n in grid.points() {
        let (a, l) = raabe_at(src, n)?;
        alpha.push(a);
        alpha_log.push(l);
    }
    Ok(DiagnosticSeries {
        grid: grid.points,
        alpha,
        alpha_log,
        second_order: None,
    })
}

/// Raabe samples plus `β(n) = b(n)(α(n) − α̂)` for the given weight family.
pub fn second_order_statistic(
    src: &dyn TermSource,
    alpha_hat: f64,
    family: WeightFamily,
    grid: &IndexGrid,
) -> Result<DiagnosticSeries, DiagnosticsError> {
    let mut series = raabe_statistic(src, grid)?;
    if !alpha_hat.is_finite() {
        return Err(DiagnosticsError::NonFinite {
            index: series.grid.first().copied().unwrap_or(0),
        });
    }
    let mut prev = 1.0;
    let mut beta = Vec::with_capacity(series.grid.len());
    for (&n, &a) in series.grid.iter().zip(&series.alpha) {
        let b = family.weight(n);
        if !(b >= 1.0) || b < prev {
            return Err(DiagnosticsError::WeightPrecondition { family, index: n });
        }
        prev = b;
        beta.push(b * (a - alpha_hat));
    }
    series.second_order = Some(SecondOrder {
        family,
        alpha_hat,
        beta,
    });
    Ok(series)
}

/// `(n+k)(|a_{n+r}/a_n| − 1)` on the grid.
pub fn shifted_statistic(
    src: &dyn TermSource,
    grid: &IndexGrid,
    r: u64,
    k: u64,
) -> Result<Vec<f64>, TermError> {
    grid.starting_at(src.first_index())
        .points()
        .iter()
        .map(|&n| {
            let span = src.log_span(n, n + r)?;
            Ok((n + k) as f64 * libm::expm1(span))
        })
        .collect()
}

/// Doubling ratios `c_{2n}/c_n` with their running bounds over the tail half.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingRatios {
    pub grid: Vec<u64>,
    pub ratios: Vec<f64>,
    pub tail_inf: f64,
    pub tail_sup: f64,
}

/// `|a_{2n}/a_n|` at each grid point.
pub fn doubling_ratios(
    src: &dyn TermSource,
    grid: &IndexGrid,
) -> Result<DoublingRatios, TermError> {
    let grid = grid.starting_at(src.first_index());
    let mut ratios = Vec::with_capacity(grid.len());
    for &n in grid.points() {
        ratios.push(libm::exp(src.log_span(n, 2 * n)?));
    }
    let tail = &ratios[tail_start(ratios.len())..];
    let tail_inf = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_sup = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DoublingRatios {
        grid: grid.points,
        ratios,
        tail_inf,
        tail_sup,
    })
}

/// Index where the tail half of `m` samples begins.
pub(crate) fn tail_start(m: usize) -> usize {
    m / 2
}

/// Decay model used by [`extrapolate_limit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `v + c₁/n + c₂/n²`
    Inverse,
    /// `v + c₁/log n + c₂/(log n)² + c₃/n`, for statistics perturbed by a
    /// slowly varying factor.
    InverseLog,
}

impl DecayModel {
    fn basis(&self, n: u64) -> Vec<f64> {
        let x = n as f64;
        match self {
            DecayModel::Inverse => alloc::vec![1.0, 1.0 / x, 1.0 / (x * x)],
            DecayModel::InverseLog => {
                let l = 1.0 / libm::log(x);
                alloc::vec![1.0, l, l * l, 1.0 / x]
            }
        }
    }

    fn params(&self) -> usize {
        match self {
            DecayModel::Inverse => 3,
            DecayModel::InverseLog => 4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DecayModel::Inverse => "1, 1/n, 1/n^2",
            DecayModel::InverseLog => "1, 1/log n, 1/(log n)^2, 1/n",
        }
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An extrapolated limit with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    pub half_width: f64,
    pub model: DecayModel,
    pub decisive: bool,
    /// Number of tail samples used in the fit.
    pub window: usize,
}

impl LimitEstimate {
    /// `|value − x| ≤ max(tol, k·half_width)`.
    pub fn within(&self, x: f64, tol: f64, k: f64) -> bool {
        libm::fabs(self.value - x) <= tol.max(k * self.half_width)
    }
}

impl fmt::Display for LimitEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} ± {:.1e}", self.value, self.half_width)
    }
}

fn fit_model(model: DecayModel, grid: &[u64], y: &[f64]) -> Option<(f64, f64)> {
    let k = model.params();
    let m = grid.len();
    if m < k + 1 {
        return None;
    }
    let rows: Vec<Vec<f64>> = grid.iter().map(|&n| model.basis(n)).collect();
    let full = lsq::fit(&rows, y)?;
    let head = lsq::fit(&rows[..m - 1], &y[..m - 1])?;
    let tail = lsq::fit(&rows[1..], &y[1..])?;
    let change = libm::fmax(
        libm::fabs(full.coef[0] - head.coef[0]),
        libm::fabs(full.coef[0] - tail.coef[0]),
    );
    Some((full.coef[0], full.residual_norm.max(change)))
}

/// Extrapolates `lim y(n)` from samples on `grid`.
///
/// The `{1, 1/n, 1/n²}` model is fitted over the tail half of the grid (at
/// least four points). When that fit is not decisive and enough points are
/// available, the log-augmented model is tried as well; the estimate with the
/// smaller half-width is returned. The half-width is the larger of the
/// residual norm and the shift of the limit when the first or the last point
/// is dropped.
pub fn extrapolate_limit(
    grid: &[u64],
    samples: &[f64],
    tol: f64,
) -> Result<LimitEstimate, DiagnosticsError> {
    let m = grid.len().min(samples.len());
    if m < 4 {
        return Err(DiagnosticsError::TooFewSamples { got: m });
    }
    if let Some(i) = samples[..m].iter().position(|v| !v.is_finite()) {
        return Err(DiagnosticsError::NonFinite { index: grid[i] });
    }
    let mut best: Option<LimitEstimate> = None;
    for model in [DecayModel::Inverse, DecayModel::InverseLog] {
        let window = (m - tail_start(m)).max(model.params() + 1);
        if window > m {
            continue;
        }
        let (g, y) = (&grid[m - window..m], &samples[m - window..m]);
        let Some((value, hw)) = fit_model(model, g, y) else {
            continue;
        };
        let est = LimitEstimate {
            value,
            half_width: hw,
            model,
            decisive: hw <= tol,
            window,
        };
        if est.decisive {
            return Ok(est);
        }
        if best.map_or(true, |b| hw < b.half_width) {
            best = Some(est);
        }
    }
    best.ok_or(DiagnosticsError::TooFewSamples { got: m })
}

/// Human-readable summary used in notes.
pub fn describe_limit(label: &str, est: &LimitEstimate) -> String {
    format!(
        "{label} → {:.6} (± {:.1e}, model {}, {} pts{})",
        est.value,
        est.half_width,
        est.model,
        est.window,
        if est.decisive { "" } else { ", not decisive" }
    )
}
