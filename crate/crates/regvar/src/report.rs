//! JSON-facing report types and their plain-text rendering.

use std::fmt::{self, Write as _};

use regvar_core::classify::VariationClass;
use regvar_core::diagnostics::{DiagnosticSeries, LimitEstimate};
use regvar_core::oracle::{EmpiricalVerdict, SumTrace};
use regvar_core::verdict::{AsymptoticEstimate, BetaEstimate, GaussForm};
use regvar_core::{AnalysisConfig, SourceSpec, Verdict};
use serde::{Deserialize, Serialize};

/// JSON has no infinities or NaN.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    /// `name`, `expr` or `ratio_expr`.
    pub kind: String,
    pub source: String,
    pub n_max: u64,
    pub tol: f64,
    pub family: String,
}

impl InputEcho {
    pub fn new(spec: &SourceSpec, config: &AnalysisConfig) -> Self {
        let (kind, source) = match spec {
            SourceSpec::Catalog(s) => ("name", s),
            SourceSpec::Expr(s) => ("expr", s),
            SourceSpec::RatioExpr(s) => ("ratio_expr", s),
        };
        InputEcho {
            kind: kind.into(),
            source: source.clone(),
            n_max: config.n_max,
            tol: config.tol,
            family: config.family.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub value: f64,
    pub half_width: f64,
}

impl Limit {
    fn from_estimate(e: &LimitEstimate) -> Option<Self> {
        Some(Limit {
            value: finite(e.value)?,
            half_width: finite(e.half_width)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub family: String,
    pub value: f64,
    pub half_width: f64,
}

impl BetaReport {
    fn from_beta(b: &BetaEstimate) -> Option<Self> {
        Some(BetaReport {
            family: b.family.to_string(),
            value: finite(b.estimate.value)?,
            half_width: finite(b.estimate.half_width)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// `partial_sum` or `tail_sum`.
    pub target: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub p: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_diagnostic: Option<f64>,
}

impl From<&AsymptoticEstimate> for EstimateReport {
    fn from(e: &AsymptoticEstimate) -> Self {
        EstimateReport {
            target: e.target.label().into(),
            c: e.constant.and_then(finite),
            p: e.p,
            q: e.q,
            at: e.at,
            value: e.value.and_then(finite),
            ratio_diagnostic: e.ratio_diagnostic.and_then(finite),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussReport {
    pub p: f64,
    /// Absent when `α(n) = p` exactly on the tail.
    pub r: Option<f64>,
    pub bound_estimate: Option<f64>,
}

impl From<&GaussForm> for GaussReport {
    fn from(g: &GaussForm) -> Self {
        GaussReport {
            p: g.p,
            r: finite(g.r),
            bound_estimate: finite(g.bound_estimate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub conclusion: String,
    pub decided_by: Option<String>,
    pub alpha: Option<Limit>,
    pub beta: Option<BetaReport>,
    pub estimate: Option<EstimateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss: Option<GaussReport>,
    /// Verdict for `Σ|a_n|` when the series alternates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absolute: Option<Box<VerdictReport>>,
    pub notes: Vec<String>,
}

impl From<&Verdict> for VerdictReport {
    fn from(v: &Verdict) -> Self {
        VerdictReport {
            conclusion: v.conclusion.label().into(),
            decided_by: v.decided_by.map(|r| r.label().into()),
            alpha: v.alpha.as_ref().and_then(Limit::from_estimate),
            beta: v.beta.as_ref().and_then(BetaReport::from_beta),
            estimate: v.estimate.as_ref().map(EstimateReport::from),
            gauss: v.gauss.as_ref().map(GaussReport::from),
            absolute: v.absolute.as_deref().map(|a| Box::new(VerdictReport::from(a))),
            notes: v.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub from: u64,
    pub to: u64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    /// `RS`, `ORS`, `M_sandwich` or `Unknown`.
    pub tag: String,
    /// Lower and upper power exponents.
    pub exponents: Option<[f64; 2]>,
    pub alpha: Option<Limit>,
    pub windows: Vec<WindowReport>,
    pub notes: Vec<String>,
}

impl From<&VariationClass> for ClassReport {
    fn from(c: &VariationClass) -> Self {
        ClassReport {
            tag: c.kind.tag().into(),
            exponents: c
                .kind
                .exponents()
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .map(|(a, b)| [a, b]),
            alpha: c.evidence.alpha.as_ref().and_then(Limit::from_estimate),
            windows: c
                .evidence
                .windows
                .iter()
                .map(|w| WindowReport {
                    from: w.from,
                    to: w.to,
                    lower: finite(w.lower),
                    upper: finite(w.upper),
                })
                .collect(),
            notes: c.evidence.notes.clone(),
        }
    }
}

/// The Raabe statistic of `|a_n|` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSummary {
    pub grid: Vec<u64>,
    pub alpha: Vec<Option<f64>>,
    pub alpha_log: Vec<Option<f64>>,
}

impl From<&DiagnosticSeries> for DiagnosticsSummary {
    fn from(s: &DiagnosticSeries) -> Self {
        DiagnosticsSummary {
            grid: s.grid.clone(),
            alpha: s.alpha.iter().copied().map(finite).collect(),
            alpha_log: s.alpha_log.iter().copied().map(finite).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_max: u64,
    pub partial_sum: Option<f64>,
    /// `LikelyConverges`, `LikelyDiverges` or `Undecided`.
    pub empirical: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn empirical_label(v: EmpiricalVerdict) -> &'static str {
    match v {
        EmpiricalVerdict::LikelyConverges => "LikelyConverges",
        EmpiricalVerdict::LikelyDiverges => "LikelyDiverges",
        EmpiricalVerdict::Undecided => "Undecided",
    }
}

impl OracleReport {
    pub fn from_trace(trace: &SumTrace, verdict: EmpiricalVerdict) -> Self {
        OracleReport {
            n_max: trace.checkpoints.last().copied().unwrap_or(0),
            partial_sum: trace.partial_sums.last().copied().and_then(finite),
            empirical: empirical_label(verdict).into(),
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    pub input: InputEcho,
    pub class: Option<ClassReport>,
    pub verdict: VerdictReport,
    pub diagnostics: Option<DiagnosticsSummary>,
    pub oracle: Option<OracleReport>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn write_verdict(out: &mut String, v: &VerdictReport, indent: &str) -> fmt::Result {
    write!(out, "{indent}verdict: {}", v.conclusion)?;
    if let Some(r) = &v.decided_by {
        write!(out, " ({r})")?;
    }
    writeln!(out)?;
    if let Some(a) = &v.alpha {
        writeln!(out, "{indent}alpha_hat: {:.6} ± {:.1e}", a.value, a.half_width)?;
    }
    if let Some(b) = &v.beta {
        writeln!(out, "{indent}beta_hat [{}]: {:.6} ± {:.1e}", b.family, b.value, b.half_width)?;
    }
    if let Some(g) = &v.gauss {
        match g.r {
            Some(r) => writeln!(out, "{indent}gauss form: p = {:.6}, r = {r:.3}", g.p)?,
            None => writeln!(out, "{indent}gauss form: p = {:.6}, alpha(n) = p on the tail", g.p)?,
        }
    }
    if let Some(e) = &v.estimate {
        let lhs = if e.target == "tail_sum" { "T_n" } else { "S_n" };
        match e.c {
            Some(c) => write!(out, "{indent}estimate: {lhs} ~ {c:.6}·n^{:.4}", e.p)?,
            None => write!(out, "{indent}estimate: {lhs} ≍ n^{:.4}", e.p)?,
        }
        if e.q != 0.0 {
            write!(out, "·(log n)^{:.4}", e.q)?;
        }
        if let (Some(at), Some(val)) = (e.at, e.value) {
            write!(out, "  [{val:.6e} at n = {at}]")?;
        }
        if let (Some(at), Some(r)) = (e.at, e.ratio_diagnostic) {
            write!(out, "  [n c_n / S_n = {r:.4e} at n = {at}]")?;
        }
        writeln!(out)?;
    }
    if !v.notes.is_empty() {
        writeln!(out, "{indent}notes:")?;
        for n in &v.notes {
            writeln!(out, "{indent}  - {n}")?;
        }
    }
    Ok(())
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "sequence: {} ({})", self.input.source, self.input.kind)?;
        writeln!(
            out,
            "n_max = {}, tol = {:e}, family = {}",
            self.input.n_max, self.input.tol, self.input.family
        )?;
        if let Some(c) = &self.class {
            match c.exponents {
                Some([a, _]) if c.tag == "RS" => writeln!(out, "class: RS({a:.6})")?,
                Some([a, b]) => writeln!(out, "class: {} [{a:.4}, {b:.4}]", c.tag)?,
                None => writeln!(out, "class: {}", c.tag)?,
            }
        }
        write_verdict(&mut out, &self.verdict, "")?;
        if let Some(abs) = &self.verdict.absolute {
            writeln!(out, "absolute series:")?;
            write_verdict(&mut out, abs, "  ")?;
        }
        if let Some(o) = &self.oracle {
            match (o.partial_sum, &o.error) {
                (_, Some(e)) => writeln!(out, "oracle: {e}")?,
                (Some(s), None) => writeln!(
                    out,
                    "oracle: S({}) = {s:.10e}, empirical {}",
                    o.n_max, o.empirical
                )?,
                (None, None) => writeln!(out, "oracle: empirical {}", o.empirical)?,
            }
        }
        f.write_str(&out)
    }
}
