//! Command-line front end and file formats for `regvar-core`.
//!
//! [`analyze`] runs the classifier, the test ladder and the brute-force
//! oracle on one sequence and packs the result into an [`AnalysisReport`].
//! [`plot`] writes the diagnostic and partial-sum series as CSV, and
//! [`verify`] checks the whole catalog.

pub mod plot;
pub mod report;
pub mod verify;

use regvar_core::diagnostics::raabe_statistic;
use regvar_core::oracle::{empirical_verdict, partial_sum};
use regvar_core::source::Abs;
use regvar_core::{make_term_source, AnalysisConfig, Catalog, SourceSpec, TermError, TermSource};

pub use report::AnalysisReport;
use report::{ClassReport, DiagnosticsSummary, InputEcho, OracleReport, VerdictReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("unknown catalog name `{name}`{}", suggestion.as_ref().map(|s| format!("; did you mean `{s}`?")).unwrap_or_default())]
    UnknownName {
        name: String,
        suggestion: Option<String>,
    },
    #[error("{message}")]
    Parse { message: String, text: String, offset: usize },
    #[error(transparent)]
    Term(TermError),
}

impl AnalyzeError {
    /// The message, plus a caret under the offending offset for parse errors.
    pub fn render(&self) -> String {
        match self {
            AnalyzeError::Parse { message, text, offset } => {
                let col = text.get(..*offset).map_or(*offset, |s| s.chars().count());
                format!("{message}\n  {text}\n  {}^", " ".repeat(col))
            }
            e => e.to_string(),
        }
    }
}

/// Closest catalog name by edit distance, if any is reasonably close.
pub fn suggest_name(name: &str) -> Option<String> {
    let catalog = Catalog::standard();
    catalog
        .names()
        .map(|n| (strsim::levenshtein(name, n), n))
        .min()
        .filter(|(d, n)| *d <= (n.len() / 2).max(3))
        .map(|(_, n)| n.to_string())
}

/// Builds the term source, turning lookup and parse failures into
/// user-facing errors.
pub fn build_source(spec: &SourceSpec) -> Result<Box<dyn TermSource>, AnalyzeError> {
    make_term_source(spec).map_err(|e| match e {
        TermError::UnknownName { name } => AnalyzeError::UnknownName {
            suggestion: suggest_name(&name),
            name,
        },
        TermError::Parse(p) => AnalyzeError::Parse {
            message: format!("parse error: {p}"),
            text: match spec {
                SourceSpec::Catalog(s) | SourceSpec::Expr(s) | SourceSpec::RatioExpr(s) => s.clone(),
            },
            offset: p.offset,
        },
        e => AnalyzeError::Term(e),
    })
}

/// Diagnostics, classification, ladder and oracle for one sequence.
pub fn analyze(spec: &SourceSpec, config: &AnalysisConfig) -> Result<AnalysisReport, AnalyzeError> {
    let src = build_source(spec)?;
    Ok(analyze_source(&*src, spec, config))
}

pub fn analyze_source(src: &dyn TermSource, spec: &SourceSpec, config: &AnalysisConfig) -> AnalysisReport {
    let verdict = regvar_core::run_ladder(src, config);
    let grid = config.grid();
    let diagnostics = raabe_statistic(&Abs(src), &grid)
        .ok()
        .map(|s| DiagnosticsSummary::from(&s));
    let oracle = Some(match partial_sum(src, config.n_max) {
        Ok(trace) => OracleReport::from_trace(&trace, empirical_verdict(&trace)),
        Err(e) => OracleReport {
            n_max: config.n_max,
            partial_sum: None,
            empirical: "Undecided".into(),
            error: Some(e.to_string()),
        },
    });
    AnalysisReport {
        version: VERSION.into(),
        input: InputEcho::new(spec, config),
        class: verdict.class.as_ref().map(ClassReport::from),
        verdict: VerdictReport::from(&verdict),
        diagnostics,
        oracle,
    }
}
