//! Plot-ready CSV series.

use std::io::Write;
use std::path::Path;

use regvar_core::diagnostics::{
    doubling_ratios, extrapolate_limit, raabe_statistic, second_order_statistic,
};
use regvar_core::oracle::partial_sum;
use regvar_core::source::Abs;
use regvar_core::{AnalysisConfig, TermSource};

/// One grid row of the diagnostics CSV. Cells are empty where a value is
/// unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub n: u64,
    pub alpha: Option<f64>,
    pub alpha_log: Option<f64>,
    pub beta: Option<f64>,
    pub doubling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumsRow {
    pub n: u64,
    pub s: f64,
    pub increment: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Diagnostics(#[from] regvar_core::diagnostics::DiagnosticsError),
    #[error(transparent)]
    Term(#[from] regvar_core::TermError),
    #[error(transparent)]
    Oracle(#[from] regvar_core::oracle::OracleError),
}

/// `α(n)`, `n log|a_{n+1}/a_n|`, `β(n)` and `|a_{2n}/a_n|` of `|a_n|` on the
/// grid. `β` uses `α̂` snapped to −1 when it lies in the −1 band.
pub fn diagnostics_rows(
    src: &dyn TermSource,
    config: &AnalysisConfig,
) -> Result<Vec<DiagnosticsRow>, PlotError> {
    let abs = Abs(src);
    let grid = config.grid();
    let series = raabe_statistic(&abs, &grid)?;
    let beta = extrapolate_limit(&series.grid, &series.alpha, config.tol)
        .ok()
        .and_then(|est| {
            let a = if config.in_band(&est, -1.0) { -1.0 } else { est.value };
            second_order_statistic(&abs, a, config.family, &grid).ok()
        })
        .and_then(|s| s.second_order.map(|so| so.beta));
    let doubling = doubling_ratios(&abs, &grid)?;
    Ok(series
        .grid
        .iter()
        .enumerate()
        .map(|(i, &n)| DiagnosticsRow {
            n,
            alpha: Some(series.alpha[i]),
            alpha_log: Some(series.alpha_log[i]),
            beta: beta.as_ref().map(|b| b[i]),
            doubling: doubling.ratios.get(i).copied(),
        })
        .collect())
}

pub fn sums_rows(src: &dyn TermSource, n_max: u64) -> Result<Vec<SumsRow>, PlotError> {
    let trace = partial_sum(src, n_max)?;
    Ok(trace
        .checkpoints
        .iter()
        .zip(&trace.partial_sums)
        .enumerate()
        .map(|(i, (&n, &s))| SumsRow {
            n,
            s,
            increment: i.checked_sub(1).map(|j| trace.increments[j]),
        })
        .collect())
}

fn cell(v: Option<f64>) -> String {
    v.filter(|x| x.is_finite()).map(|x| x.to_string()).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_diagnostics<W: Write>(w: W, rows: &[DiagnosticsRow]) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(["n", "alpha", "alpha_log", "beta", "doubling"])?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            cell(r.alpha),
            cell(r.alpha_log),
            cell(r.beta),
            cell(r.doubling),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sums<W: Write>(w: W, rows: &[SumsRow]) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(["n", "S", "increment"])?;
    for r in rows {
        out.write_record([r.n.to_string(), cell(Some(r.s)), cell(r.increment)])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `diagnostics.csv` and `sums.csv` into `dir`, creating it if needed.
pub fn write_plotdata(
    dir: &Path,
    src: &dyn TermSource,
    config: &AnalysisConfig,
) -> Result<(), PlotError> {
    let io = |path: &Path| {
        let p = path.display().to_string();
        move |source| PlotError::Io { path: p, source }
    };
    let csv_err = |path: &Path| {
        let p = path.display().to_string();
        move |source| PlotError::Csv { path: p, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let diag = diagnostics_rows(src, config)?;
    let sums = sums_rows(src, config.n_max)?;
    let path = dir.join("diagnostics.csv");
    let file = std::fs::File::create(&path).map_err(io(&path))?;
    write_diagnostics(file, &diag).map_err(csv_err(&path))?;
    let path = dir.join("sums.csv");
    let file = std::fs::File::create(&path).map_err(io(&path))?;
    write_sums(file, &sums).map_err(csv_err(&path))?;
    Ok(())
}
