//! Catalog verification: ladder and oracle against the documented verdicts.

use rayon::prelude::*;
use regvar_core::oracle::{empirical_verdict, partial_sum, EmpiricalVerdict};
use regvar_core::{AnalysisConfig, CatalogEntry, Conclusion};
use serde::Serialize;

use crate::report::empirical_label;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub name: String,
    pub documented: String,
    pub ladder: String,
    pub decided_by: Option<String>,
    pub oracle: String,
    pub pass: bool,
    pub note: Option<String>,
}

fn oracle_conclusion(v: EmpiricalVerdict) -> Conclusion {
    match v {
        EmpiricalVerdict::LikelyConverges => Conclusion::Converges,
        EmpiricalVerdict::LikelyDiverges => Conclusion::Diverges,
        EmpiricalVerdict::Undecided => Conclusion::Inconclusive,
    }
}

/// A row fails when the ladder or a committed oracle contradicts the
/// documented verdict.
pub fn verify_entry(entry: &CatalogEntry, config: &AnalysisConfig) -> VerifyRow {
    let src = entry.source();
    let verdict = regvar_core::run_ladder(&*src, config);
    let (oracle, oracle_err) = match partial_sum(&*src, config.n_max) {
        Ok(t) => (empirical_verdict(&t), None),
        Err(e) => (EmpiricalVerdict::Undecided, Some(e.to_string())),
    };
    let ladder_ok = !verdict.conclusion.contradicts(entry.verdict);
    let oracle_ok = !oracle_conclusion(oracle).contradicts(entry.verdict);
    let mut notes = Vec::new();
    if !ladder_ok {
        notes.push(format!("ladder contradicts the documented {}", entry.verdict));
    }
    if !oracle_ok {
        notes.push(format!("oracle contradicts the documented {}", entry.verdict));
    }
    if verdict.conclusion == Conclusion::Inconclusive {
        notes.push(format!(
            "ladder inconclusive; oracle {}{}",
            empirical_label(oracle),
            oracle_err.map(|e| format!(" ({e})")).unwrap_or_default()
        ));
    }
    if let Some(n) = entry.note {
        notes.push(n.to_string());
    }
    VerifyRow {
        name: entry.name.clone(),
        documented: entry.verdict.label().into(),
        ladder: verdict.conclusion.label().into(),
        decided_by: verdict.decided_by.map(|r| r.label().into()),
        oracle: empirical_label(oracle).into(),
        pass: ladder_ok && oracle_ok,
        note: (!notes.is_empty()).then(|| notes.join("; ")),
    }
}

/// Verifies `entries` in parallel; rows come back in input order.
pub fn verify_all(entries: &[&CatalogEntry], config: &AnalysisConfig) -> Vec<VerifyRow> {
    entries.par_iter().map(|e| verify_entry(e, config)).collect()
}

pub fn render_table(rows: &[VerifyRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<width$}  {:<12}  {:<12}  {:<12}  {:<15}  {}\n",
        "name", "documented", "ladder", "decided_by", "oracle", "status"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:<12}  {:<12}  {:<12}  {:<15}  {}",
            r.name,
            r.documented,
            r.ladder,
            r.decided_by.as_deref().unwrap_or("-"),
            r.oracle,
            if r.pass { "pass" } else { "FAIL" }
        ));
        if let Some(n) = &r.note {
            out.push_str(&format!("  ({n})"));
        }
        out.push('\n');
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} entries, {} failed\n", rows.len(), failed));
    out
}
