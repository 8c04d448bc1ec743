use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regvar::{analyze_source, build_source, plot, verify, AnalyzeError};
use regvar_core::diagnostics::WeightFamily;
use regvar_core::{AnalysisConfig, Catalog, SourceSpec};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "regvar", version, about = "Convergence of series through regular variation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a sequence and run the convergence ladder on Σ a_n.
    Analyze(AnalyzeArgs),
    /// List the built-in sequences.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Run the ladder and the oracle on every catalog entry.
    CatalogVerify {
        /// A catalog name or family such as `gamma_ratio`.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1 << 20)]
        nmax: u64,
    },
    /// Write diagnostics.csv and sums.csv for plotting.
    Plotdata {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        csv_dir: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Catalog entry, e.g. `harmonic` or `gamma_ratio(-0.5)`.
    #[arg(long)]
    name: Option<String>,
    /// Formula for a_n in n, e.g. `1/(n*log(n+1))`.
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    /// Formula for a_(n+1)/a_n − 1, with a_1 = 1.
    #[arg(long, allow_hyphen_values = true)]
    ratio_expr: Option<String>,
}

#[derive(Args)]
struct SeqArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1 << 20)]
    nmax: u64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Weight b(n) of the refined test: log, loglog, power:r or logpow:t.
    #[arg(long, default_value = "power:1")]
    family: WeightFamily,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long)]
    json: bool,
    /// Also write diagnostics.csv and sums.csv here.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

impl SeqArgs {
    fn spec(&self) -> SourceSpec {
        let s = &self.source;
        match (&s.name, &s.expr, &s.ratio_expr) {
            (Some(n), _, _) => SourceSpec::Catalog(n.clone()),
            (_, Some(e), _) => SourceSpec::Expr(e.clone()),
            (_, _, Some(r)) => SourceSpec::RatioExpr(r.clone()),
            _ => unreachable!("clap enforces one source"),
        }
    }

    fn config(&self) -> Result<AnalysisConfig, String> {
        let d = AnalysisConfig::default();
        if self.nmax < 4 * d.grid_start {
            return Err(format!("--nmax must be at least {}", 4 * d.grid_start));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err("--tol must be positive".into());
        }
        Ok(AnalysisConfig {
            n_max: self.nmax,
            tol: self.tol,
            family: self.family,
            ..d
        })
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn print(s: &str) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(s.as_bytes());
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_analyze(args: AnalyzeArgs) -> ExitCode {
    let config = match args.seq.config() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let spec = args.seq.spec();
    let src = match build_source(&spec) {
        Ok(s) => s,
        Err(e @ AnalyzeError::Parse { .. }) => return fail(e.render()),
        Err(e) => return fail(e),
    };
    let report = analyze_source(&*src, &spec, &config);
    if let Some(dir) = &args.csv_dir {
        if let Err(e) = plot::write_plotdata(dir, &*src, &config) {
            return fail(e);
        }
    }
    if args.json {
        print(&report.to_json());
    } else {
        print(&report.to_string());
    }
    if report.verdict.conclusion == "Inconclusive" {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

#[derive(Serialize)]
struct CatalogItem<'a> {
    name: &'a str,
    family: &'a str,
    formula: &'a str,
    first_index: u64,
    alpha: Option<f64>,
    verdict: &'a str,
    second_order: Option<f64>,
    alternating: bool,
    provenance: &'a str,
}

fn cmd_catalog(as_json: bool) -> ExitCode {
    let catalog = Catalog::standard();
    if as_json {
        let items: Vec<_> = catalog
            .entries()
            .iter()
            .map(|e| CatalogItem {
                name: &e.name,
                family: e.family,
                formula: &e.formula,
                first_index: e.first_index,
                alpha: e.alpha,
                verdict: e.verdict.label(),
                second_order: e.second_order,
                alternating: e.alternating,
                provenance: &e.provenance,
            })
            .collect();
        print(&json(&items));
    } else {
        let width = catalog.names().map(str::len).max().unwrap_or(0);
        let mut out = String::new();
        for e in catalog.entries() {
            let alpha = e.alpha.map_or_else(|| "-".to_string(), |a| format!("{a}"));
            out.push_str(&format!(
                "{:<width$}  {:<12}  alpha {:<5}  {}\n",
                e.name,
                e.verdict.label(),
                alpha,
                e.formula
            ));
        }
        print(&out);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(only: Option<String>, as_json: bool, nmax: u64) -> ExitCode {
    let catalog = Catalog::standard();
    let entries = match &only {
        Some(f) => catalog.matching(f),
        None => catalog.entries().iter().collect(),
    };
    if entries.is_empty() {
        let f = only.unwrap_or_default();
        return fail(match regvar::suggest_name(&f) {
            Some(s) => format!("no catalog entry matches `{f}`; did you mean `{s}`?"),
            None => format!("no catalog entry matches `{f}`"),
        });
    }
    let config = AnalysisConfig {
        n_max: nmax,
        ..AnalysisConfig::default()
    };
    let rows = verify::verify_all(&entries, &config);
    if as_json {
        print(&json(&rows));
    } else {
        print(&verify::render_table(&rows));
    }
    if rows.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_plotdata(seq: SeqArgs, dir: PathBuf) -> ExitCode {
    let config = match seq.config() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let src = match build_source(&seq.spec()) {
        Ok(s) => s,
        Err(e) => return fail(e.render()),
    };
    match plot::write_plotdata(&dir, &*src, &config) {
        Ok(()) => {
            print(&format!(
                "wrote {} and {}\n",
                dir.join("diagnostics.csv").display(),
                dir.join("sums.csv").display()
            ));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Catalog { json } => cmd_catalog(json),
        Command::CatalogVerify { only, json, nmax } => cmd_verify(only, json, nmax),
        Command::Plotdata { seq, csv_dir } => cmd_plotdata(seq, csv_dir),
    }
}
