//! Convergence and divergence of real series through regular variation.
//!
//! Terms are handled in sign + log-magnitude form ([`SignedLogValue`]) so that
//! sequences such as `4^n (n!)^2 / (2n)!` never overflow. On top of that the
//! crate provides:
//!
//! - [`diagnostics`]: the Raabe statistic `α(n) = n(|a_{n+1}/a_n| − 1)`, its
//!   log form, second-order statistics `b(n)(α(n) − α)` and a limit
//!   extrapolator with an explicit uncertainty.
//! - [`classify`]: regular-variation classification (RS, O-regular, sandwich
//!   classes), the `C·n^α·exp Σ δ_k/k` representation and class algebra.
//! - [`verdict`]: the test ladder (Raabe, Gauss, refined second-order tests,
//!   Bertrand, accumulation, doubling), Karamata estimates and the
//!   even/odd analysis of alternating series.
//! - [`oracle`]: brute-force compensated partial sums used to cross-check
//!   every verdict.
//! - [`expr`]: a small formula language for user-defined sequences.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod classify;
pub mod diagnostics;
pub mod expr;
pub mod oracle;
pub mod source;
pub mod special;
pub mod value;
pub mod verdict;

mod lsq;

pub use catalog::{Catalog, CatalogEntry};
pub use classify::{VariationClass, VariationKind};
pub use diagnostics::{DiagnosticSeries, IndexGrid, LimitEstimate, WeightFamily};
pub use source::{make_term_source, SourceSpec, TermError, TermSource};
pub use value::{CompensatedSum, Sign, SignedLogValue};
pub use verdict::{run_ladder, AnalysisConfig, Conclusion, Rung, Verdict};
