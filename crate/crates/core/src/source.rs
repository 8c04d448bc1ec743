//! The term-source contract and generic sources.
//!
//! A [`TermSource`] produces `a_n` in sign + log-magnitude form for every
//! `n ≥ first_index`. Sources that know `a_{n+1}/a_n` exactly expose it through
//! [`TermSource::ratio`], which the diagnostics use to avoid cancellation.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;

use crate::catalog::Catalog;
use crate::expr::{self, ParseError};
use crate::value::{CompensatedSum, Sign, SignedLogValue};

/// Failure to produce a term.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TermError {
    #[error("term a_{index} is zero")]
    Zero { index: u64 },
    #[error("term a_{index} is not finite")]
    NonFinite { index: u64 },
    #[error("index {index} precedes the first index {first}")]
    BeforeStart { index: u64, first: u64 },
    #[error("domain error at n = {index}: {detail}")]
    Domain { index: u64, detail: String },
    #[error("index {index} is too large for this source")]
    IndexOverflow { index: u64 },
    #[error("unknown sequence `{name}`")]
    UnknownName { name: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl TermError {
    /// The index the error refers to, when there is one.
    pub fn index(&self) -> Option<u64> {
        match self {
            TermError::Zero { index }
            | TermError::NonFinite { index }
            | TermError::BeforeStart { index, .. }
            | TermError::Domain { index, .. }
            | TermError::IndexOverflow { index } => Some(*index),
            TermError::UnknownName { .. } | TermError::Parse(_) => None,
        }
    }
}

/// `|1 + r| − 1`, the magnitude ratio corresponding to a signed ratio `r`.
#[inline]
pub fn magnitude_from_signed(r: f64) -> f64 {
    if r >= -1.0 {
        r
    } else {
        -2.0 - r
    }
}

/// `log |1 + r|` without cancellation for small `r`.
#[inline]
pub fn log_abs_one_plus(r: f64) -> f64 {
    if r > -1.0 {
        libm::log1p(r)
    } else {
        libm::log(-1.0 - r)
    }
}

/// A deterministic sequence `a_n`, `n ≥ first_index()`.
///
/// Implementations must be pure: equal `n` gives bit-identical results, from
/// any thread.
pub trait TermSource: Send + Sync {
    fn name(&self) -> &str;

    fn first_index(&self) -> u64 {
        1
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError>;

    /// Exact `a_{n+1}/a_n − 1`, if the source knows it.
    fn ratio(&self, _n: u64) -> Option<f64> {
        None
    }

    /// Exact `|a_{n+1}/a_n| − 1`, if known.
    fn magnitude_ratio(&self, n: u64) -> Option<f64> {
        self.ratio(n).map(magnitude_from_signed)
    }

    /// The analytic regular-variation index, when documented.
    fn known_index(&self) -> Option<f64> {
        None
    }

    /// `log|a_to| − log|a_from|`.
    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        let a = nonzero(self.term(from)?, from)?;
        let b = nonzero(self.term(to)?, to)?;
        Ok(b.logmag() - a.logmag())
    }

    /// Calls `f(n, a_n)` for `n` in `from..=to`, in order.
    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        for n in from..=to {
            f(n, self.term(n)?);
        }
        Ok(())
    }
}

fn nonzero(v: SignedLogValue, index: u64) -> Result<SignedLogValue, TermError> {
    if v.is_zero() {
        Err(TermError::Zero { index })
    } else {
        Ok(v)
    }
}

macro_rules! forward_term_source {
    ($($ty:ty),*) => {$(
        impl<T: TermSource + ?Sized> TermSource for $ty {
            fn name(&self) -> &str { (**self).name() }
            fn first_index(&self) -> u64 { (**self).first_index() }
            fn term(&self, n: u64) -> Result<SignedLogValue, TermError> { (**self).term(n) }
            fn ratio(&self, n: u64) -> Option<f64> { (**self).ratio(n) }
            fn magnitude_ratio(&self, n: u64) -> Option<f64> { (**self).magnitude_ratio(n) }
            fn known_index(&self) -> Option<f64> { (**self).known_index() }
            fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
                (**self).log_span(from, to)
            }
            fn scan(
                &self,
                from: u64,
                to: u64,
                f: &mut dyn FnMut(u64, SignedLogValue),
            ) -> Result<(), TermError> {
                (**self).scan(from, to, f)
            }
        }
    )*};
}

forward_term_source!(&T, Box<T>, Arc<T>);

/// Closed-form term; `None` signals a non-finite value.
pub type TermFn = Box<dyn Fn(u64) -> Option<SignedLogValue> + Send + Sync>;
pub type RatioFn = Box<dyn Fn(u64) -> f64 + Send + Sync>;

/// A sequence given by a closed form, optionally with its exact ratio.
pub struct FnSource {
    name: String,
    first: u64,
    term: TermFn,
    ratio: Option<RatioFn>,
    known_index: Option<f64>,
}

impl FnSource {
    pub fn new(
        name: impl Into<String>,
        first: u64,
        term: impl Fn(u64) -> SignedLogValue + Send + Sync + 'static,
    ) -> Self {
        FnSource {
            name: name.into(),
            first: first.max(1),
            term: Box::new(move |n| Some(term(n))),
            ratio: None,
            known_index: None,
        }
    }

    /// A positive sequence given by `log a_n`.
    pub fn from_log(
        name: impl Into<String>,
        first: u64,
        log_term: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnSource {
            name: name.into(),
            first: first.max(1),
            term: Box::new(move |n| {
                let l = log_term(n);
                if l == f64::NEG_INFINITY {
                    Some(SignedLogValue::ZERO)
                } else {
                    SignedLogValue::new(Sign::Positive, l)
                }
            }),
            ratio: None,
            known_index: None,
        }
    }

    pub fn with_ratio(mut self, ratio: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        self.ratio = Some(Box::new(ratio));
        self
    }

    pub fn with_known_index(mut self, alpha: f64) -> Self {
        self.known_index = Some(alpha);
        self
    }
}

impl TermSource for FnSource {
    fn name(&self) -> &str {
        &self.name
    }

    fn first_index(&self) -> u64 {
        self.first
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        if n < self.first {
            return Err(TermError::BeforeStart {
                index: n,
                first: self.first,
            });
        }
        (self.term)(n).ok_or(TermError::NonFinite { index: n })
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        self.ratio.as_ref().map(|r| r(n))
    }

    fn known_index(&self) -> Option<f64> {
        self.known_index
    }
}

/// A sequence defined by `a_first` and the exact ratio `a_{n+1}/a_n − 1`.
///
/// `a_n` is rebuilt from a compensated cumulative sum of `log|1 + r_k|`, so a
/// single term costs `O(n)`; [`TermSource::scan`] and
/// [`TermSource::log_span`] stream instead of restarting.
pub struct RatioSource {
    name: String,
    first: u64,
    initial: SignedLogValue,
    ratio: RatioFn,
    known_index: Option<f64>,
}

impl RatioSource {
    pub fn new(
        name: impl Into<String>,
        first: u64,
        initial: SignedLogValue,
        ratio: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RatioSource {
            name: name.into(),
            first: first.max(1),
            initial,
            ratio: Box::new(ratio),
            known_index: None,
        }
    }

    pub fn with_known_index(mut self, alpha: f64) -> Self {
        self.known_index = Some(alpha);
        self
    }

    fn step(&self, k: u64) -> Result<(f64, Sign), TermError> {
        let r = (self.ratio)(k);
        if !r.is_finite() {
            return Err(TermError::NonFinite { index: k + 1 });
        }
        if r == -1.0 {
            return Err(TermError::Zero { index: k + 1 });
        }
        let sign = if r > -1.0 { Sign::Positive } else { Sign::Negative };
        Ok((log_abs_one_plus(r), sign))
    }
}

impl TermSource for RatioSource {
    fn name(&self) -> &str {
        &self.name
    }

    fn first_index(&self) -> u64 {
        self.first
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        let mut out = SignedLogValue::ZERO;
        self.scan(n, n, &mut |_, v| out = v)?;
        Ok(out)
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        Some((self.ratio)(n))
    }

    fn known_index(&self) -> Option<f64> {
        self.known_index
    }

    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        if from < self.first {
            return Err(TermError::BeforeStart {
                index: from,
                first: self.first,
            });
        }
        let (lo, hi, sgn) = if from <= to { (from, to, 1.0) } else { (to, from, -1.0) };
        let mut acc = CompensatedSum::new();
        for k in lo..hi {
            acc.add(self.step(k)?.0);
        }
        Ok(sgn * acc.value())
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        if from < self.first {
            return Err(TermError::BeforeStart {
                index: from,
                first: self.first,
            });
        }
        if self.initial.is_zero() {
            return Err(TermError::Zero { index: self.first });
        }
        let mut acc = CompensatedSum::new();
        acc.add(self.initial.logmag());
        let mut sign = self.initial.sign();
        let mut n = self.first;
        loop {
            if n >= from {
                f(n, SignedLogValue::from_parts(sign, acc.value()));
            }
            if n >= to {
                return Ok(());
            }
            let (l, s) = self.step(n)?;
            acc.add(l);
            sign = sign * s;
            n += 1;
        }
    }
}

/// `|a_n|`.
pub struct Abs<S>(pub S);

impl<S: TermSource> TermSource for Abs<S> {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn first_index(&self) -> u64 {
        self.0.first_index()
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        self.0.term(n).map(SignedLogValue::abs)
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        self.0.magnitude_ratio(n)
    }

    fn known_index(&self) -> Option<f64> {
        self.0.known_index()
    }

    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        self.0.log_span(from, to)
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        self.0.scan(from, to, &mut |n, v| f(n, v.abs()))
    }
}

/// `p_n = s·(−1)^n a_n` for a sign `s`.
pub struct Alternating<S> {
    inner: S,
    name: String,
    /// `true` gives `(−1)^n`, `false` gives `(−1)^{n−1}`.
    even_positive: bool,
}

impl<S: TermSource> Alternating<S> {
    pub fn new(inner: S, name: impl Into<String>, even_positive: bool) -> Self {
        Alternating {
            inner,
            name: name.into(),
            even_positive,
        }
    }

    fn flip(&self, n: u64, v: SignedLogValue) -> SignedLogValue {
        if (n % 2 == 0) == self.even_positive {
            v
        } else {
            -v
        }
    }
}

impl<S: TermSource> TermSource for Alternating<S> {
    fn name(&self) -> &str {
        &self.name
    }

    fn first_index(&self) -> u64 {
        self.inner.first_index()
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        self.inner.term(n).map(|v| self.flip(n, v))
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        self.inner.ratio(n).map(|r| -2.0 - r)
    }

    fn magnitude_ratio(&self, n: u64) -> Option<f64> {
        self.inner.magnitude_ratio(n)
    }

    fn known_index(&self) -> Option<f64> {
        self.inner.known_index()
    }

    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        self.inner.log_span(from, to)
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        self.inner.scan(from, to, &mut |n, v| f(n, self.flip(n, v)))
    }
}

/// What a sequence specification names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    /// A catalog entry such as `harmonic` or `gamma_ratio(-0.5)`.
    Catalog(String),
    /// A formula for `a_n`.
    Expr(String),
    /// A formula for `a_{n+1}/a_n − 1`, with `a_1 = 1`.
    RatioExpr(String),
}

/// Indices probed by [`make_term_source`]: the first 17 terms and every power
/// of two up to `2^20`.
fn probe_indices(first: u64) -> impl Iterator<Item = u64> {
    (first..first + 17).chain((4..=20).map(|j| 1u64 << j).filter(move |&n| n > first + 16))
}

/// Checks that the source yields finite nonzero terms at the probe indices.
/// Sources with an exact ratio are probed through the ratio past the first
/// few terms, which keeps probing `O(1)` per index.
pub fn probe(src: &dyn TermSource) -> Result<(), TermError> {
    let first = src.first_index();
    for n in probe_indices(first) {
        if n < first + 17 {
            nonzero(src.term(n)?, n)?;
            continue;
        }
        match src.ratio(n - 1) {
            Some(r) if !r.is_finite() => return Err(TermError::NonFinite { index: n }),
            Some(r) if r == -1.0 => return Err(TermError::Zero { index: n }),
            Some(_) => {}
            None => {
                nonzero(src.term(n)?, n)?;
            }
        }
    }
    Ok(())
}

/// Builds a probed term source from a catalog name or formula text.
pub fn make_term_source(spec: &SourceSpec) -> Result<Box<dyn TermSource>, TermError> {
    let src: Box<dyn TermSource> = match spec {
        SourceSpec::Catalog(name) => {
            let catalog = Catalog::standard();
            let entry = catalog
                .lookup(name)
                .ok_or_else(|| TermError::UnknownName {
                    name: name.to_string(),
                })?;
            entry.source()
        }
        SourceSpec::Expr(text) => Box::new(expr::ExprSource::new(expr::parse(text)?, text)),
        SourceSpec::RatioExpr(text) => {
            Box::new(expr::ExprRatioSource::new(expr::parse(text)?, text))
        }
    };
    probe(&*src)?;
    Ok(src)
}
