//! Brute-force partial sums, tails and an empirical convergence heuristic.
//!
//! Nothing here is used by the ladder; it exists to check it.

use alloc::vec::Vec;

use crate::source::{TermError, TermSource};
use crate::value::CompensatedSum;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("a_{index} does not fit in a double; lower n_max")]
    Overflow { index: u64 },
    #[error("n_max = {n_max} is below the first index {first}")]
    Range { n_max: u64, first: u64 },
    #[error("alpha_hat is not decisive")]
    Indecisive,
    #[error("the tail does not decay like a summable power (local exponent {exponent:.4})")]
    NotSummable { exponent: f64 },
}

/// Compensated partial sums at geometric checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SumTrace {
    /// Powers of two from the first index on, plus `n_max`.
    pub checkpoints: Vec<u64>,
    pub partial_sums: Vec<f64>,
    /// `S(n_{j+1}) − S(n_j)`
    pub increments: Vec<f64>,
}

fn checkpoints(first: u64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 1u64;
    while n <= n_max {
        if n >= first {
            out.push(n);
        }
        match n.checked_mul(2) {
            Some(m) => n = m,
            None => break,
        }
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// `Σ_{k=first}^{n} a_k` recorded at each checkpoint `n ≤ n_max`.
pub fn partial_sum(src: &dyn TermSource, n_max: u64) -> Result<SumTrace, OracleError> {
    let first = src.first_index();
    if n_max < first {
        return Err(OracleError::Range { n_max, first });
    }
    let cps = checkpoints(first, n_max);
    let mut acc = CompensatedSum::new();
    let mut sums = Vec::with_capacity(cps.len());
    let mut next = 0;
    let mut overflow = None;
    src.scan(first, n_max, &mut |n, v| {
        if overflow.is_some() {
            return;
        }
        let r = v.to_real();
        if !r.is_finite() {
            overflow = Some(n);
            return;
        }
        acc.add(r);
        if n == cps[next] {
            sums.push(acc.value());
            next += 1;
        }
    })?;
    if let Some(index) = overflow {
        return Err(OracleError::Overflow { index });
    }
    let increments = sums.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(SumTrace {
        checkpoints: cps,
        partial_sums: sums,
        increments,
    })
}

/// `Σ_{k=from}^{to} a_k`, compensated.
pub fn sum_range(src: &dyn TermSource, from: u64, to: u64) -> Result<f64, OracleError> {
    let mut acc = CompensatedSum::new();
    let mut overflow = None;
    src.scan(from, to, &mut |n, v| {
        let r = v.to_real();
        if !r.is_finite() && overflow.is_none() {
            overflow = Some(n);
        }
        acc.add(r);
    })?;
    match overflow {
        Some(index) => Err(OracleError::Overflow { index }),
        None => Ok(acc.value()),
    }
}

/// `Σ_{k≥from} a_k` for positive, eventually power-like terms: the explicit
/// sum up to `horizon` plus `∫_{horizon+1/2}^∞` of the power law through
/// `a_{horizon/2}` and `a_horizon`.
pub fn tail_sum(src: &dyn TermSource, from: u64, horizon: u64) -> Result<f64, OracleError> {
    let head = sum_range(src, from, horizon)?;
    let m = horizon.max(2);
    let l = src.term(m)?.logmag();
    let e = (l - src.term(m / 2)?.logmag()) / libm::log(m as f64 / (m / 2) as f64);
    if !(e < -1.0) {
        return Err(OracleError::NotSummable { exponent: e });
    }
    let x = m as f64;
    // ∫_{m+1/2}^∞ a_m (t/m)^e dt
    let rest = libm::exp(l) * x / (-1.0 - e) * libm::pow((x + 0.5) / x, e + 1.0);
    Ok(head + rest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalVerdict {
    LikelyConverges,
    LikelyDiverges,
    Undecided,
}

/// Largest increment ratio that still counts as geometric decay.
const DECAY: f64 = 0.95;
/// How much the increment ratios may creep toward 1 across the window.
const DRIFT: f64 = 0.005;
/// Increments in the window.
const WINDOW: usize = 6;

/// Reads the octave increments of a [`SumTrace`].
///
/// Over the last six increments: geometric decay (every ratio `≤ 0.95`, and
/// the ratios not creeping upward) reads as convergence; the last three
/// increments all at least 90% of the first one reads as divergence.
pub fn empirical_verdict(trace: &SumTrace) -> EmpiricalVerdict {
    if trace.checkpoints.len() < 6 || trace.increments.len() < 3 {
        return EmpiricalVerdict::Undecided;
    }
    let inc: Vec<f64> = trace.increments.iter().map(|d| libm::fabs(*d)).collect();
    let w = &inc[inc.len().saturating_sub(WINDOW)..];
    let tail3 = &w[w.len() - 3..];
    if w[0] > 0.0 && tail3.iter().all(|d| *d >= 0.9 * w[0]) {
        return EmpiricalVerdict::LikelyDiverges;
    }
    if w.iter().all(|d| *d == 0.0) {
        return EmpiricalVerdict::LikelyConverges;
    }
    let ratios: Vec<f64> = w
        .windows(2)
        .map(|p| if p[0] > 0.0 { p[1] / p[0] } else { f64::INFINITY })
        .collect();
    let first = ratios[0];
    let last = ratios[ratios.len() - 1];
    if ratios.iter().all(|r| *r <= DECAY) && last - first <= DRIFT {
        return EmpiricalVerdict::LikelyConverges;
    }
    EmpiricalVerdict::Undecided
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::FnSource;
    use crate::value::SignedLogValue;

    fn power(p: f64) -> FnSource {
        FnSource::from_log("power", 1, move |n| p * libm::log(n as f64))
    }

    #[test]
    fn basel_partial_sum() {
        let t = partial_sum(&power(-2.0), 1_000_000).unwrap();
        let s = *t.partial_sums.last().unwrap();
        // ζ(2) − Σ_{k>10^6} 1/k² with the tail between 1/(N+1) and 1/N
        let exact = core::f64::consts::PI.powi(2) / 6.0 - 1.0 / 1_000_000.5;
        assert!((s - exact).abs() < 1e-8, "{s} vs {exact}");
        assert_eq!(t.checkpoints.last(), Some(&1_000_000));
        assert_eq!(t.increments.len(), t.checkpoints.len() - 1);
    }

    #[test]
    fn constant_terms_count() {
        let one = FnSource::new("one", 1, |_| SignedLogValue::ONE);
        let t = partial_sum(&one, 1000).unwrap();
        for (n, s) in t.checkpoints.iter().zip(&t.partial_sums) {
            assert_eq!(*s, *n as f64);
        }
    }

    #[test]
    fn alternating_harmonic() {
        let src = FnSource::new("alt", 1, |n| {
            let v = SignedLogValue::from_log(-libm::log(n as f64));
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        });
        let s = *partial_sum(&src, 1_000_000).unwrap().partial_sums.last().unwrap();
        assert!((s + core::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn reverse_order_agrees() {
        let src = power(-0.5);
        let forward = sum_range(&src, 1, 200_000).unwrap();
        let mut back = CompensatedSum::new();
        for n in (1..=200_000u64).rev() {
            back.add(libm::exp(-0.5 * libm::log(n as f64)));
        }
        assert!((forward - back.value()).abs() <= 1e-9 * forward);
    }

    #[test]
    fn tail_of_inverse_square() {
        let t = tail_sum(&power(-2.0), 100, 100_000).unwrap();
        // Σ_{k≥100} 1/k² = ψ'(100)
        let exact = 0.010050166663333571;
        assert!((t - exact).abs() < 1e-12, "{t}");
        assert!(tail_sum(&power(-0.5), 100, 1000).is_err());
    }

    #[test]
    fn empirical_calls() {
        let v = |src: &dyn TermSource| empirical_verdict(&partial_sum(src, 1 << 20).unwrap());
        assert_eq!(v(&power(-2.0)), EmpiricalVerdict::LikelyConverges);
        assert_eq!(v(&power(-1.0)), EmpiricalVerdict::LikelyDiverges);
        let nlogn = FnSource::from_log("nlogn", 2, |n| {
            let x = n as f64;
            -libm::log(x) - libm::log(libm::log(x))
        });
        assert_eq!(v(&nlogn), EmpiricalVerdict::Undecided);
    }

    #[test]
    fn overflow_reports_index() {
        let big = FnSource::from_log("big", 1, |n| n as f64);
        assert_eq!(
            partial_sum(&big, 1000).unwrap_err(),
            OracleError::Overflow { index: 710 }
        );
    }
}
