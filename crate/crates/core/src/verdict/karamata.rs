//! Karamata-type estimates of partial and tail sums.

use super::{AsymptoticEstimate, SumTarget};
use crate::diagnostics::LimitEstimate;
use crate::oracle::{sum_range, OracleError};
use crate::source::TermSource;

/// Estimate of `Σ_{k≤n} c_k` or `Σ_{k≥n} c_k` from `n·c_n` and `α̂`.
///
/// `α̂ > −1` gives `S_n ≈ n c_n/(α̂+1)`, `α̂ < −1` gives
/// `T_n ≈ n c_n/(−1−α̂)`. Inside the `−1` band there is no sum estimate;
/// `ratio_diagnostic` carries `n c_n / S_n`, which tends to 0.
pub fn karamata_estimate(
    src: &dyn TermSource,
    alpha_hat: &LimitEstimate,
    n: u64,
    tol: f64,
) -> Result<AsymptoticEstimate, OracleError> {
    if !alpha_hat.decisive {
        return Err(OracleError::Indecisive);
    }
    let a = alpha_hat.value;
    let log_nc = libm::log(n as f64) + src.term(n)?.logmag();
    if alpha_hat.within(-1.0, tol, 3.0) {
        let s = sum_range(src, src.first_index(), n)?;
        let mut e = AsymptoticEstimate::order(SumTarget::PartialSum, 0.0, 0.0);
        e.at = Some(n);
        e.ratio_diagnostic = Some(libm::exp(log_nc) / libm::fabs(s));
        return Ok(e);
    }
    let (target, denom) = if a > -1.0 {
        (SumTarget::PartialSum, a + 1.0)
    } else {
        (SumTarget::TailSum, -1.0 - a)
    };
    let value = libm::exp(log_nc) / denom;
    let mut e = AsymptoticEstimate::order(target, a + 1.0, 0.0);
    e.constant = Some(libm::exp(log_nc - (a + 1.0) * libm::log(n as f64)) / denom);
    e.at = Some(n);
    e.value = Some(value);
    Ok(e)
}
