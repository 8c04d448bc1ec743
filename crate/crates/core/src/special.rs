//! Log-domain special functions.

use core::f64::consts::LN_2;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `ln n!`.
pub fn log_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln n!!` via the gamma identities
/// `(2m)!! = 2^m m!` and `(2m−1)!! = (2m)! / (2^m m!)`.
///
/// `0!! = 1!! = 1`.
pub fn log_double_factorial(n: u64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let m = n.div_ceil(2) as f64;
    if n % 2 == 0 {
        m * LN_2 + ln_gamma(m + 1.0)
    } else {
        ln_gamma(2.0 * m + 1.0) - m * LN_2 - ln_gamma(m + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u64) -> f64 {
        let mut s = 0.0;
        let mut k = n;
        while k >= 2 {
            s += (k as f64).ln();
            k -= 2;
        }
        s
    }

    #[test]
    fn small_values() {
        assert!((log_double_factorial(5) - 15f64.ln()).abs() < 1e-12);
        assert!((log_double_factorial(6) - 48f64.ln()).abs() < 1e-12);
        assert_eq!(log_double_factorial(0), 0.0);
        assert_eq!(log_double_factorial(1), 0.0);
        assert!((log_double_factorial(2) - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn matches_brute_log_sum() {
        for n in [7u64, 50, 100, 101, 999, 1000, 4097] {
            let d = log_double_factorial(n) - brute(n);
            assert!(d.abs() < 1e-9 * brute(n).max(1.0), "n={n} diff={d}");
        }
    }

    #[test]
    fn even_identity() {
        for n in 1..200u64 {
            let lhs = log_double_factorial(2 * n);
            let rhs = n as f64 * LN_2 + log_factorial(n);
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn ln_gamma_against_statrs() {
        for &x in &[0.5, 1.0, 1.5, 3.25, 10.0, 170.5, 1e4] {
            let ours = ln_gamma(x);
            let theirs = statrs::function::gamma::ln_gamma(x);
            assert!((ours - theirs).abs() < 1e-10 * theirs.abs().max(1.0));
        }
    }
}
