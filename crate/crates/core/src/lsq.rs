//! Small dense least-squares fits (Householder QR).

use alloc::vec;
use alloc::vec::Vec;

/// Result of a least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Fit {
    pub coef: Vec<f64>,
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
}

/// Minimizes `‖A c − y‖₂` where row `i` of `A` is `basis(x_i)`.
///
/// Columns are scaled to unit norm before factoring so that bases such as
/// `{1, 1/n, 1/n²}` on `n ~ 10^6` stay well conditioned. Returns `None` when
/// there are fewer rows than columns or the matrix is rank deficient.
pub(crate) fn fit(rows: &[Vec<f64>], y: &[f64]) -> Option<Fit> {
    let m = rows.len();
    if m == 0 || m != y.len() {
        return None;
    }
    let k = rows[0].len();
    if k == 0 || m < k || rows.iter().any(|r| r.len() != k) {
        return None;
    }
    // Column-major copy.
    let mut a: Vec<Vec<f64>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut scale = vec![1.0; k];
    for (j, col) in a.iter_mut().enumerate() {
        let norm = libm::sqrt(col.iter().map(|v| v * v).sum::<f64>());
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        scale[j] = norm;
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    let mut b = y.to_vec();
    for j in 0..k {
        let norm = libm::sqrt(a[j][j..].iter().map(|v| v * v).sum::<f64>());
        if norm < 1e-13 {
            return None;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j) {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (p, q) in v.iter().zip(col[j..].iter_mut()) {
                *q -= f * p;
            }
        }
        let dot: f64 = v.iter().zip(&b[j..]).map(|(p, q)| p * q).sum();
        let f = 2.0 * dot / vnorm2;
        for (p, q) in v.iter().zip(b[j..].iter_mut()) {
            *q -= f * p;
        }
    }
    let mut c = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= a[j][i] * c[j];
        }
        c[i] = s / a[i][i];
    }
    let residual_norm = libm::sqrt(b[k..].iter().map(|v| v * v).sum::<f64>());
    for (ci, s) in c.iter_mut().zip(&scale) {
        *ci /= s;
    }
    if c.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(Fit {
        coef: c,
        residual_norm,
    })
}

/// Ordinary least-squares line `y = a + b x`; returns `(a, b)`.
pub(crate) fn line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    fit(&rows, y).map(|f| (f.coef[0], f.coef[1]))
}
