//! Sturm-sequence bisection for the lowest eigenvalues of a real symmetric
//! tridiagonal matrix.

use crate::error::{GhoError, Result};

/// Number of eigenvalues strictly below `lambda` (negative LDLᵀ pivots).
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - lambda - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            // perturb an exact zero pivot; the count is unaffected to rounding
            q = -f64::EPSILON * (diag[i].abs() + lambda.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin_bounds(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r =
            if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection, bracketed to a
/// few ulps of the eigenvalue itself.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> Result<f64> {
    let (mut lo, mut hi) = gershgorin_bounds(diag, off);
    for _ in 0..4000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(mid);
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(GhoError::ConvergenceFailure(format!(
        "bisection for eigenvalue {k} stalled on [{lo}, {hi}]"
    )))
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n {
        return Err(GhoError::ConvergenceFailure(format!(
            "off-diagonal of length {} for size {n}",
            off.len()
        )));
    }
    if k > n {
        return Err(GhoError::TooManyEigenvalues {
            requested: k,
            size: n,
        });
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(GhoError::ConvergenceFailure(
            "non-finite matrix entry".into(),
        ));
    }
    (0..k).map(|j| kth_eigenvalue(diag, off, j)).collect()
}
