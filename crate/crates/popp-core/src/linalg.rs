//! Small dense linear-algebra helpers: rank with a relative singular-value
//! threshold, verified solves, and minimum-norm least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerical rank: number of singular values above `rel_tol` times the
/// largest one.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Condition number of a square matrix in the spectral norm.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve the square system `m x = v` with column-pivoted QR and verify the
/// residual against `residual_tol * max(1, |v|)`.
pub fn solve_checked(
    m: &DMatrix<f64>,
    v: &DVector<f64>,
    residual_tol: f64,
) -> Result<DVector<f64>> {
    let qr = m.clone().col_piv_qr();
    let x = qr.solve(v).ok_or_else(|| {
        Error::ResidualCheckFailed("column-pivoted QR solve failed (singular matrix)".into())
    })?;
    let residual = (m * &x - v).norm();
    let scale = v.norm().max(1.0);
    if residual > residual_tol * scale {
        return Err(Error::ResidualCheckFailed(format!(
            "residual {residual:.3e} exceeds {:.3e}",
            residual_tol * scale
        )));
    }
    Ok(x)
}

/// Minimum-norm solution of the (generally underdetermined) system
/// `a x = b`, via the SVD pseudoinverse. Returns the solution and the
/// residual norm so callers can decide whether the system was consistent.
pub fn min_norm_solve(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    rel_tol: f64,
) -> Result<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let eps = rel_tol * svd.singular_values.max().max(f64::MIN_POSITIVE);
    let x = svd
        .solve(b, eps)
        .map_err(|e| Error::ResidualCheckFailed(format!("SVD solve failed: {e}")))?
        .column(0)
        .into_owned();
    let residual = (a * &x - b).norm();
    Ok((x, residual))
}

/// Deterministic pairwise summation, independent of thread scheduling as
/// long as the input order is fixed.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
