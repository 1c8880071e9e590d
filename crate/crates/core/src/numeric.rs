//! Small dense linear algebra: LU solves and a pivoted rank test.
//!
//! Systems here are desk scale (|H| squared at most), so a straightforward
//! partially-pivoted elimination beats pulling in a matrix crate.

use crate::error::SgiaError;

/// Solve `A x = b` in place by Gaussian elimination with partial pivoting.
///
/// `a` is row-major `n x n`. Returns the solution vector; `a` and `b` are
/// consumed as scratch. Fails if a pivot column is numerically zero.
pub fn solve_dense(
    mut a: Vec<f64>,
    mut b: Vec<f64>,
    context: &str,
) -> Result<Vec<f64>, SgiaError> {
    let n = b.len();
    if a.len() != n * n {
        return Err(SgiaError::DimensionMismatch {
            what: format!("linear system {context}"),
            expected: n * n,
            got: a.len(),
        });
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = row;
            }
        }
        if pivot_abs <= f64::EPSILON * n as f64 {
            return Err(SgiaError::SingularSystem {
                context: context.to_string(),
            });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Numerical rank of a row-major `rows x cols` matrix by row reduction.
///
/// A pivot counts only if its magnitude exceeds `pivot_tol`; this is the rank
/// notion quoted by the gradient-independence certificate.
pub fn rank_row_reduce(mut m: Vec<f64>, rows: usize, cols: usize, pivot_tol: f64) -> usize {
    debug_assert_eq!(m.len(), rows * cols);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut pivot_row = row;
        let mut pivot_abs = m[row * cols + col].abs();
        for r in row + 1..rows {
            let v = m[r * cols + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = r;
            }
        }
        if pivot_abs <= pivot_tol {
            continue;
        }
        if pivot_row != row {
            for k in 0..cols {
                m.swap(row * cols + k, pivot_row * cols + k);
            }
        }
        let pivot = m[row * cols + col];
        for r in 0..rows {
            if r == row {
                continue;
            }
            let factor = m[r * cols + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..cols {
                m[r * cols + k] -= factor * m[row * cols + k];
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

/// Euclidean projection of `v` onto the probability simplex.
///
/// Algorithm: sort, find the largest support whose shifted values stay
/// positive, clip. Used by the solvers after every gradient step.
pub fn project_to_simplex(v: &mut [f64]) {
    let n = v.len();
    if n == 0 {
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    let mut found = false;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
            found = true;
        } else {
            break;
        }
    }
    if !found {
        // All mass below threshold (can only happen with NaN inputs); fall
        // back to uniform to keep the iterate usable.
        let u = 1.0 / n as f64;
        for x in v.iter_mut() {
            *x = u;
        }
        return;
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}
