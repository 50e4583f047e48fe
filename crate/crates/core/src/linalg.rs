//! Dense symmetric eigenvalue solver.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts. Only eigenvalues are formed, which
//! is all the entropy functional needs: `(4/3)n³` flops for the reduction and
//! `O(n²)` for the iteration.

use ndarray::Array2;

use crate::error::{Error, NumericalDiagnostics, Result};
use crate::scalar::Scalar;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues of a real symmetric matrix, in no particular order.
///
/// Only the lower triangle is read.
pub fn symmetric_eigenvalues<T: Scalar>(matrix: &Array2<T>) -> Result<Vec<T>> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch(rows, cols));
    }
    let n = rows;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![matrix[[0, 0]]]),
        _ => {}
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(NumericalDiagnostics {
            reason: "matrix has non-finite entries".into(),
            size: n,
            min_eigenvalue: f64::NAN,
            max_eigenvalue: f64::NAN,
            trace: f64::NAN,
        }));
    }

    let mut a: Vec<T> = matrix.iter().copied().collect();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    tridiagonalize(&mut a, n, &mut diag, &mut off);
    tridiagonal_ql(&mut diag, &mut off).map_err(|sweeps| {
        let trace = (0..n).map(|i| matrix[[i, i]]).sum::<T>();
        Error::Numerical(NumericalDiagnostics {
            reason: format!("QL iteration did not converge after {sweeps} sweeps"),
            size: n,
            min_eigenvalue: diag.iter().fold(f64::INFINITY, |m, v| m.min(v.as_f64())),
            max_eigenvalue: diag
                .iter()
                .fold(f64::NEG_INFINITY, |m, v| m.max(v.as_f64())),
            trace: trace.as_f64(),
        })
    })?;
    Ok(diag)
}

/// Householder reduction of the row-major `n×n` matrix `a` (lower triangle).
///
/// On return `diag` holds the tridiagonal diagonal and `off[i]` the
/// sub-diagonal element coupling rows `i-1` and `i` (`off[0] == 0`).
fn tridiagonalize<T: Scalar>(a: &mut [T], n: usize, diag: &mut [T], off: &mut [T]) {
    let two = T::lit(2.0);
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).map(|k| a[i * n + k].abs()).sum::<T>();
            if scale == T::zero() {
                off[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] = a[i * n + k] / scale;
                    h = h + a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                off[i] = scale * g;
                h = h - f * g;
                a[i * n + l] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g = g + a[k * n + j] * a[i * n + k];
                    }
                    off[j] = g / h;
                    f = f + off[j] * a[i * n + j];
                }
                let hh = f / (h * two);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = off[j] - hh * f;
                    off[j] = g;
                    for k in 0..=j {
                        a[j * n + k] = a[j * n + k] - (f * off[k] + g * a[i * n + k]);
                    }
                }
            }
        } else {
            off[i] = a[i * n + l];
        }
        diag[i] = h;
    }
    off[0] = T::zero();
    for i in 0..n {
        diag[i] = a[i * n + i];
    }
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues land in `diag`.
///
/// Returns the number of sweeps spent if some eigenvalue fails to converge.
fn tridiagonal_ql<T: Scalar>(diag: &mut [T], off: &mut [T]) -> std::result::Result<(), usize> {
    let n = diag.len();
    let two = T::lit(2.0);
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = T::zero();
    // Absolute deflation floor: off-diagonals below eps·‖T‖ are negligible
    // even between (near-)zero diagonal entries.
    let norm = (0..n)
        .map(|i| diag[i].abs() + off[i].abs())
        .fold(T::zero(), T::max);
    let floor = T::epsilon() * norm;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd || off[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(iter);
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + r.abs().copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] = diag[i + 1] - p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] = diag[l] - p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}
