//! Kernel Gram matrices and kernel-size heuristics.

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::error::{invalid_input, invalid_param, Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::scalar::Scalar;

/// Positive definite kernel used to build Gram matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec<T> {
    /// `exp(-‖x-y‖² / 2σ²)`
    Rbf { sigma: T },
}

impl<T: Scalar> KernelSpec<T> {
    pub fn rbf(sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(invalid_param(format!(
                "kernel sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(KernelSpec::Rbf { sigma })
    }

    pub fn sigma(&self) -> T {
        match *self {
            KernelSpec::Rbf { sigma } => sigma,
        }
    }

    /// Kernel value from a squared Euclidean distance.
    #[inline]
    fn eval_sq_distance(&self, d2: T) -> T {
        match *self {
            KernelSpec::Rbf { sigma } => (-d2 / (T::lit(2.0) * sigma * sigma)).exp(),
        }
    }
}

/// RBF kernel between two vectors.
pub fn rbf_kernel<T: Scalar>(x: &[T], y: &[T], spec: &KernelSpec<T>) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    if !(spec.sigma() > T::zero()) {
        return Err(invalid_param(format!(
            "kernel sigma must be positive, got {}",
            spec.sigma()
        )));
    }
    Ok(spec.eval_sq_distance(sq_distance(x, y)))
}

#[inline]
fn sq_distance<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(T::zero(), |acc, v| acc + v)
}

/// Trace-one positive semidefinite Gram matrix with constant diagonal `1/n`.
///
/// Every entropy in this crate is a functional of one of these. Instances are
/// immutable; the constructors establish the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGram<T> {
    matrix: Array2<T>,
}

/// Measured deviations from the [`NormalizedGram`] invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramReport {
    pub max_asymmetry: f64,
    pub max_diagonal_error: f64,
    pub trace_error: f64,
    pub min_entry: f64,
    pub max_entry: f64,
    pub min_eigenvalue: f64,
}

impl<T: Scalar> NormalizedGram<T> {
    /// Normalizes an arbitrary kernel matrix: `A_ij = K_ij / (n √(K_ii K_jj))`.
    pub fn from_kernel_matrix(kernel: &Array2<T>) -> Result<Self> {
        let (n, cols) = kernel.dim();
        if n != cols {
            return Err(Error::DimensionMismatch(n, cols));
        }
        if n < 2 {
            return Err(invalid_input(format!(
                "a Gram matrix needs at least 2 samples, got {n}"
            )));
        }
        let diag: Vec<T> = (0..n).map(|i| kernel[[i, i]]).collect();
        if let Some(i) = diag
            .iter()
            .position(|&v| !(v > T::zero()) || !v.is_finite())
        {
            return Err(invalid_input(format!(
                "kernel diagonal must be positive and finite, entry {i} is {}",
                diag[i]
            )));
        }
        let inv_n = T::one() / T::count(n);
        let mut matrix = Array2::zeros((n, n));
        for i in 0..n {
            matrix[[i, i]] = inv_n;
            for j in 0..i {
                let avg = (kernel[[i, j]] + kernel[[j, i]]) / T::lit(2.0);
                let v = inv_n * avg / (diag[i] * diag[j]).sqrt();
                matrix[[i, j]] = v;
                matrix[[j, i]] = v;
            }
        }
        Ok(Self { matrix })
    }

    /// Accepts a matrix that is already normalized, checking symmetry, the
    /// `1/n` diagonal and unit trace.
    pub fn from_normalized(matrix: Array2<T>) -> Result<Self> {
        let (n, cols) = matrix.dim();
        if n != cols {
            return Err(Error::DimensionMismatch(n, cols));
        }
        if n < 1 {
            return Err(invalid_input("empty matrix"));
        }
        let tol = T::lit(1e-9).max(T::epsilon() * T::count(8 * n));
        let inv_n = T::one() / T::count(n);
        for i in 0..n {
            if (matrix[[i, i]] - inv_n).abs() > tol {
                return Err(invalid_input(format!(
                    "diagonal entry {i} is {}, expected 1/n = {inv_n}",
                    matrix[[i, i]]
                )));
            }
            for j in 0..i {
                if !matrix[[i, j]].is_finite() || (matrix[[i, j]] - matrix[[j, i]]).abs() > tol {
                    return Err(invalid_input(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// Trusted constructor for internally produced matrices.
    pub(crate) fn from_parts(matrix: Array2<T>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    /// `I_n / n`, the maximal-entropy matrix.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Array2::eye(n) / T::count(n),
        }
    }

    /// The all-`1/n` matrix, rank one and zero entropy.
    pub fn constant(n: usize) -> Self {
        Self {
            matrix: Array2::from_elem((n, n), T::one() / T::count(n)),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<T> {
        self.matrix
    }

    /// Permutes samples: `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(perm.len(), n));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(invalid_input("not a permutation"));
            }
        }
        let matrix = Array2::from_shape_fn((n, n), |(i, j)| self.matrix[[perm[i], perm[j]]]);
        Ok(Self { matrix })
    }

    /// Measures every invariant, including the smallest eigenvalue.
    pub fn report(&self) -> Result<GramReport> {
        let n = self.n();
        let inv_n = 1.0 / n as f64;
        let mut rep = GramReport {
            max_asymmetry: 0.0,
            max_diagonal_error: 0.0,
            trace_error: 0.0,
            min_entry: f64::INFINITY,
            max_entry: f64::NEG_INFINITY,
            min_eigenvalue: 0.0,
        };
        let mut trace = 0.0;
        for i in 0..n {
            let d = self.matrix[[i, i]].as_f64();
            trace += d;
            rep.max_diagonal_error = rep.max_diagonal_error.max((d - inv_n).abs());
            for j in 0..n {
                let v = self.matrix[[i, j]].as_f64();
                rep.min_entry = rep.min_entry.min(v);
                rep.max_entry = rep.max_entry.max(v);
                rep.max_asymmetry = rep
                    .max_asymmetry
                    .max((v - self.matrix[[j, i]].as_f64()).abs());
            }
        }
        rep.trace_error = (trace - 1.0).abs();
        rep.min_eigenvalue = symmetric_eigenvalues(&self.matrix)?
            .into_iter()
            .fold(f64::INFINITY, |m, v| m.min(v.as_f64()));
        Ok(rep)
    }
}

/// Normalized Gram matrix over `n` samples given as the rows of `samples`.
///
/// For the RBF kernel `K_ii = 1`, so `A_ij = κ(x_i, x_j) / n`. Entries that
/// underflow stay exactly zero.
pub fn gram_matrix<T: Scalar>(
    samples: ArrayView2<T>,
    spec: &KernelSpec<T>,
) -> Result<NormalizedGram<T>> {
    let n = samples.nrows();
    if n < 2 {
        return Err(invalid_input(format!(
            "a Gram matrix needs at least 2 samples, got {n}"
        )));
    }
    if !(spec.sigma() > T::zero()) {
        return Err(invalid_param(format!(
            "kernel sigma must be positive, got {}",
            spec.sigma()
        )));
    }
    let inv_n = T::one() / T::count(n);
    let rows: Vec<Vec<T>> = samples.outer_iter().map(|r| r.to_vec()).collect();
    let mut matrix = Array2::zeros((n, n));
    for i in 0..n {
        matrix[[i, i]] = inv_n;
        for j in 0..i {
            let v = spec.eval_sq_distance(sq_distance(&rows[i], &rows[j])) * inv_n;
            matrix[[i, j]] = v;
            matrix[[j, i]] = v;
        }
    }
    Ok(NormalizedGram::from_parts(matrix))
}

/// Gram matrix of a single scalar feature column.
pub fn gram_from_column<T: Scalar>(
    column: &[T],
    spec: &KernelSpec<T>,
) -> Result<NormalizedGram<T>> {
    let view = ArrayView2::from_shape((column.len(), 1), column)
        .map_err(|e| invalid_input(e.to_string()))?;
    gram_matrix(view, spec)
}

/// Kernel-size selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum SigmaRule<T> {
    Fixed(T),
    /// `1.06 · s · n^(-1/5)` with `s` the mean per-dimension sample std.
    Silverman,
    /// Fraction of (max − min nonzero) pairwise Euclidean distance.
    RangeFraction(T),
    /// Fraction of the median pairwise Euclidean distance.
    MedianFraction(T),
}

/// A kernel size plus whether the degenerate-data fallback was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate<T> {
    pub sigma: T,
    pub fallback: bool,
}

/// Kernel size returned when the data carry no scale information.
pub const FALLBACK_SIGMA: f64 = 1.0;

pub fn sigma_heuristic<T: Scalar>(
    data: ArrayView2<T>,
    rule: SigmaRule<T>,
) -> Result<SigmaEstimate<T>> {
    let n = data.nrows();
    if n < 2 {
        return Err(invalid_input(format!(
            "sigma heuristic needs at least 2 samples, got {n}"
        )));
    }
    let fallback = || {
        log::warn!("degenerate data for kernel-size heuristic, using sigma = {FALLBACK_SIGMA}");
        SigmaEstimate {
            sigma: T::lit(FALLBACK_SIGMA),
            fallback: true,
        }
    };
    let fraction_ok = |f: T| f > T::zero() && f < T::one();
    match rule {
        SigmaRule::Fixed(v) => {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid_param(format!(
                    "fixed sigma must be positive, got {v}"
                )));
            }
            Ok(SigmaEstimate {
                sigma: v,
                fallback: false,
            })
        }
        SigmaRule::Silverman => {
            let dims = data.ncols();
            if dims == 0 {
                return Err(invalid_input("data has no columns"));
            }
            let nf = T::count(n);
            let mean_std = data
                .columns()
                .into_iter()
                .map(|c| {
                    let mean = c.iter().copied().sum::<T>() / nf;
                    let var =
                        c.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (nf - T::one());
                    var.sqrt()
                })
                .sum::<T>()
                / T::count(dims);
            if !(mean_std > T::zero()) {
                return Ok(fallback());
            }
            Ok(SigmaEstimate {
                sigma: T::lit(1.06) * mean_std * nf.powf(T::lit(-0.2)),
                fallback: false,
            })
        }
        SigmaRule::RangeFraction(f) => {
            if !fraction_ok(f) {
                return Err(invalid_param(format!(
                    "range fraction must lie in (0, 1), got {f}"
                )));
            }
            let dists = pairwise_distances(data);
            let max = dists.iter().copied().fold(T::zero(), T::max);
            let min_nonzero = dists
                .iter()
                .copied()
                .filter(|&d| d > T::zero())
                .fold(T::infinity(), T::min);
            if !(max > T::zero()) {
                return Ok(fallback());
            }
            let range = max - min_nonzero;
            let span = if range > T::zero() { range } else { max };
            Ok(SigmaEstimate {
                sigma: f * span,
                fallback: false,
            })
        }
        SigmaRule::MedianFraction(f) => {
            if !fraction_ok(f) {
                return Err(invalid_param(format!(
                    "median fraction must lie in (0, 1), got {f}"
                )));
            }
            let mut dists = pairwise_distances(data);
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            let m = dists.len();
            let median = if m % 2 == 1 {
                dists[m / 2]
            } else {
                (dists[m / 2 - 1] + dists[m / 2]) / T::lit(2.0)
            };
            if !(median > T::zero()) {
                return Ok(fallback());
            }
            Ok(SigmaEstimate {
                sigma: f * median,
                fallback: false,
            })
        }
    }
}

fn pairwise_distances<T: Scalar>(data: ArrayView2<T>) -> Vec<T> {
    let rows: Vec<Vec<T>> = data.outer_iter().map(|r| r.to_vec()).collect();
    let n = rows.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in 0..i {
            out.push(sq_distance(&rows[i], &rows[j]).sqrt());
        }
    }
    out
}
