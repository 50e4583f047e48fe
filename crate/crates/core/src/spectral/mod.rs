//! Matrix-based Rényi α-order entropy functional.
//!
//! All quantities are computed from the eigenspectrum of a [`NormalizedGram`]
//! and reported in bits. Joint quantities use the trace-normalized Hadamard
//! product of the participating Gram matrices.

mod multivariate;

pub use multivariate::{
    co_information, interaction_information, multivariate_mi, total_correlation, SubsetEntropies,
    MAX_SUBSET_VARIABLES,
};

use ndarray::{Array2, Zip};
use serde::Serialize;

use crate::error::{invalid_input, invalid_param, Error, NumericalDiagnostics, Result};
use crate::kernel::NormalizedGram;
use crate::linalg::symmetric_eigenvalues;
use crate::scalar::Scalar;

/// Orders within this distance of 1 use the von Neumann (Shannon) limit.
pub const SHANNON_LIMIT_BAND: f64 = 1e-6;

/// Entropy order α > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct EntropyOrder<T>(T);

impl<T: Scalar> EntropyOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(invalid_param(format!(
                "entropy order must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> T {
        self.0
    }

    pub fn is_shannon_limit(self) -> bool {
        (self.0 - T::one()).abs() <= T::lit(SHANNON_LIMIT_BAND)
    }
}

/// Nonnegative eigenvalues summing to one, in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Scalar> Spectrum<T> {
    /// Builds a spectrum from explicit values (any order; stored descending).
    pub fn from_values(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid_input("empty spectrum"));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(invalid_input(
                "spectrum values must be finite and nonnegative",
            ));
        }
        let sum = values.iter().copied().sum::<T>();
        let tol = T::lit(1e-9).max(T::epsilon() * T::count(4 * values.len()));
        if (sum - T::one()).abs() > tol {
            return Err(invalid_input(format!("spectrum sums to {sum}, expected 1")));
        }
        sort_descending(&mut values);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn sort_descending<T: Scalar>(values: &mut [T]) {
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

/// Which information measure an [`InfoQuantity`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoKind {
    Entropy,
    JointEntropy,
    ConditionalEntropy,
    MutualInfo,
    MultivariateMi,
    InteractionInfo,
    CoInfo,
    TotalCorrelation,
}

/// A value in bits tagged with the measure it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoQuantity<T> {
    pub bits: T,
    pub kind: InfoKind,
}

impl<T> InfoQuantity<T> {
    pub fn new(bits: T, kind: InfoKind) -> Self {
        Self { bits, kind }
    }
}

/// Eigenvalues of a normalized Gram matrix.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero (`tol` is 1e-9 for `f64`);
/// anything more negative means the input was not positive semidefinite and
/// is reported as a numerical error. The result is renormalized to sum one.
pub fn spectrum<T: Scalar>(gram: &NormalizedGram<T>) -> Result<Spectrum<T>> {
    let mut values = symmetric_eigenvalues(gram.matrix())?;
    let tol = T::negative_eigen_tolerance();
    let min = values.iter().copied().fold(T::infinity(), T::min);
    if min < -tol {
        let max = values.iter().copied().fold(T::neg_infinity(), T::max);
        return Err(Error::Numerical(NumericalDiagnostics {
            reason: "matrix is not positive semidefinite".into(),
            size: gram.n(),
            min_eigenvalue: min.as_f64(),
            max_eigenvalue: max.as_f64(),
            trace: values.iter().copied().sum::<T>().as_f64(),
        }));
    }
    for v in values.iter_mut() {
        *v = v.max(T::zero());
    }
    let sum = values.iter().copied().sum::<T>();
    if !(sum > T::zero()) {
        return Err(Error::Numerical(NumericalDiagnostics {
            reason: "spectrum has zero mass".into(),
            size: gram.n(),
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
            trace: 0.0,
        }));
    }
    for v in values.iter_mut() {
        *v = *v / sum;
    }
    sort_descending(&mut values);
    Ok(Spectrum { values })
}

/// `S_α = log₂(Σ λ_i^α) / (1 − α)`, or `−Σ λ_i log₂ λ_i` near α = 1.
///
/// Clamped at zero.
pub fn entropy<T: Scalar>(spec: &Spectrum<T>, order: EntropyOrder<T>) -> InfoQuantity<T> {
    let bits = if order.is_shannon_limit() {
        spec.values
            .iter()
            .filter(|&&l| l > T::zero())
            .map(|&l| -l * l.log2())
            .sum::<T>()
    } else {
        let alpha = order.alpha();
        let power_sum = spec
            .values
            .iter()
            .filter(|&&l| l > T::zero())
            .map(|&l| l.powf(alpha))
            .sum::<T>();
        power_sum.log2() / (T::one() - alpha)
    };
    InfoQuantity::new(bits.max(T::zero()), InfoKind::Entropy)
}

/// Entropy of a single Gram matrix.
pub fn gram_entropy<T: Scalar>(gram: &NormalizedGram<T>, order: EntropyOrder<T>) -> Result<T> {
    Ok(entropy(&spectrum(gram)?, order).bits)
}

/// Hadamard product of two matrices divided by its trace.
pub(crate) fn normalized_hadamard<T: Scalar>(a: &Array2<T>, b: &Array2<T>) -> Array2<T> {
    let mut out = a * b;
    let trace = out.diag().iter().copied().sum::<T>();
    out.mapv_inplace(|v| v / trace);
    out
}

fn check_same_size<T: Scalar>(grams: &[&NormalizedGram<T>]) -> Result<usize> {
    let n = grams
        .first()
        .ok_or_else(|| invalid_input("empty list of Gram matrices"))?
        .n();
    for g in grams {
        if g.n() != n {
            return Err(Error::DimensionMismatch(n, g.n()));
        }
    }
    Ok(n)
}

/// Elementwise product of `k ≥ 1` Gram matrices normalized by its trace.
///
/// The trace is recomputed rather than assumed to be `n^(1−k)`.
pub fn joint_gram<T: Scalar>(grams: &[&NormalizedGram<T>]) -> Result<NormalizedGram<T>> {
    check_same_size(grams)?;
    if grams.len() == 1 {
        return Ok(grams[0].clone());
    }
    let mut product = grams[0].matrix().clone();
    for g in &grams[1..] {
        Zip::from(&mut product)
            .and(g.matrix())
            .for_each(|p, &v| *p = *p * v);
    }
    let trace = product.diag().iter().copied().sum::<T>();
    product.mapv_inplace(|v| v / trace);
    Ok(NormalizedGram::from_parts(product))
}

pub fn joint_entropy<T: Scalar>(
    grams: &[&NormalizedGram<T>],
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    let bits = gram_entropy(&joint_gram(grams)?, order)?;
    Ok(InfoQuantity::new(bits, InfoKind::JointEntropy))
}

/// `S_α(A|B) = S_α(A, B) − S_α(B)`.
pub fn conditional_entropy<T: Scalar>(
    a: &NormalizedGram<T>,
    b: &NormalizedGram<T>,
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    let joint = joint_entropy(&[a, b], order)?.bits;
    let bits = joint - gram_entropy(b, order)?;
    Ok(InfoQuantity::new(bits, InfoKind::ConditionalEntropy))
}

/// `I_α(A;B) = S_α(A) + S_α(B) − S_α(A, B)`.
pub fn mutual_information<T: Scalar>(
    a: &NormalizedGram<T>,
    b: &NormalizedGram<T>,
    order: EntropyOrder<T>,
) -> Result<InfoQuantity<T>> {
    let joint = joint_entropy(&[a, b], order)?.bits;
    let bits = gram_entropy(a, order)? + gram_entropy(b, order)? - joint;
    Ok(InfoQuantity::new(bits, InfoKind::MutualInfo))
}
