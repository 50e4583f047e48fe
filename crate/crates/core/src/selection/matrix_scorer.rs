use ndarray::{Array2, ArrayView2};

use crate::error::Result;
use crate::eval::Dataset;
use crate::kernel::{gram_from_column, sigma_heuristic, KernelSpec, NormalizedGram, SigmaRule};
use crate::scalar::Scalar;
use crate::spectral::{gram_entropy, normalized_hadamard, EntropyOrder};

use super::{label_gram, Scorer, SelectionConfig};

/// Per-feature Gram matrices, either resident or rebuilt on request.
enum GramStore<T> {
    Cached(Vec<NormalizedGram<T>>),
    OnDemand {
        columns: Vec<Vec<T>>,
        kernels: Vec<KernelSpec<T>>,
    },
}

impl<T: Scalar> GramStore<T> {
    fn gram(&self, j: usize) -> Result<std::borrow::Cow<'_, NormalizedGram<T>>> {
        match self {
            GramStore::Cached(grams) => Ok(std::borrow::Cow::Borrowed(&grams[j])),
            GramStore::OnDemand { columns, kernels } => Ok(std::borrow::Cow::Owned(
                gram_from_column(&columns[j], &kernels[j])?,
            )),
        }
    }
}

pub(crate) struct MatrixScorer<T> {
    order: EntropyOrder<T>,
    store: GramStore<T>,
    label: Array2<T>,
    label_entropy: T,
    /// Trace-normalized Hadamard product of the selected Grams.
    joint: Option<Array2<T>>,
    /// `joint ∘ label`, trace-normalized.
    joint_label: Option<Array2<T>>,
}

fn standardize<T: Scalar>(column: &mut [T]) {
    let n = T::count(column.len());
    let mean = column.iter().copied().sum::<T>() / n;
    let var = column.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (n - T::one());
    let sd = var.sqrt();
    if sd > T::zero() && sd.is_finite() {
        column.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    } else {
        column.iter_mut().for_each(|v| *v = T::zero());
    }
}

/// Column `j` as used for its Gram matrix, with its RBF kernel.
///
/// With a fixed σ, continuous columns are standardized first (when asked);
/// the other rules pick σ per column from the raw values.
fn prepared_column<T: Scalar>(
    dataset: &Dataset,
    j: usize,
    sigma: SigmaRule<f64>,
    standardize_continuous: bool,
) -> Result<(Vec<T>, KernelSpec<T>)> {
    let n = dataset.n_samples();
    let mut column: Vec<T> = dataset.column(j).into_iter().map(T::lit).collect();
    let kernel = match sigma {
        SigmaRule::Fixed(s) => {
            if standardize_continuous && dataset.continuous_flags()[j] {
                standardize(&mut column);
            }
            KernelSpec::rbf(T::lit(s))?
        }
        rule => {
            let view = ArrayView2::from_shape((n, 1), &column[..]).expect("column has n rows");
            let rule = match rule {
                SigmaRule::Silverman => SigmaRule::Silverman,
                SigmaRule::RangeFraction(f) => SigmaRule::RangeFraction(T::lit(f)),
                SigmaRule::MedianFraction(f) => SigmaRule::MedianFraction(T::lit(f)),
                SigmaRule::Fixed(_) => unreachable!(),
            };
            KernelSpec::rbf(sigma_heuristic(view, rule)?.sigma)?
        }
    };
    Ok((column, kernel))
}

/// Normalized Gram matrix of feature `j` under the selection preprocessing.
pub fn feature_gram<T: Scalar>(
    dataset: &Dataset,
    j: usize,
    sigma: SigmaRule<f64>,
    standardize_continuous: bool,
) -> Result<NormalizedGram<T>> {
    if j >= dataset.n_features() {
        return Err(crate::error::invalid_input(format!(
            "feature {j} out of range for d = {}",
            dataset.n_features()
        )));
    }
    let (column, kernel) = prepared_column::<T>(dataset, j, sigma, standardize_continuous)?;
    gram_from_column(&column, &kernel)
}

impl<T: Scalar> MatrixScorer<T> {
    pub(crate) fn new(
        dataset: &Dataset,
        order: EntropyOrder<T>,
        sigma: SigmaRule<f64>,
        config: &SelectionConfig,
    ) -> Result<Self> {
        let n = dataset.n_samples();
        let d = dataset.n_features();
        let mut columns = Vec::with_capacity(d);
        let mut kernels = Vec::with_capacity(d);
        for j in 0..d {
            let (column, kernel) = prepared_column::<T>(dataset, j, sigma, config.standardize)?;
            columns.push(column);
            kernels.push(kernel);
        }

        let bytes = (n as u128) * (n as u128) * (d as u128) * std::mem::size_of::<T>() as u128;
        let store = if bytes <= config.memory_budget as u128 {
            let grams = columns
                .iter()
                .zip(&kernels)
                .map(|(c, k)| gram_from_column(c, k))
                .collect::<Result<Vec<_>>>()?;
            GramStore::Cached(grams)
        } else {
            log::info!(
                "per-feature Gram matrices need {bytes} bytes, over budget; rebuilding on demand"
            );
            GramStore::OnDemand { columns, kernels }
        };

        let label = label_gram::<T>(dataset.labels())?;
        let label_entropy = gram_entropy(&label, order)?;
        Ok(Self {
            order,
            store,
            label: label.into_matrix(),
            label_entropy,
            joint: None,
            joint_label: None,
        })
    }

    fn entropy_of(&self, matrix: Array2<T>) -> Result<T> {
        gram_entropy(&NormalizedGram::from_parts(matrix), self.order)
    }
}

impl<T: Scalar> Scorer for MatrixScorer<T> {
    fn score(&self, c: usize) -> Result<f64> {
        let a = self.store.gram(c)?;
        let a = a.matrix();
        let (features, with_label) = match (&self.joint, &self.joint_label) {
            (Some(j), Some(jb)) => (normalized_hadamard(j, a), normalized_hadamard(jb, a)),
            _ => (a.clone(), normalized_hadamard(&self.label, a)),
        };
        let bits = self.label_entropy + self.entropy_of(features)? - self.entropy_of(with_label)?;
        Ok(bits.as_f64())
    }

    fn commit(&mut self, f: usize) -> Result<()> {
        let a = self.store.gram(f)?;
        let joint = match &self.joint {
            Some(j) => normalized_hadamard(j, a.matrix()),
            None => a.matrix().clone(),
        };
        self.joint_label = Some(normalized_hadamard(&joint, &self.label));
        self.joint = Some(joint);
        Ok(())
    }
}
