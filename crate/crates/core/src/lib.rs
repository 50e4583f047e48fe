//! Matrix-based Rényi α-order entropy and its multivariate extension.
//!
//! Entropy, joint entropy, mutual information, interaction information,
//! co-information and total correlation are computed directly from the
//! eigenspectra of normalized kernel Gram matrices, with no density
//! estimation. On top of that sit greedy feature selection (the matrix-based
//! multivariate MI criterion plus six discrete Shannon baselines) and a
//! cross-validation harness.
//!
//! The spectral core is generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix it to `f64`, which the selection and evaluation layers use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod linalg;
pub mod scalar;
pub mod selection;
pub mod spectral;

pub use error::{Error, NumericalDiagnostics, Result};
pub use eval::{
    generate_madelon_like, load_csv, run_benchmark, BenchmarkConfig, Classifier, Dataset,
    EvalReport, FoldPolicy, LabelColumn, MadelonConfig,
};
pub use kernel::{
    gram_from_column, gram_matrix, rbf_kernel, sigma_heuristic, KernelSpec, SigmaRule,
};
pub use scalar::Scalar;
pub use selection::{
    feature_gram, label_gram, score_candidate, select, select_with_precision, Criterion,
    GreedySelector, SelectionConfig, SelectionTrace,
};
pub use spectral::{
    co_information, conditional_entropy, entropy, interaction_information, joint_entropy,
    joint_gram, multivariate_mi, mutual_information, spectrum, total_correlation, EntropyOrder,
    InfoKind, InfoQuantity,
};

pub type Gram = kernel::NormalizedGram<f64>;
pub type Gram32 = kernel::NormalizedGram<f32>;
pub type Order = spectral::EntropyOrder<f64>;
pub type Order32 = spectral::EntropyOrder<f32>;
pub type Spectrum = spectral::Spectrum<f64>;
pub type Spectrum32 = spectral::Spectrum<f32>;
pub type Kernel = kernel::KernelSpec<f64>;
pub type Kernel32 = kernel::KernelSpec<f32>;
pub type Quantity = spectral::InfoQuantity<f64>;
