//! Datasets, cross-validation, classifiers, rank statistics and the
//! synthetic MADELON-style generator.

mod benchmark;
mod classify;
mod cv;
mod dataset;
mod stats;
mod synth;

pub use benchmark::{run_benchmark, BenchmarkConfig, EvalReport, SelectionMode};
pub use classify::{knn_classify, linear_svm_classify, Classifier, DEFAULT_SVM_EPOCHS};
pub use cv::{complement, cv_split, FoldPolicy, AUTO_KFOLD_THRESHOLD};
pub use dataset::{load_csv, parse_csv, Dataset, LabelColumn};
pub use stats::{accuracy_metrics, midranks, nemenyi_cd, rank_methods, NEMENYI_Q05};
pub use synth::{generate_madelon_like, FeatureRole, MadelonConfig, SyntheticData};
