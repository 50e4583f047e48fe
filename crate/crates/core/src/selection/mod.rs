//! Greedy forward feature selection.
//!
//! Each step scores every unselected feature under a [`Criterion`] and adds
//! the best one (lowest index on ties). Six criteria work on discretized
//! features with plug-in Shannon estimators; [`Criterion::MatrixMi`] scores
//! the whole candidate set at once with the matrix-based multivariate mutual
//! information `I_α(B; {A_1, …, A_k, A_candidate})`, where `B` is the label
//! Gram matrix.
//!
//! Cost model. With `n` samples and `d` features the discrete criteria are
//! `O(n·d)` per step. The matrix criterion eigendecomposes two `n×n` matrices
//! per candidate, so a step is `O(d·n³)` time, and keeping all per-feature
//! Gram matrices resident costs `O(d·n²)` memory. When that exceeds
//! [`SelectionConfig::memory_budget`] the Gram matrices are rebuilt on demand.

mod discrete_scorer;
mod matrix_scorer;

use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::DEFAULT_BINS;
use crate::error::{invalid_input, invalid_param, Result};
use crate::eval::Dataset;
use crate::kernel::{NormalizedGram, SigmaRule};
use crate::scalar::Scalar;
use crate::spectral::EntropyOrder;

use discrete_scorer::DiscreteScorer;
pub use matrix_scorer::feature_gram;
use matrix_scorer::MatrixScorer;

/// Default memory budget for resident Gram matrices: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;
/// Default MIFS redundancy weight.
pub const DEFAULT_MIFS_BETA: f64 = 1.0;
/// Default entropy order of the matrix criterion.
pub const DEFAULT_ALPHA: f64 = 1.01;

/// Scoring rule for one greedy step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Criterion {
    /// `I(X;Y)`
    Mim,
    /// `I(X;Y) − β Σ_l I(X;X_l)`
    Mifs { beta: f64 },
    /// `I(X;Y) − Σ_l [I(X;X_l) − I(X;X_l|Y)]`
    Fou,
    /// `I(X;Y) − (1/|S|) Σ_l I(X;X_l)`
    Mrmr,
    /// `Σ_l I({X,X_l};Y)`
    Jmi,
    /// `min_l I(X;Y|X_l)`
    Cmim,
    /// `I_α(B; {A_selected…, A_X})` on normalized Gram matrices.
    MatrixMi { alpha: f64, sigma: SigmaRule<f64> },
}

impl Criterion {
    pub fn matrix_mi(alpha: f64, sigma: SigmaRule<f64>) -> Result<Self> {
        EntropyOrder::new(alpha)?;
        if let SigmaRule::Fixed(s) = sigma {
            if !(s > 0.0) || !s.is_finite() {
                return Err(invalid_param(format!("sigma must be positive, got {s}")));
            }
        }
        Ok(Criterion::MatrixMi { alpha, sigma })
    }

    pub fn mifs(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(invalid_param(format!(
                "MIFS beta must be nonnegative, got {beta}"
            )));
        }
        Ok(Criterion::Mifs { beta })
    }

    /// The seven criteria with default parameters, baselines first.
    pub fn all_defaults() -> Vec<Criterion> {
        vec![
            Criterion::Mifs {
                beta: DEFAULT_MIFS_BETA,
            },
            Criterion::Fou,
            Criterion::Mim,
            Criterion::Mrmr,
            Criterion::Jmi,
            Criterion::Cmim,
            Criterion::MatrixMi {
                alpha: DEFAULT_ALPHA,
                sigma: SigmaRule::Fixed(1.0),
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Mim => "mim",
            Criterion::Mifs { .. } => "mifs",
            Criterion::Fou => "fou",
            Criterion::Mrmr => "mrmr",
            Criterion::Jmi => "jmi",
            Criterion::Cmim => "cmim",
            Criterion::MatrixMi { .. } => "matrix-mi",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Criterion::Mifs { beta } => Criterion::mifs(beta).map(|_| ()),
            Criterion::MatrixMi { alpha, sigma } => Criterion::matrix_mi(alpha, sigma).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Preprocessing and resource knobs shared by all criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionConfig {
    /// Equal-width bins for the discrete criteria.
    pub bins: usize,
    /// Standardize continuous features before building Gram matrices when σ
    /// is fixed.
    pub standardize: bool,
    /// Bytes allowed for resident per-feature Gram matrices.
    pub memory_budget: u64,
    /// Score candidates of a step in parallel.
    pub parallel: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            standardize: true,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            parallel: true,
        }
    }
}

/// Score of one candidate at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateScore {
    pub feature: usize,
    pub score: f64,
}

/// Outcome of a greedy run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionTrace {
    pub criterion: Criterion,
    pub selected: Vec<usize>,
    /// Per step, every unselected candidate's score in feature order.
    pub step_scores: Vec<Vec<CandidateScore>>,
    /// Per step, the winning score.
    pub objective_values: Vec<f64>,
}

/// Criterion-specific scoring state that is updated as features are chosen.
pub(crate) trait Scorer: Send + Sync {
    fn score(&self, candidate: usize) -> Result<f64>;
    fn commit(&mut self, feature: usize) -> Result<()>;
}

/// Step-by-step greedy selection.
pub struct GreedySelector {
    criterion: Criterion,
    scorer: Box<dyn Scorer>,
    n_features: usize,
    parallel: bool,
    trace: SelectionTrace,
}

impl GreedySelector {
    pub fn new(criterion: Criterion, dataset: &Dataset, config: &SelectionConfig) -> Result<Self> {
        Self::with_precision::<f64>(criterion, dataset, config)
    }

    /// Runs the matrix criterion's spectral computations in scalar type `T`.
    pub fn with_precision<T: Scalar>(
        criterion: Criterion,
        dataset: &Dataset,
        config: &SelectionConfig,
    ) -> Result<Self> {
        criterion.validate()?;
        if config.bins == 0 {
            return Err(invalid_param("bin count must be at least 1"));
        }
        check_finite(dataset)?;
        let scorer: Box<dyn Scorer> = match criterion {
            Criterion::MatrixMi { alpha, sigma } => Box::new(MatrixScorer::<T>::new(
                dataset,
                EntropyOrder::new(T::lit(alpha))?,
                sigma,
                config,
            )?),
            _ => Box::new(DiscreteScorer::new(criterion, dataset, config.bins)?),
        };
        Ok(Self {
            criterion,
            scorer,
            n_features: dataset.n_features(),
            parallel: config.parallel,
            trace: SelectionTrace {
                criterion,
                selected: Vec::new(),
                step_scores: Vec::new(),
                objective_values: Vec::new(),
            },
        })
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn selected(&self) -> &[usize] {
        &self.trace.selected
    }

    /// Scores every remaining candidate and commits the best one.
    pub fn step(&mut self) -> Result<usize> {
        let candidates: Vec<usize> = (0..self.n_features)
            .filter(|c| !self.trace.selected.contains(c))
            .collect();
        if candidates.is_empty() {
            return Err(invalid_input("every feature is already selected"));
        }
        let scorer = &self.scorer;
        let scores: Vec<f64> = if self.parallel {
            candidates
                .par_iter()
                .map(|&c| scorer.score(c))
                .collect::<Result<_>>()?
        } else {
            candidates
                .iter()
                .map(|&c| scorer.score(c))
                .collect::<Result<_>>()?
        };
        let mut best = 0;
        for i in 1..scores.len() {
            if scores[i] > scores[best] || (scores[best].is_nan() && !scores[i].is_nan()) {
                best = i;
            }
        }
        let chosen = candidates[best];
        self.scorer.commit(chosen)?;
        self.trace.selected.push(chosen);
        self.trace.objective_values.push(scores[best]);
        self.trace.step_scores.push(
            candidates
                .iter()
                .zip(&scores)
                .map(|(&feature, &score)| CandidateScore { feature, score })
                .collect(),
        );
        Ok(chosen)
    }

    pub fn into_trace(self) -> SelectionTrace {
        self.trace
    }
}

fn check_finite(dataset: &Dataset) -> Result<()> {
    for (j, col) in dataset.features().columns().into_iter().enumerate() {
        if col.iter().any(|v| !v.is_finite()) {
            return Err(invalid_input(format!(
                "feature column {j} ({}) has non-finite values",
                dataset.feature_names()[j]
            )));
        }
    }
    Ok(())
}

fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(invalid_input(format!(
            "cannot select {k} features: the dataset has d = {d} features"
        )));
    }
    Ok(())
}

/// Selects `k` features greedily.
pub fn select(
    criterion: Criterion,
    dataset: &Dataset,
    k: usize,
    config: &SelectionConfig,
) -> Result<SelectionTrace> {
    select_with_precision::<f64>(criterion, dataset, k, config)
}

pub fn select_with_precision<T: Scalar>(
    criterion: Criterion,
    dataset: &Dataset,
    k: usize,
    config: &SelectionConfig,
) -> Result<SelectionTrace> {
    check_k(k, dataset.n_features())?;
    let mut selector = GreedySelector::with_precision::<T>(criterion, dataset, config)?;
    for _ in 0..k {
        selector.step()?;
    }
    Ok(selector.into_trace())
}

/// Score of `candidate` given an already selected (ordered) feature list.
pub fn score_candidate(
    criterion: Criterion,
    candidate: usize,
    selected: &[usize],
    dataset: &Dataset,
    config: &SelectionConfig,
) -> Result<f64> {
    let d = dataset.n_features();
    if candidate >= d {
        return Err(invalid_input(format!(
            "candidate {candidate} out of range for d = {d}"
        )));
    }
    if selected.contains(&candidate) {
        return Err(invalid_input(format!(
            "candidate {candidate} is already selected"
        )));
    }
    if let Some(&bad) = selected.iter().find(|&&s| s >= d) {
        return Err(invalid_input(format!(
            "selected feature {bad} out of range for d = {d}"
        )));
    }
    let mut selector = GreedySelector::new(criterion, dataset, config)?;
    for &s in selected {
        selector.scorer.commit(s)?;
    }
    selector.scorer.score(candidate)
}

/// Normalized Kronecker-delta Gram matrix of class labels.
pub fn label_gram<T: Scalar>(labels: &[usize]) -> Result<NormalizedGram<T>> {
    let n = labels.len();
    if n < 2 {
        return Err(invalid_input(format!(
            "label Gram needs at least 2 samples, got {n}"
        )));
    }
    let inv_n = T::one() / T::count(n);
    let matrix = ndarray::Array2::from_shape_fn((n, n), |(i, j)| {
        if labels[i] == labels[j] {
            inv_n
        } else {
            T::zero()
        }
    });
    Ok(NormalizedGram::from_parts(matrix))
}

#[cfg(test)]
mod tests;
