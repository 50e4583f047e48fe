use ndarray::Axis;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::Classifier;
use super::cv::{complement, cv_split, FoldPolicy};
use super::stats::{nemenyi_cd, rank_methods};
use super::Dataset;
use crate::error::{invalid_input, Result};
use crate::selection::{select, Criterion, SelectionConfig};

/// Where feature selection runs relative to cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    /// Select once on the full dataset, then cross-validate prefixes.
    Once,
    /// Reselect on each training fold.
    PerFold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkConfig {
    pub max_features: usize,
    pub classifier: Classifier,
    pub folds: FoldPolicy,
    pub mode: SelectionMode,
    pub selection: SelectionConfig,
    pub seed: u64,
}

impl BenchmarkConfig {
    pub fn new(max_features: usize, classifier: Classifier, seed: u64) -> Self {
        Self {
            max_features,
            classifier,
            folds: FoldPolicy::Auto,
            mode: SelectionMode::Once,
            selection: SelectionConfig::default(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub methods: Vec<String>,
    pub feature_counts: Vec<usize>,
    /// `accuracies[m][c]`: pooled CV accuracy of method `m` using its first
    /// `feature_counts[c]` features.
    pub accuracies: Vec<Vec<f64>>,
    /// Average rank of each method over feature counts.
    pub ranks: Vec<f64>,
    /// Nemenyi CD treating each feature count as a block; `None` outside the
    /// 2..=10 method range.
    pub cd: Option<f64>,
    pub seed: u64,
    pub config: BenchmarkConfig,
    /// Selection order on the full dataset (empty in per-fold mode).
    pub selected: Vec<Vec<usize>>,
}

impl EvalReport {
    /// `feature_count, method, accuracy` rows with a header.
    pub fn write_tsv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "feature_count\tmethod\taccuracy")?;
        for (c, &count) in self.feature_counts.iter().enumerate() {
            for (m, method) in self.methods.iter().enumerate() {
                writeln!(w, "{count}\t{method}\t{}", self.accuracies[m][c])?;
            }
        }
        Ok(())
    }
}

/// Pooled CV accuracy for each prefix `order[..1]`, `order[..2]`, ….
fn prefix_accuracies(
    dataset: &Dataset,
    folds: &[Vec<usize>],
    orders: &[Vec<usize>],
    config: &BenchmarkConfig,
) -> Result<Vec<f64>> {
    let n = dataset.n_samples();
    let x = dataset.features();
    let y = dataset.labels();
    let per_fold: Vec<Vec<usize>> = folds
        .par_iter()
        .zip(orders.par_iter())
        .enumerate()
        .map(|(f, (test, order))| {
            let train = complement(n, test);
            let train_y: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            (1..=config.max_features)
                .map(|count| {
                    let cols = &order[..count];
                    let train_x = x.select(Axis(0), &train).select(Axis(1), cols);
                    let test_x = x.select(Axis(0), test).select(Axis(1), cols);
                    let seed = config.seed.wrapping_add(f as u64);
                    let pred = config.classifier.classify(
                        train_x.view(),
                        &train_y,
                        test_x.view(),
                        seed,
                    )?;
                    Ok(pred.iter().zip(test).filter(|(&p, &i)| p == y[i]).count())
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..config.max_features)
        .map(|c| per_fold.iter().map(|hits| hits[c]).sum::<usize>() as f64 / n as f64)
        .collect())
}

/// Selects features with each method and cross-validates every prefix
/// length `1..=max_features`.
pub fn run_benchmark(
    dataset: &Dataset,
    methods: &[Criterion],
    config: &BenchmarkConfig,
) -> Result<EvalReport> {
    let d = dataset.n_features();
    if config.max_features == 0 || config.max_features > d {
        return Err(invalid_input(format!(
            "max_features = {} must lie in [1, d = {d}]",
            config.max_features
        )));
    }
    if methods.is_empty() {
        return Err(invalid_input("no selection methods given"));
    }
    if dataset.n_classes() < 2 {
        return Err(invalid_input("classification needs at least two classes"));
    }
    let folds = cv_split(dataset.labels(), config.folds, config.seed)?;

    let runs: Vec<(Vec<usize>, Vec<f64>)> = methods
        .par_iter()
        .map(|&method| match config.mode {
            SelectionMode::Once => {
                let order =
                    select(method, dataset, config.max_features, &config.selection)?.selected;
                let orders = vec![order.clone(); folds.len()];
                Ok((order, prefix_accuracies(dataset, &folds, &orders, config)?))
            }
            SelectionMode::PerFold => {
                let orders = folds
                    .par_iter()
                    .map(|test| {
                        let train = dataset.subset_rows(&complement(dataset.n_samples(), test))?;
                        Ok(
                            select(method, &train, config.max_features, &config.selection)?
                                .selected,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((
                    Vec::new(),
                    prefix_accuracies(dataset, &folds, &orders, config)?,
                ))
            }
        })
        .collect::<Result<_>>()?;

    let (selected, accuracies): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let ranks = rank_methods(&accuracies)?;
    let cd = nemenyi_cd(methods.len(), config.max_features).ok();
    Ok(EvalReport {
        dataset: dataset.name().to_string(),
        methods: methods.iter().map(|m| m.name().to_string()).collect(),
        feature_counts: (1..=config.max_features).collect(),
        accuracies,
        ranks,
        cd,
        seed: config.seed,
        config: *config,
        selected,
    })
}
