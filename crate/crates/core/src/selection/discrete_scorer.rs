use crate::discrete::{
    discretize, shannon_conditional_mi, shannon_mi, shannon_pair_mi, BinnedColumn,
};
use crate::error::Result;
use crate::eval::Dataset;

use super::{Criterion, Scorer};

/// Running per-candidate sums for the Shannon criteria.
pub(crate) struct DiscreteScorer {
    criterion: Criterion,
    columns: Vec<BinnedColumn>,
    label: BinnedColumn,
    relevance: Vec<f64>,
    /// Σ_l I(X;X_l)
    redundancy: Vec<f64>,
    /// Σ_l I(X;X_l|Y)
    conditional_redundancy: Vec<f64>,
    /// Σ_l I({X,X_l};Y)
    pair_relevance: Vec<f64>,
    /// min_l I(X;Y|X_l)
    min_conditional_relevance: Vec<f64>,
    selected: usize,
}

impl DiscreteScorer {
    pub(crate) fn new(criterion: Criterion, dataset: &Dataset, bins: usize) -> Result<Self> {
        let d = dataset.n_features();
        let columns = (0..d)
            .map(|j| discretize(&dataset.column(j), bins))
            .collect::<Result<Vec<_>>>()?;
        let label = BinnedColumn::from_labels(dataset.labels());
        let relevance = columns
            .iter()
            .map(|c| shannon_mi(c, &label))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            criterion,
            columns,
            label,
            relevance,
            redundancy: vec![0.0; d],
            conditional_redundancy: vec![0.0; d],
            pair_relevance: vec![0.0; d],
            min_conditional_relevance: vec![f64::INFINITY; d],
            selected: 0,
        })
    }
}

impl Scorer for DiscreteScorer {
    fn score(&self, c: usize) -> Result<f64> {
        let first = self.selected == 0;
        Ok(match self.criterion {
            Criterion::Mim => self.relevance[c],
            Criterion::Mifs { beta } => self.relevance[c] - beta * self.redundancy[c],
            Criterion::Fou => {
                self.relevance[c] - (self.redundancy[c] - self.conditional_redundancy[c])
            }
            Criterion::Mrmr if first => self.relevance[c],
            Criterion::Mrmr => self.relevance[c] - self.redundancy[c] / self.selected as f64,
            Criterion::Jmi if first => self.relevance[c],
            Criterion::Jmi => self.pair_relevance[c],
            Criterion::Cmim if first => self.relevance[c],
            Criterion::Cmim => self.min_conditional_relevance[c],
            Criterion::MatrixMi { .. } => unreachable!("matrix criterion uses its own scorer"),
        })
    }

    fn commit(&mut self, f: usize) -> Result<()> {
        let chosen = &self.columns[f];
        for c in 0..self.columns.len() {
            if c == f {
                continue;
            }
            let x = &self.columns[c];
            match self.criterion {
                Criterion::Mim => {}
                Criterion::Mifs { .. } | Criterion::Mrmr => {
                    self.redundancy[c] += shannon_mi(x, chosen)?
                }
                Criterion::Fou => {
                    self.redundancy[c] += shannon_mi(x, chosen)?;
                    self.conditional_redundancy[c] +=
                        shannon_conditional_mi(x, chosen, &self.label)?;
                }
                Criterion::Jmi => {
                    self.pair_relevance[c] += shannon_pair_mi(x, chosen, &self.label)?
                }
                Criterion::Cmim => {
                    let v = shannon_conditional_mi(x, &self.label, chosen)?;
                    self.min_conditional_relevance[c] = self.min_conditional_relevance[c].min(v);
                }
                Criterion::MatrixMi { .. } => unreachable!("matrix criterion uses its own scorer"),
            }
        }
        self.selected += 1;
        Ok(())
    }
}
