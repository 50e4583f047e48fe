use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid_input, invalid_param, Error, Result};

pub const DEFAULT_SVM_EPOCHS: usize = 100;

/// Classifier used to score a feature subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    Knn { k: usize },
    LinearSvm { c: f64, epochs: usize },
}

impl Classifier {
    pub fn knn3() -> Self {
        Classifier::Knn { k: 3 }
    }

    pub fn linear_svm() -> Self {
        Classifier::LinearSvm {
            c: 1.0,
            epochs: DEFAULT_SVM_EPOCHS,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Classifier::Knn { k } => format!("knn{k}"),
            Classifier::LinearSvm { .. } => "linsvm".into(),
        }
    }

    pub fn classify(
        &self,
        train_x: ArrayView2<f64>,
        train_y: &[usize],
        test_x: ArrayView2<f64>,
        seed: u64,
    ) -> Result<Vec<usize>> {
        match *self {
            Classifier::Knn { k } => knn_classify(train_x, train_y, test_x, k),
            Classifier::LinearSvm { c, epochs } => {
                linear_svm_classify(train_x, train_y, test_x, c, epochs, seed)
            }
        }
    }
}

impl std::str::FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linsvm" | "svm" => Ok(Classifier::linear_svm()),
            _ => s
                .strip_prefix("knn")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k > 0)
                .map(|k| Classifier::Knn { k })
                .ok_or_else(|| {
                    invalid_param(format!(
                        "unknown classifier {s:?}; expected knn<k> or linsvm"
                    ))
                }),
        }
    }
}

fn check_shapes(
    train_x: &ArrayView2<f64>,
    train_y: &[usize],
    test_x: &ArrayView2<f64>,
) -> Result<()> {
    if train_x.nrows() != train_y.len() {
        return Err(Error::DimensionMismatch(train_x.nrows(), train_y.len()));
    }
    if train_x.ncols() != test_x.ncols() {
        return Err(Error::DimensionMismatch(train_x.ncols(), test_x.ncols()));
    }
    if train_y.is_empty() {
        return Err(invalid_input("empty training set"));
    }
    Ok(())
}

/// Euclidean k-NN majority vote. Distance ties go to the lower training
/// index, vote ties to the smallest class code.
pub fn knn_classify(
    train_x: ArrayView2<f64>,
    train_y: &[usize],
    test_x: ArrayView2<f64>,
    k: usize,
) -> Result<Vec<usize>> {
    check_shapes(&train_x, train_y, &test_x)?;
    if k == 0 {
        return Err(invalid_param("k must be at least 1"));
    }
    let k = k.min(train_y.len());
    let classes = train_y.iter().copied().max().unwrap_or(0) + 1;
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(train_y.len());
    let mut votes = vec![0usize; classes];
    Ok(test_x
        .outer_iter()
        .map(|q| {
            order.clear();
            order.extend(train_x.outer_iter().enumerate().map(|(i, row)| {
                let d2: f64 = row
                    .iter()
                    .zip(q.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, i)
            }));
            order.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            votes.iter_mut().for_each(|v| *v = 0);
            for &(_, i) in &order[..k] {
                votes[train_y[i]] += 1;
            }
            // max_by_key returns the last maximum, so scan in reverse.
            (0..classes).rev().max_by_key(|&c| votes[c]).unwrap_or(0)
        })
        .collect())
}

/// One-vs-rest linear SVM trained with the Pegasos primal subgradient method
/// (`λ = 1/(c·n)`, bias as an extra constant feature, seeded shuffling).
/// Features are standardized with training statistics.
pub fn linear_svm_classify(
    train_x: ArrayView2<f64>,
    train_y: &[usize],
    test_x: ArrayView2<f64>,
    c: f64,
    epochs: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    check_shapes(&train_x, train_y, &test_x)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid_param(format!(
            "SVM regularization must be positive, got {c}"
        )));
    }
    if epochs == 0 {
        return Err(invalid_param("SVM needs at least one epoch"));
    }
    let mut present: Vec<usize> = train_y.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() == 1 {
        log::warn!(
            "training fold has a single class; predicting class {} everywhere",
            present[0]
        );
        return Ok(vec![present[0]; test_x.nrows()]);
    }

    let mean = train_x.mean_axis(Axis(0)).expect("nonempty training set");
    let sd = train_x
        .std_axis(Axis(0), 0.0)
        .mapv(|s| if s > 0.0 { s } else { 1.0 });
    let augment = |x: ArrayView2<f64>| -> Array2<f64> {
        let mut out = Array2::ones((x.nrows(), x.ncols() + 1));
        out.slice_mut(ndarray::s![.., ..x.ncols()])
            .assign(&((&x - &mean) / &sd));
        out
    };
    let train = augment(train_x);
    let test = augment(test_x);

    let n = train.nrows();
    let lambda = 1.0 / (c * n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let weights: Vec<Array1<f64>> = present
        .iter()
        .map(|&class| {
            let mut w = Array1::<f64>::zeros(train.ncols());
            let mut t = 0usize;
            for _ in 0..epochs {
                order.shuffle(&mut rng);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (lambda * t as f64);
                    let y = if train_y[i] == class { 1.0 } else { -1.0 };
                    let x = train.row(i);
                    let margin = y * w.dot(&x);
                    w *= 1.0 - eta * lambda;
                    if margin < 1.0 {
                        w.scaled_add(eta * y, &x);
                    }
                }
            }
            w
        })
        .collect();

    Ok(test
        .outer_iter()
        .map(|x| {
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (ci, w) in weights.iter().enumerate() {
                let s = w.dot(&x);
                if s > best_score {
                    best_score = s;
                    best = ci;
                }
            }
            present[best]
        })
        .collect())
}
