//! Plug-in Shannon estimators over discretized features.
//!
//! Continuous columns are cut into equal-width bins; columns that already look
//! categorical (integer valued with few levels) are relabeled to dense codes
//! instead. All estimators use empirical frequencies with no bias correction
//! and report bits.

use crate::error::{invalid_input, invalid_param, Error, Result};

pub const DEFAULT_BINS: usize = 5;

/// A column of small nonnegative integer codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinnedColumn {
    codes: Vec<usize>,
    levels: usize,
    was_categorical: bool,
}

impl BinnedColumn {
    /// Wraps codes that already lie in `[0, levels)`.
    pub fn new(codes: Vec<usize>, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(invalid_param("a binned column needs at least one level"));
        }
        if let Some(&c) = codes.iter().find(|&&c| c >= levels) {
            return Err(invalid_input(format!(
                "code {c} out of range for {levels} levels"
            )));
        }
        Ok(Self {
            codes,
            levels,
            was_categorical: false,
        })
    }

    /// Dense codes from arbitrary labels, numbered by first sorted value.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut distinct: Vec<usize> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let codes = labels
            .iter()
            .map(|l| distinct.binary_search(l).expect("label present"))
            .collect();
        Self {
            codes,
            levels: distinct.len().max(1),
            was_categorical: true,
        }
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn was_categorical(&self) -> bool {
        self.was_categorical
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

fn check_finite(column: &[f64]) -> Result<()> {
    if column.is_empty() {
        return Err(invalid_input("empty column"));
    }
    if let Some(i) = column.iter().position(|v| !v.is_finite()) {
        return Err(invalid_input(format!("non-finite value at row {i}")));
    }
    Ok(())
}

/// Bin `i` covers `[min + i·w, min + (i+1)·w)` with `w = (max − min)/bins`;
/// the maximum lands in the last bin. A constant column gets one level.
pub fn equal_width_bin(column: &[f64], bins: usize) -> Result<BinnedColumn> {
    if bins == 0 {
        return Err(invalid_param("bin count must be at least 1"));
    }
    check_finite(column)?;
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span <= 0.0 {
        return Ok(BinnedColumn {
            codes: vec![0; column.len()],
            levels: 1,
            was_categorical: false,
        });
    }
    let codes = column
        .iter()
        .map(|&v| {
            let pos = ((v - min) / span * bins as f64).floor();
            (pos.max(0.0) as usize).min(bins - 1)
        })
        .collect();
    Ok(BinnedColumn {
        codes,
        levels: bins,
        was_categorical: false,
    })
}

/// True when every value is an integer and there are at most `bins` levels.
pub fn detect_categorical(column: &[f64], bins: usize) -> bool {
    if column.is_empty() || column.iter().any(|v| !v.is_finite() || v.fract() != 0.0) {
        return false;
    }
    distinct_sorted(column).len() <= bins
}

fn distinct_sorted(column: &[f64]) -> Vec<f64> {
    let mut d = column.to_vec();
    d.sort_by(|a, b| a.total_cmp(b));
    d.dedup();
    d
}

/// Relabels the distinct values of a column to `0..m` in increasing order.
pub fn relabel_categorical(column: &[f64]) -> Result<BinnedColumn> {
    check_finite(column)?;
    let levels = distinct_sorted(column);
    let codes = column
        .iter()
        .map(|v| {
            levels
                .binary_search_by(|p| p.total_cmp(v))
                .expect("value present")
        })
        .collect();
    Ok(BinnedColumn {
        codes,
        levels: levels.len(),
        was_categorical: true,
    })
}

/// Categorical columns are relabeled, everything else is width-binned.
pub fn discretize(column: &[f64], bins: usize) -> Result<BinnedColumn> {
    if bins == 0 {
        return Err(invalid_param("bin count must be at least 1"));
    }
    if detect_categorical(column, bins) {
        relabel_categorical(column)
    } else {
        equal_width_bin(column, bins)
    }
}

/// Joint variable over the product alphabet of two columns.
pub fn pair_column(a: &BinnedColumn, b: &BinnedColumn) -> Result<BinnedColumn> {
    same_len(a, b)?;
    let codes = a
        .codes
        .iter()
        .zip(&b.codes)
        .map(|(&x, &y)| x * b.levels + y)
        .collect();
    Ok(BinnedColumn {
        codes,
        levels: a.levels * b.levels,
        was_categorical: true,
    })
}

fn same_len(a: &BinnedColumn, b: &BinnedColumn) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(invalid_input("empty column"));
    }
    Ok(())
}

fn counts(x: &BinnedColumn) -> Vec<usize> {
    let mut c = vec![0usize; x.levels];
    for &v in &x.codes {
        c[v] += 1;
    }
    c
}

/// `−Σ p log₂ p` over empirical frequencies.
pub fn shannon_entropy(x: &BinnedColumn) -> f64 {
    let n = x.len() as f64;
    if x.is_empty() {
        return 0.0;
    }
    counts(x)
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

/// `Σ p(x,y) log₂(p(x,y) / p(x)p(y))`.
pub fn shannon_mi(x: &BinnedColumn, y: &BinnedColumn) -> Result<f64> {
    same_len(x, y)?;
    let n = x.len();
    let (cx, cy) = (counts(x), counts(y));
    let mut joint = vec![0usize; x.levels * y.levels];
    for (&a, &b) in x.codes.iter().zip(&y.codes) {
        joint[a * y.levels + b] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for a in 0..x.levels {
        for b in 0..y.levels {
            let c = joint[a * y.levels + b];
            if c > 0 {
                let ratio = (c * n) as f64 / (cx[a] * cy[b]) as f64;
                mi += c as f64 / nf * ratio.log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// `I(x; y | z) = Σ p(x,y,z) log₂(p(x,y,z) p(z) / (p(x,z) p(y,z)))`.
pub fn shannon_conditional_mi(x: &BinnedColumn, y: &BinnedColumn, z: &BinnedColumn) -> Result<f64> {
    same_len(x, y)?;
    same_len(x, z)?;
    let (mx, my, mz) = (x.levels, y.levels, z.levels);
    let mut xyz = vec![0usize; mx * my * mz];
    let mut xz = vec![0usize; mx * mz];
    let mut yz = vec![0usize; my * mz];
    let cz = counts(z);
    for i in 0..x.len() {
        let (a, b, c) = (x.codes[i], y.codes[i], z.codes[i]);
        xyz[(a * my + b) * mz + c] += 1;
        xz[a * mz + c] += 1;
        yz[b * mz + c] += 1;
    }
    let nf = x.len() as f64;
    let mut cmi = 0.0;
    for a in 0..mx {
        for b in 0..my {
            for c in 0..mz {
                let k = xyz[(a * my + b) * mz + c];
                if k > 0 {
                    let ratio = (k * cz[c]) as f64 / (xz[a * mz + c] * yz[b * mz + c]) as f64;
                    cmi += k as f64 / nf * ratio.log2();
                }
            }
        }
    }
    Ok(cmi.max(0.0))
}

/// `I({x1, x2}; y)` with the pair treated as one variable.
pub fn shannon_pair_mi(x1: &BinnedColumn, x2: &BinnedColumn, y: &BinnedColumn) -> Result<f64> {
    shannon_mi(&pair_column(x1, x2)?, y)
}
