use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid_input, invalid_param, Result};

/// Above this sample count [`FoldPolicy::Auto`] uses 10 folds, else LOO.
pub const AUTO_KFOLD_THRESHOLD: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldPolicy {
    /// 10 stratified folds when `n > 100`, leave-one-out otherwise.
    Auto,
    Loo,
    KFold(usize),
}

impl std::str::FromStr for FoldPolicy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FoldPolicy::Auto),
            "loo" => Ok(FoldPolicy::Loo),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 2)
                .map(FoldPolicy::KFold)
                .ok_or_else(|| {
                    invalid_param(format!(
                        "fold policy must be auto, loo or an integer ≥ 2, got {other:?}"
                    ))
                }),
        }
    }
}

/// Test-index sets that partition `0..n`.
///
/// K-fold splits are stratified: each class is shuffled with the seed and
/// dealt round-robin, continuing where the previous class stopped, so both
/// per-class and total fold sizes differ by at most one.
pub fn cv_split(labels: &[usize], policy: FoldPolicy, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if n < 2 {
        return Err(invalid_input(format!(
            "cross-validation needs at least 2 samples, got {n}"
        )));
    }
    let k = match policy {
        FoldPolicy::Auto if n > AUTO_KFOLD_THRESHOLD => 10,
        FoldPolicy::Auto | FoldPolicy::Loo => return Ok((0..n).map(|i| vec![i]).collect()),
        FoldPolicy::KFold(k) if k < 2 || k > n => {
            return Err(invalid_param(format!(
                "fold count must lie in [2, {n}], got {k}"
            )))
        }
        FoldPolicy::KFold(k) => k,
    };
    let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Indices of `0..n` not in `test` (which must be sorted).
pub fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| test.binary_search(i).is_err()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_n_is_leave_one_out() {
        let labels: Vec<usize> = (0..50).map(|i| i % 2).collect();
        let folds = cv_split(&labels, FoldPolicy::Auto, 1).unwrap();
        assert_eq!(folds.len(), 50);
        assert!(folds.iter().enumerate().all(|(i, f)| f == &vec![i]));
    }

    #[test]
    fn large_balanced_binary_is_stratified() {
        let labels: Vec<usize> = (0..1000).map(|i| i % 2).collect();
        let folds = cv_split(&labels, FoldPolicy::Auto, 7).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            let ones = f.iter().filter(|&&i| labels[i] == 1).count();
            let zeros = f.len() - ones;
            assert!((49..=51).contains(&ones) && (49..=51).contains(&zeros));
        }
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
    }

    #[test]
    fn unbalanced_counts_differ_by_at_most_one() {
        let labels: Vec<usize> = (0..137)
            .map(|i| if i % 7 == 0 { 2 } else { i % 2 })
            .collect();
        let folds = cv_split(&labels, FoldPolicy::KFold(10), 3).unwrap();
        for class in 0..3 {
            let counts: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn seeded_folds_repeat() {
        let labels: Vec<usize> = (0..300).map(|i| i % 3).collect();
        let a = cv_split(&labels, FoldPolicy::Auto, 42).unwrap();
        assert_eq!(a, cv_split(&labels, FoldPolicy::Auto, 42).unwrap());
        assert_ne!(a, cv_split(&labels, FoldPolicy::Auto, 43).unwrap());
    }

    #[test]
    fn policy_parsing_and_errors() {
        assert_eq!("auto".parse::<FoldPolicy>().unwrap(), FoldPolicy::Auto);
        assert_eq!("10".parse::<FoldPolicy>().unwrap(), FoldPolicy::KFold(10));
        assert!("1".parse::<FoldPolicy>().is_err());
        assert!(cv_split(&[0, 1, 0], FoldPolicy::KFold(4), 0).is_err());
        assert_eq!(complement(5, &[1, 3]), vec![0, 2, 4]);
    }
}
