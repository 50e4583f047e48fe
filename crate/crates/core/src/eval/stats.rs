use crate::error::{invalid_input, invalid_param, Result};

/// Critical values `q_0.05` of the Nemenyi test for 2..=10 methods
/// (studentized range at infinite degrees of freedom divided by √2).
pub const NEMENYI_Q05: [f64; 9] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
];

/// `(overall accuracy, average per-class accuracy)`. The average runs over
/// classes present in `actual`.
pub fn accuracy_metrics(predicted: &[usize], actual: &[usize]) -> Result<(f64, f64)> {
    if predicted.len() != actual.len() {
        return Err(crate::Error::DimensionMismatch(
            predicted.len(),
            actual.len(),
        ));
    }
    if actual.is_empty() {
        return Err(invalid_input("no samples to score"));
    }
    let classes = actual.iter().copied().max().unwrap_or(0) + 1;
    let mut total = vec![0usize; classes];
    let mut hit = vec![0usize; classes];
    for (&p, &a) in predicted.iter().zip(actual) {
        total[a] += 1;
        if p == a {
            hit[a] += 1;
        }
    }
    let overall = hit.iter().sum::<usize>() as f64 / actual.len() as f64;
    let present: Vec<f64> = total
        .iter()
        .zip(&hit)
        .filter(|(&t, _)| t > 0)
        .map(|(&t, &h)| h as f64 / t as f64)
        .collect();
    let average = present.iter().sum::<f64>() / present.len() as f64;
    Ok((overall, average))
}

/// Ranks of one column of scores (higher is better, rank 1 best), with
/// midranks for ties.
pub fn midranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Average rank of each method over feature counts.
/// `table[m][c]` is method `m`'s accuracy at feature count `c`.
pub fn rank_methods(table: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = table.len();
    let counts = table.first().map_or(0, Vec::len);
    if m == 0 || counts == 0 {
        return Err(invalid_input("rank table is empty"));
    }
    if table.iter().any(|row| row.len() != counts) {
        return Err(invalid_input("rank table rows differ in length"));
    }
    let mut avg = vec![0.0; m];
    for c in 0..counts {
        let column: Vec<f64> = table.iter().map(|row| row[c]).collect();
        for (a, r) in avg.iter_mut().zip(midranks(&column)) {
            *a += r;
        }
    }
    avg.iter_mut().for_each(|a| *a /= counts as f64);
    Ok(avg)
}

/// Nemenyi critical difference at significance 0.05.
pub fn nemenyi_cd(methods: usize, datasets: usize) -> Result<f64> {
    if !(2..=NEMENYI_Q05.len() + 1).contains(&methods) {
        return Err(invalid_param(format!(
            "Nemenyi table covers 2 to 10 methods, got {methods}"
        )));
    }
    if datasets == 0 {
        return Err(invalid_param("Nemenyi test needs at least one dataset"));
    }
    let k = methods as f64;
    Ok(NEMENYI_Q05[methods - 2] * (k * (k + 1.0) / (6.0 * datasets as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};

    #[test]
    fn metrics_examples() {
        assert_eq!(
            accuracy_metrics(&[0, 1, 1], &[0, 1, 1]).unwrap(),
            (1.0, 1.0)
        );
        let actual: Vec<usize> = (0..20).map(|i| i / 10).collect();
        let mut pred = actual.clone();
        pred[0] = 1;
        for p in pred.iter_mut().skip(10).take(9) {
            *p = 0;
        }
        let (oa, aa) = accuracy_metrics(&pred, &actual).unwrap();
        assert_abs_diff_eq!(oa, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(aa, 0.5, epsilon = 1e-12);
        let actual = [0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        let (oa, aa) = accuracy_metrics(&[0; 10], &actual).unwrap();
        assert_abs_diff_eq!(oa, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(aa, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(
            rank_methods(&[vec![0.9, 0.8], vec![0.7, 0.6]]).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(
            rank_methods(&[vec![0.5], vec![0.5], vec![0.5], vec![0.5]]).unwrap(),
            vec![2.5; 4]
        );
        assert_eq!(
            rank_methods(&[vec![0.9], vec![0.8], vec![0.8]]).unwrap(),
            vec![1.0, 2.5, 2.5]
        );
        assert!(rank_methods(&[vec![0.9], vec![]]).is_err());
    }

    #[test]
    fn midrank_rows_sum_to_triangle_number() {
        let scores = [0.3, 0.3, 0.9, 0.1, 0.9, 0.9, 0.5];
        let m = scores.len() as f64;
        assert_abs_diff_eq!(
            midranks(&scores).iter().sum::<f64>(),
            m * (m + 1.0) / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cd_scaling() {
        assert_abs_diff_eq!(nemenyi_cd(2, 4).unwrap(), 1.960 * 0.5, epsilon = 1e-12);
        let a = nemenyi_cd(7, 8).unwrap();
        assert_abs_diff_eq!(a / nemenyi_cd(7, 16).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        assert!(nemenyi_cd(7, 1_000_000).unwrap() < 0.01);
        assert!(
            nemenyi_cd(11, 3).is_err() && nemenyi_cd(1, 3).is_err() && nemenyi_cd(3, 0).is_err()
        );
        // 7 methods on 8 datasets: a CD a bit over 3 rank units.
        assert!((3.0..3.4).contains(&a));
    }

    /// P(range of `m` iid standard normals ≤ w), by trapezoidal quadrature.
    fn range_cdf(m: usize, w: f64) -> f64 {
        let z = Normal::new(0.0, 1.0).unwrap();
        let (lo, hi, steps) = (-9.0, 9.0, 6000);
        let h = (hi - lo) / steps as f64;
        (0..=steps)
            .map(|i| {
                let x = lo + i as f64 * h;
                let f = m as f64 * z.pdf(x) * (z.cdf(x + w) - z.cdf(x)).powi(m as i32 - 1);
                if i == 0 || i == steps {
                    f / 2.0
                } else {
                    f
                }
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn q_constants_match_studentized_range_quantiles() {
        for (i, &q) in NEMENYI_Q05.iter().enumerate() {
            let m = i + 2;
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..80 {
                let mid = (lo + hi) / 2.0;
                if range_cdf(m, mid) < 0.95 {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            assert_abs_diff_eq!(lo / 2f64.sqrt(), q, epsilon = 1.5e-3);
        }
    }
}
