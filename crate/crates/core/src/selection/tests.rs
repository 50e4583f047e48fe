use approx::assert_abs_diff_eq;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::kernel::{gram_from_column, KernelSpec};
use crate::spectral::{gram_entropy, mutual_information};

fn dataset(columns: &[Vec<f64>], labels: &[usize]) -> Dataset {
    let n = labels.len();
    let x = Array2::from_shape_fn((n, columns.len()), |(i, j)| columns[j][i]);
    Dataset::from_features("toy", x, labels.to_vec()).unwrap()
}

fn sequential() -> SelectionConfig {
    SelectionConfig {
        parallel: false,
        ..SelectionConfig::default()
    }
}

/// Plug-in MI of two discrete sequences by direct table lookup.
fn brute_mi(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let mut mi = 0.0;
    for &a in x.iter().collect::<std::collections::BTreeSet<_>>() {
        for &b in y.iter().collect::<std::collections::BTreeSet<_>>() {
            let pxy = x.iter().zip(y).filter(|(&u, &v)| u == a && v == b).count() as f64 / n;
            if pxy > 0.0 {
                let px = x.iter().filter(|&&u| u == a).count() as f64 / n;
                let py = y.iter().filter(|&&v| v == b).count() as f64 / n;
                mi += pxy * (pxy / (px * py)).log2();
            }
        }
    }
    mi
}

fn as_f64(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&c| c as f64).collect()
}

#[test]
fn mim_perfect_copy_scores_one_bit() {
    let y = [0, 1, 0, 1, 0, 1, 0, 1];
    let probe = [0, 0, 1, 1, 0, 0, 1, 1];
    let data = dataset(&[as_f64(&probe), as_f64(&y)], &y);
    let c = sequential();
    assert_abs_diff_eq!(
        score_candidate(Criterion::Mim, 1, &[], &data, &c).unwrap(),
        1.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        score_candidate(Criterion::Mim, 0, &[], &data, &c).unwrap(),
        0.0,
        epsilon = 1e-12
    );
    assert_eq!(
        select(Criterion::Mim, &data, 1, &c).unwrap().selected,
        vec![1]
    );
}

fn noisy_toy(seed: u64) -> (Dataset, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 60;
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let signal = 2;
    let columns: Vec<Vec<f64>> = (0..5)
        .map(|j| {
            if j == signal {
                as_f64(&y)
            } else {
                (0..n).map(|_| rng.random::<f64>()).collect()
            }
        })
        .collect();
    (dataset(&columns, &y), signal)
}

#[test]
fn every_criterion_finds_the_label_copy_first() {
    let (data, signal) = noisy_toy(3);
    for criterion in Criterion::all_defaults() {
        let trace = select(criterion, &data, 1, &sequential()).unwrap();
        assert_eq!(trace.selected, vec![signal], "{}", criterion.name());
    }
}

#[test]
fn cmim_and_jmi_start_like_mim() {
    let (data, _) = noisy_toy(8);
    let mim = select(Criterion::Mim, &data, 1, &sequential()).unwrap();
    for criterion in [Criterion::Cmim, Criterion::Jmi, Criterion::Mrmr] {
        let t = select(criterion, &data, 1, &sequential()).unwrap();
        assert_eq!(t.step_scores[0], mim.step_scores[0]);
    }
}

#[test]
fn full_selection_is_a_permutation() {
    let (data, _) = noisy_toy(5);
    for criterion in Criterion::all_defaults() {
        let mut s = select(criterion, &data, 5, &SelectionConfig::default())
            .unwrap()
            .selected;
        s.sort_unstable();
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
    }
}

#[test]
fn winning_score_is_the_lowest_index_maximum() {
    let (data, _) = noisy_toy(6);
    for criterion in Criterion::all_defaults() {
        let t = select(criterion, &data, 4, &SelectionConfig::default()).unwrap();
        for (step, scores) in t.step_scores.iter().enumerate() {
            let max = scores
                .iter()
                .map(|s| s.score)
                .fold(f64::NEG_INFINITY, f64::max);
            let first = scores.iter().find(|s| s.score == max).unwrap();
            assert_eq!(first.feature, t.selected[step]);
            assert_eq!(t.objective_values[step], max);
            // Scaling every score by a positive constant keeps the winner.
            let scaled = scores
                .iter()
                .map(|s| s.score * 3.7)
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(
                scores
                    .iter()
                    .find(|s| s.score * 3.7 == scaled)
                    .unwrap()
                    .feature,
                t.selected[step]
            );
        }
    }
}

#[test]
fn ties_go_to_the_lowest_index() {
    let y = [0, 1, 0, 1, 0, 1];
    let data = dataset(&[vec![1.0; 6], vec![1.0; 6], as_f64(&y), as_f64(&y)], &y);
    let t = select(Criterion::Mim, &data, 2, &sequential()).unwrap();
    assert_eq!(t.selected, vec![2, 3]);
}

#[test]
fn selection_is_deterministic_across_parallelism() {
    let (data, _) = noisy_toy(9);
    for criterion in Criterion::all_defaults() {
        let a = select(criterion, &data, 3, &SelectionConfig::default()).unwrap();
        let b = select(criterion, &data, 3, &sequential()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn matrix_mi_first_step_is_bivariate_mi() {
    let (data, _) = noisy_toy(2);
    let criterion = Criterion::matrix_mi(1.01, SigmaRule::Fixed(1.0)).unwrap();
    let config = SelectionConfig {
        standardize: false,
        ..sequential()
    };
    let order = EntropyOrder::new(1.01).unwrap();
    let b = label_gram::<f64>(data.labels()).unwrap();
    for j in 0..data.n_features() {
        let a = gram_from_column(&data.column(j), &KernelSpec::rbf(1.0).unwrap()).unwrap();
        let expected = mutual_information(&a, &b, order).unwrap().bits;
        let got = score_candidate(criterion, j, &[], &data, &config).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-10);
    }
}

#[test]
fn matrix_mi_score_matches_direct_multivariate_mi() {
    let (data, _) = noisy_toy(4);
    let criterion = Criterion::matrix_mi(2.0, SigmaRule::Fixed(0.7)).unwrap();
    let config = SelectionConfig {
        standardize: false,
        ..sequential()
    };
    let order = EntropyOrder::new(2.0).unwrap();
    let kernel = KernelSpec::rbf(0.7).unwrap();
    let grams: Vec<_> = (0..5)
        .map(|j| gram_from_column(&data.column(j), &kernel).unwrap())
        .collect();
    let b = label_gram::<f64>(data.labels()).unwrap();
    let got = score_candidate(criterion, 4, &[1, 0, 3], &data, &config).unwrap();
    let expected =
        crate::spectral::multivariate_mi(&b, &[&grams[1], &grams[0], &grams[3], &grams[4]], order)
            .unwrap()
            .bits;
    assert_abs_diff_eq!(got, expected, epsilon = 1e-10);
}

#[test]
fn matrix_mi_objective_is_nondecreasing() {
    for seed in 0..4 {
        let (data, _) = noisy_toy(seed);
        let t = select(
            Criterion::matrix_mi(1.01, SigmaRule::Fixed(1.0)).unwrap(),
            &data,
            5,
            &SelectionConfig::default(),
        )
        .unwrap();
        for w in t.objective_values.windows(2) {
            assert!(w[1] >= w[0] - 1e-8, "{:?}", t.objective_values);
        }
    }
}

#[test]
fn matrix_mi_without_resident_grams_gives_the_same_trace() {
    let (data, _) = noisy_toy(12);
    let criterion = Criterion::matrix_mi(1.01, SigmaRule::Silverman).unwrap();
    let cached = select(criterion, &data, 3, &SelectionConfig::default()).unwrap();
    let lean = SelectionConfig {
        memory_budget: 0,
        ..SelectionConfig::default()
    };
    assert_eq!(cached, select(criterion, &data, 3, &lean).unwrap());
}

#[test]
fn single_precision_selects_like_double() {
    let (data, _) = noisy_toy(1);
    let criterion = Criterion::matrix_mi(1.01, SigmaRule::Fixed(1.0)).unwrap();
    let a = select_with_precision::<f64>(criterion, &data, 3, &SelectionConfig::default()).unwrap();
    let b = select_with_precision::<f32>(criterion, &data, 3, &SelectionConfig::default()).unwrap();
    assert_eq!(a.selected, b.selected);
    for (x, y) in a.objective_values.iter().zip(&b.objective_values) {
        assert_abs_diff_eq!(x, y, epsilon = 1e-3);
    }
}

#[test]
fn jmi_second_step_matches_brute_force_pair_mi() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 40;
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
    let cols: Vec<Vec<usize>> = (0..4)
        .map(|_| (0..n).map(|_| rng.random_range(0..3)).collect())
        .collect();
    let data = dataset(&cols.iter().map(|c| as_f64(c)).collect::<Vec<_>>(), &y);
    let t = select(Criterion::Jmi, &data, 2, &sequential()).unwrap();
    let first = t.selected[0];
    for s in &t.step_scores[1] {
        let paired: Vec<usize> = cols[s.feature]
            .iter()
            .zip(&cols[first])
            .map(|(a, b)| a * 10 + b)
            .collect();
        assert_abs_diff_eq!(s.score, brute_mi(&paired, &y), epsilon = 1e-12);
    }
}

#[test]
fn mrmr_penalizes_a_copy_of_the_selected_feature() {
    // X0 drives Y; X1 copies X0; X2 is independent of X0 and as relevant.
    let x0 = [0, 0, 1, 1, 0, 0, 1, 1];
    let x2 = [0, 1, 0, 1, 0, 1, 0, 1];
    let y: Vec<usize> = x0.iter().zip(&x2).map(|(a, b)| a | b).collect();
    let data = dataset(&[as_f64(&x0), as_f64(&x0), as_f64(&x2)], &y);
    let c = sequential();
    let copy = score_candidate(Criterion::Mrmr, 1, &[0], &data, &c).unwrap();
    let fresh = score_candidate(Criterion::Mrmr, 2, &[0], &data, &c).unwrap();
    let h0 = brute_mi(&x0, &x0);
    assert_abs_diff_eq!(copy, brute_mi(&x0, &y) - h0, epsilon = 1e-12);
    assert_abs_diff_eq!(
        fresh,
        brute_mi(&x2, &y) - brute_mi(&x2, &x0),
        epsilon = 1e-12
    );
    assert!(copy <= fresh);
}

#[test]
fn discrete_criteria_match_their_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 50;
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let cols: Vec<Vec<usize>> = (0..4)
        .map(|_| (0..n).map(|_| rng.random_range(0..3)).collect())
        .collect();
    let data = dataset(&cols.iter().map(|c| as_f64(c)).collect::<Vec<_>>(), &y);
    let selected = [2, 0];
    let cand = 3;
    let x = &cols[cand];
    // I(X;Z|Y) and I(X;Y|Z) via the identity I(X;Z|W) = I(X;(Z,W)) − I(X;W).
    let pair =
        |a: &[usize], b: &[usize]| a.iter().zip(b).map(|(u, v)| u * 10 + v).collect::<Vec<_>>();
    let cmi = |a: &[usize], b: &[usize], w: &[usize]| brute_mi(a, &pair(b, w)) - brute_mi(a, w);
    let rel = brute_mi(x, &y);
    let red: f64 = selected.iter().map(|&l| brute_mi(x, &cols[l])).sum();
    let cred: f64 = selected.iter().map(|&l| cmi(x, &cols[l], &y)).sum();
    let c = sequential();
    let score = |crit| score_candidate(crit, cand, &selected, &data, &c).unwrap();
    assert_abs_diff_eq!(score(Criterion::Mim), rel, epsilon = 1e-12);
    assert_abs_diff_eq!(
        score(Criterion::mifs(0.5).unwrap()),
        rel - 0.5 * red,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(score(Criterion::Fou), rel - (red - cred), epsilon = 1e-12);
    assert_abs_diff_eq!(score(Criterion::Mrmr), rel - red / 2.0, epsilon = 1e-12);
    let cmim = selected
        .iter()
        .map(|&l| cmi(x, &y, &cols[l]))
        .fold(f64::INFINITY, f64::min);
    assert_abs_diff_eq!(score(Criterion::Cmim), cmim.max(0.0), epsilon = 1e-12);
}

#[test]
fn label_gram_examples() {
    let order = EntropyOrder::new(2.0).unwrap();
    let same = label_gram::<f64>(&[3, 3, 3, 3]).unwrap();
    assert!(same.matrix().iter().all(|&v| v == 0.25));
    assert_abs_diff_eq!(gram_entropy(&same, order).unwrap(), 0.0, epsilon = 1e-12);
    let distinct = label_gram::<f64>(&[0, 1, 2, 3, 4]).unwrap();
    assert_abs_diff_eq!(
        gram_entropy(&distinct, order).unwrap(),
        5f64.log2(),
        epsilon = 1e-12
    );
    let blocks = label_gram::<f64>(&[0, 0, 1, 1]).unwrap();
    let s = crate::spectral::spectrum(&blocks).unwrap();
    for (v, e) in s.values().iter().zip([0.5, 0.5, 0.0, 0.0]) {
        assert_abs_diff_eq!(*v, e, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(gram_entropy(&blocks, order).unwrap(), 1.0, epsilon = 1e-12);
    assert!(label_gram::<f64>(&[0]).is_err());
}

#[test]
fn input_errors() {
    let (data, _) = noisy_toy(0);
    let c = SelectionConfig::default();
    let err = select(Criterion::Mim, &data, 6, &c).unwrap_err();
    assert!(err.to_string().contains("d = 5"), "{err}");
    assert!(select(Criterion::Mim, &data, 0, &c).is_err());
    assert!(score_candidate(Criterion::Mim, 1, &[1], &data, &c).is_err());
    assert!(score_candidate(Criterion::Mim, 9, &[], &data, &c).is_err());
    assert!(Criterion::mifs(-1.0).is_err());
    assert!(Criterion::matrix_mi(0.0, SigmaRule::Fixed(1.0)).is_err());
    assert!(Criterion::matrix_mi(2.0, SigmaRule::Fixed(0.0)).is_err());
    assert!(select(Criterion::Mifs { beta: f64::NAN }, &data, 1, &c).is_err());
    let mut selector = GreedySelector::new(Criterion::Mim, &data, &c).unwrap();
    for _ in 0..5 {
        selector.step().unwrap();
    }
    assert!(selector.step().is_err());
}
