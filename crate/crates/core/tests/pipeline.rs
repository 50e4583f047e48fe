use std::io::Write;

use proptest::prelude::*;

use mrenyi::eval::{
    accuracy_metrics, cv_split, load_csv, midranks, parse_csv, run_benchmark, BenchmarkConfig,
    Classifier, FoldPolicy, LabelColumn,
};
use mrenyi::{select, Criterion, SelectionConfig, SigmaRule};

const TOY: &str = "\
signal,noise,flag,class
0.1,3.0,1,neg
0.2,1.0,0,neg
0.15,2.0,1,neg
0.05,0.5,0,neg
0.9,2.5,1,pos
1.1,0.7,0,pos
0.95,1.9,1,pos
1.05,0.2,0,pos
";

#[test]
fn csv_file_to_selection() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(TOY.as_bytes()).unwrap();
    let by_name = load_csv(file.path(), &LabelColumn::Name("class".into())).unwrap();
    let by_index = load_csv(file.path(), &LabelColumn::Index(-1)).unwrap();
    assert_eq!(by_name, by_index);
    assert_eq!(by_name.feature_names(), ["signal", "noise", "flag"]);
    assert_eq!(by_name.continuous_flags(), [true, true, false]);
    assert_eq!(by_name.class_names(), ["neg", "pos"]);

    for criterion in [
        Criterion::Mim,
        Criterion::Cmim,
        Criterion::matrix_mi(1.01, SigmaRule::Fixed(1.0)).unwrap(),
    ] {
        let trace = select(criterion, &by_name, 2, &SelectionConfig::default()).unwrap();
        assert_eq!(trace.selected[0], 0, "{}", criterion.name());
    }
}

#[test]
fn benchmark_on_loaded_csv() {
    let data = parse_csv(TOY.as_bytes(), &"class".parse().unwrap(), "toy").unwrap();
    let config = BenchmarkConfig::new(2, Classifier::knn3(), 1);
    let report = run_benchmark(&data, &[Criterion::Mim, Criterion::Jmi], &config).unwrap();
    assert_eq!(report.feature_counts, vec![1, 2]);
    assert_eq!(report.accuracies[0][0], 1.0);
    let json = serde_json::to_value(&report).unwrap();
    for field in [
        "dataset",
        "methods",
        "feature_counts",
        "accuracies",
        "ranks",
        "cd",
        "seed",
        "config",
    ] {
        assert!(json.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn rejects_nan_cells_with_location() {
    let err = parse_csv(
        "a,b,y\n1,2,0\nNaN,3,1\n".as_bytes(),
        &LabelColumn::Index(-1),
        "bad",
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("row") && msg.contains("a"), "{msg}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_and_stratify(labels in prop::collection::vec(0usize..3, 2..300), seed in any::<u64>()) {
        let folds = cv_split(&labels, FoldPolicy::Auto, seed).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
        for class in 0..3 {
            let counts: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == class).count()).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn midranks_sum_to_triangle_number(scores in prop::collection::vec(0u8..5, 1..12)) {
        let scores: Vec<f64> = scores.into_iter().map(f64::from).collect();
        let m = scores.len() as f64;
        let total: f64 = midranks(&scores).iter().sum();
        prop_assert!((total - m * (m + 1.0) / 2.0).abs() < 1e-12);
        prop_assert!(midranks(&scores).iter().all(|&r| (1.0..=m).contains(&r)));
    }

    #[test]
    fn balanced_test_sets_have_equal_oa_and_aa(
        per_class in 1usize..20,
        hits in prop::collection::vec(0usize..20, 3),
    ) {
        let actual: Vec<usize> = (0..3).flat_map(|c| std::iter::repeat(c).take(per_class)).collect();
        let predicted: Vec<usize> = actual
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % per_class < hits[c].min(per_class) { c } else { (c + 1) % 3 })
            .collect();
        let (oa, aa) = accuracy_metrics(&predicted, &actual).unwrap();
        prop_assert!((oa - aa).abs() <= 1e-12);
    }
}
