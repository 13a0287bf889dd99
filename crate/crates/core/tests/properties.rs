use gradeforest::baseline::{LogisticModel, MultinomialModel};
use gradeforest::data::{
    class_counts, stratified_split, subsample_without_replacement, Dataset, FeatureKind, Schema,
    SplitRatios,
};
use gradeforest::forest::{fit_forest, ForestConfig, FeatureMode};
use gradeforest::importance::{
    decreases_for_permutation, gini_importance, permutation_importance, top_k, ImportanceMethod,
    ImportanceReport,
};
use gradeforest::tree::{best_split, gini, TreeNode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(rows: Vec<(Vec<f64>, usize)>, m: usize, k: usize, kinds: Vec<FeatureKind>) -> Dataset {
    let schema = Schema::with_kinds(
        (0..m).map(|j| format!("x{j}")).collect(),
        kinds,
        (0..k).map(|c| format!("c{c}")).collect(),
    )
    .unwrap();
    Dataset::from_rows(schema, rows).unwrap()
}

fn small_dataset() -> impl Strategy<Value = Dataset> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(m, k)| {
        let row = (prop::collection::vec(0u8..6, m), 0..k);
        (
            prop::collection::vec(row, 2..40),
            prop::collection::vec(any::<bool>(), m),
        )
            .prop_map(move |(rows, cat)| {
                let kinds = cat
                    .iter()
                    .map(|&c| if c { FeatureKind::Categorical } else { FeatureKind::Continuous })
                    .collect();
                let rows = rows
                    .into_iter()
                    .map(|(x, y)| (x.into_iter().map(f64::from).collect(), y))
                    .collect();
                dataset(rows, m, k, kinds)
            })
    })
}

fn small_forest(data: &Dataset, seed: u64) -> gradeforest::forest::Forest {
    let config = ForestConfig {
        n_trees: 7,
        sample_fraction: 0.63,
        with_replacement: false,
        feature_mode: FeatureMode::PerNodeRandom(None),
        beta: 3,
        seed,
    };
    fit_forest(data, &data.all_rows(), config).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gini_within_bounds(counts in prop::collection::vec(0usize..1000, 1..10)) {
        prop_assume!(counts.iter().sum::<usize>() > 0);
        let q = gini(&counts).unwrap();
        prop_assert!(q >= 0.0);
        prop_assert!(q <= 1.0 - 1.0 / counts.len() as f64 + 1e-15);
    }

    #[test]
    fn best_split_partitions_rows(data in small_dataset()) {
        let rows = data.all_rows();
        let features: Vec<usize> = (0..data.n_features()).collect();
        if let Some(split) = best_split(&data, &rows, &features).unwrap() {
            let left: Vec<usize> = rows.iter().copied().filter(|&r| split.condition.goes_left(data.row(r))).collect();
            prop_assert!(!left.is_empty() && left.len() < rows.len());
            let right: Vec<usize> = rows.iter().copied().filter(|r| !left.contains(r)).collect();
            let weighted = |part: &[usize]| part.len() as f64 * gini(&class_counts(&data, part)).unwrap();
            let total = weighted(&left) + weighted(&right);
            prop_assert!((total - split.total_impurity).abs() < 1e-9);
            prop_assert!(split.total_impurity <= weighted(&rows) + 1e-9);
        }
    }

    #[test]
    fn subsample_is_distinct_and_sized(n in 1usize..500, fraction in 0.01f64..=1.0, seed: u64) {
        let picked = subsample_without_replacement(n, fraction, seed).unwrap();
        let expected = ((fraction * n as f64) + 0.5).floor() as usize;
        prop_assert_eq!(picked.len(), expected.min(n));
        prop_assert!(picked.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(picked.iter().all(|&i| i < n));
        prop_assert_eq!(picked, subsample_without_replacement(n, fraction, seed).unwrap());
    }

    #[test]
    fn split_is_a_partition(labels in prop::collection::vec(0usize..3, 3..300), seed: u64, stratify: bool) {
        let rows = labels.iter().enumerate().map(|(i, &y)| (vec![i as f64], y)).collect();
        let data = dataset(rows, 1, 3, vec![FeatureKind::Continuous]);
        let s = stratified_split(&data, SplitRatios::default(), seed, stratify).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, data.all_rows());
        prop_assert_eq!(s, stratified_split(&data, SplitRatios::default(), seed, stratify).unwrap());
    }

    #[test]
    fn probabilities_are_normalized(
        coef in prop::collection::vec(-500.0f64..500.0, 6),
        x in prop::collection::vec(-10.0f64..10.0, 2),
    ) {
        let schema = Schema::new(vec!["a".into(), "b".into()], vec!["p".into(), "q".into(), "r".into()]).unwrap();
        let rows = vec![coef[0..3].to_vec(), coef[3..6].to_vec(), vec![0.0; 3]];
        let multi = MultinomialModel::new(schema, rows).unwrap();
        let p = multi.predict_proba(&x).unwrap();
        prop_assert!(p.iter().all(|v| v.is_finite() && *v >= 0.0 && *v <= 1.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let schema = Schema::new(vec!["a".into(), "b".into()], vec!["n".into(), "y".into()]).unwrap();
        let logit = LogisticModel::new(schema, coef[0..3].to_vec()).unwrap();
        let q = logit.predict_proba(&x).unwrap();
        prop_assert!(q.is_finite() && (0.0..=1.0).contains(&q));
    }

    #[test]
    fn top_k_ignores_positive_scale(
        means in prop::collection::vec(-1.0f64..1.0, 1..12),
        scale in 1e-3f64..1e3,
        k_frac in 0.0f64..1.0,
    ) {
        let m = means.len();
        let k = 1 + ((m - 1) as f64 * k_frac) as usize;
        let report = |factor: f64| ImportanceReport {
            method: ImportanceMethod::Permutation,
            per_tree: vec![means.iter().map(|v| v * factor).collect()],
            mean: means.iter().map(|v| v * factor).collect(),
            feature_names: (0..m).map(|j| format!("x{j}")).collect(),
            permutation_seed: None,
            repetitions: 1,
            warnings: Vec::new(),
        };
        let a: Vec<usize> = top_k(&report(1.0), k).unwrap().iter().map(|r| r.index).collect();
        let b: Vec<usize> = top_k(&report(scale), k).unwrap().iter().map(|r| r.index).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gini_importance_is_conserved(data in small_dataset(), seed: u64) {
        let forest = small_forest(&data, seed);
        let report = gini_importance(&forest);
        for (t, tree) in forest.trees().iter().enumerate() {
            let counts = class_counts(&data, &forest.draws()[t]);
            let n: usize = counts.iter().sum();
            let root = n as f64 * gini(&counts).unwrap();
            let leaves: f64 = tree
                .leaves()
                .iter()
                .map(|l| match l {
                    TreeNode::Leaf { proportions, n_node, .. } => {
                        *n_node as f64 * (1.0 - proportions.iter().map(|p| p * p).sum::<f64>())
                    }
                    TreeNode::Internal { .. } => unreachable!(),
                })
                .sum();
            let total: f64 = report.per_tree[t].iter().sum();
            prop_assert!((total - (root - leaves)).abs() < 1e-9 * (1.0 + root));
        }
    }

    #[test]
    fn identity_permutation_changes_nothing(data in small_dataset(), seed: u64) {
        let forest = small_forest(&data, seed);
        let rows = data.all_rows();
        let identity: Vec<usize> = (0..rows.len()).collect();
        for j in 0..data.n_features() {
            let d = decreases_for_permutation(&forest, &data, &rows, j, &identity).unwrap();
            prop_assert!(d.iter().all(|&v| v == 0.0));
        }
    }
}

/// A continuous and a binary predictor, both independent of the label, next to
/// one informative predictor. Neither noise mean should stand out from zero
/// against its spread over trees, while the Gini report carries the mixed-kind flag.
#[test]
fn mixed_kind_noise_is_indistinguishable_from_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rows: Vec<(Vec<f64>, usize)> = (0..2000)
        .map(|_| {
            let signal: f64 = rng.random_range(-1.0..1.0);
            let cont: f64 = rng.random_range(0.0..100.0);
            let binary = f64::from(rng.random_bool(0.5) as u8);
            let y = usize::from(signal + rng.random_range(-0.5..0.5) > 0.0);
            (vec![signal, cont, binary], y)
        })
        .collect();
    let data = dataset(
        rows,
        3,
        2,
        vec![FeatureKind::Continuous, FeatureKind::Continuous, FeatureKind::Categorical],
    );
    let split = stratified_split(&data, SplitRatios::new(0.5, 0.1, 0.4).unwrap(), 11, true).unwrap();
    let config = ForestConfig {
        n_trees: 100,
        sample_fraction: 0.63,
        with_replacement: false,
        feature_mode: FeatureMode::PerNodeRandom(None),
        beta: 50,
        seed: 11,
    };
    let forest = fit_forest(&data, &split.train, config).unwrap();
    let report = permutation_importance(&forest, &data, &split.test, 11).unwrap();
    let se = report.standard_errors();
    assert!(report.mean[0] > 0.05, "signal mean {}", report.mean[0]);
    for j in [1, 2] {
        assert!(
            report.mean[j].abs() <= 3.0 * se[j],
            "noise predictor {j}: mean {} se {}",
            report.mean[j],
            se[j]
        );
    }
    assert!(!gini_importance(&forest).warnings.is_empty());
    assert!(report.warnings.is_empty());
}
