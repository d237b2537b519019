use std::collections::BTreeSet;

use proptest::prelude::*;

use tspipe::bench::*;
use tspipe::learners::*;
use tspipe::synth::gaussian_clusters;
use tspipe::{Column, FeatureTable};

/// Mean F1 from an explicit confusion matrix over the union of labels.
fn fscore_oracle(actual: &[String], predicted: &[String]) -> f64 {
    let labels: Vec<&String> = actual
        .iter()
        .chain(predicted)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = labels.len();
    let idx = |s: &String| labels.iter().position(|l| *l == s).unwrap();
    let mut cm = vec![vec![0usize; k]; k];
    for (a, p) in actual.iter().zip(predicted) {
        cm[idx(a)][idx(p)] += 1;
    }
    let mut total = 0.0;
    let mut classes = 0;
    for (c, row) in cm.iter().enumerate() {
        let support: usize = row.iter().sum();
        if support == 0 {
            continue;
        }
        classes += 1;
        let tp = row[c] as f64;
        let predicted_c: usize = (0..k).map(|r| cm[r][c]).sum();
        let p = if predicted_c == 0 { 0.0 } else { tp / predicted_c as f64 };
        let r = tp / support as f64;
        total += if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    }
    total / classes as f64
}

fn labels(n: usize) -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
    (1usize..=7).prop_flat_map(move |k| {
        let one = prop::collection::vec((0..k).prop_map(|c| format!("k{c}")), n);
        (one.clone(), one)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fscore_matches_confusion_oracle((a, p) in (1usize..60).prop_flat_map(labels)) {
        prop_assert_eq!(mean_fscore(&a, &p).unwrap(), fscore_oracle(&a, &p));
        let acc = accuracy(&a, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
    }

    #[test]
    fn holdout_partitions(n in 2usize..300, f in 0.01f64..0.99, seed in any::<u64>()) {
        let (train, test) = holdout(n, f, seed).unwrap();
        let expected = ((n as f64 * f).round() as usize).clamp(1, n - 1);
        prop_assert_eq!(test.len(), expected);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn holdout_seeds_differ() {
    let splits: BTreeSet<Vec<usize>> = (0..100).map(|s| holdout(50, 0.2, s).unwrap().1).collect();
    assert!(splits.len() >= 95);
}

fn registry(seed: u64) -> Vec<(String, LearnerSpec)> {
    vec![
        ("forest".into(), LearnerSpec::Forest(ForestConfig::with_trees(20, seed))),
        (
            "tree".into(),
            LearnerSpec::Tree(TreeConfig {
                prune_purity: 0.9,
                ..Default::default()
            }),
        ),
        ("majority".into(), LearnerSpec::Majority),
    ]
}

#[test]
fn parallel_and_sequential_reports_agree() {
    for cfg in 0..10u64 {
        let data = gaussian_clusters(cfg, 2 + (cfg as usize % 3), 15, 3, 2.5);
        let plan = TrialPlan::new(
            1 + cfg as usize % 3,
            0.2 + 0.05 * (cfg % 4) as f64,
            SeedRule::Mixed(cfg),
        );
        let a = run_benchmark(&registry(cfg), &data, &plan, Metric::MeanFscore, true).unwrap();
        let b = run_benchmark(&registry(cfg), &data, &plan, Metric::MeanFscore, false).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.windows(2).all(|w| w[0].mean >= w[1].mean));
        assert!(a
            .rows
            .iter()
            .all(|r| (0.0..=1.0).contains(&r.mean) && r.n <= plan.trials));
    }
}

#[test]
fn strong_model_beats_baseline() {
    let data = gaussian_clusters(1, 3, 20, 3, 8.0);
    let report = run_benchmark(&registry(1), &data, &TrialPlan::default(), Metric::Accuracy, true).unwrap();
    assert_ne!(report.rows[0].model, "majority");
    assert_eq!(report.rows.last().unwrap().model, "majority");
}

#[test]
fn single_trial_has_zero_std() {
    let data = gaussian_clusters(2, 2, 10, 2, 4.0);
    let plan = TrialPlan::new(1, 0.2, SeedRule::TimesThree);
    let report = run_benchmark(&registry(2)[..1], &data, &plan, Metric::Accuracy, false).unwrap();
    assert_eq!((report.rows[0].std, report.rows[0].n), (0.0, 1));
}

#[test]
fn failing_cells_are_recorded() {
    // an all-missing column makes the column imputer fail on every trial
    let data = gaussian_clusters(2, 2, 10, 2, 4.0);
    let blank = FeatureTable::new(vec!["blank".into()], vec![Column::Numeric(vec![None; 20])], None).unwrap();
    let data = data
        .without_labels()
        .hconcat(&blank)
        .unwrap()
        .with_labels(data.labels().map(<[String]>::to_vec))
        .unwrap();
    let plan = TrialPlan::new(2, 0.2, SeedRule::TimesThree);
    let report = run_benchmark(&registry(2), &data, &plan, Metric::Accuracy, true).unwrap();
    assert!(report.rows.iter().all(|r| r.n == 0 && r.mean.is_nan()));
    assert_eq!(report.failures.len(), 6);
    assert!(report.to_csv().contains("forest,NaN,0,0"));
}

#[test]
fn benchmark_needs_labels_and_models() {
    let data = gaussian_clusters(2, 2, 10, 2, 4.0);
    let plan = TrialPlan::default();
    assert!(run_benchmark(&[], &data, &plan, Metric::Accuracy, false).is_err());
    assert!(matches!(
        run_benchmark(&registry(0), &data.without_labels(), &plan, Metric::Accuracy, false),
        Err(tspipe::Error::MissingLabels)
    ));
}
