mod oracle;

use proptest::prelude::*;
use rand::Rng;
use sme_core::{auc_pr, ScoredSet};

fn auc(scores: &[f64], labels: &[bool]) -> f64 {
    auc_pr(&ScoredSet::new(scores.to_vec(), labels.to_vec()).unwrap()).unwrap()
}

#[test]
fn matches_threshold_enumeration_exactly() {
    for seed in 0..1000 {
        let (scores, labels) = oracle::random_scored(seed);
        assert_eq!(
            auc(&scores, &labels),
            oracle::auc_by_thresholds(&scores, &labels),
            "seed {seed}"
        );
    }
}

#[test]
fn small_example_matches_oracle() {
    let (s, l) = ([3.0, 2.0, 1.0], [true, false, true]);
    assert_eq!(auc(&s, &l), oracle::auc_by_thresholds(&s, &l));
}

#[test]
fn random_ranker_tracks_prevalence() {
    let mut r = oracle::rng(2024);
    let n = 10_000;
    let scores: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
    let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let value = auc(&scores, &labels);
    assert!((value - 0.5).abs() <= 0.02, "{value}");
}

#[test]
fn duplicating_records_keeps_auc() {
    for seed in 0..50 {
        let (s, l) = oracle::random_scored(seed);
        let s2: Vec<f64> = s.iter().chain(&s).copied().collect();
        let l2: Vec<bool> = l.iter().chain(&l).copied().collect();
        assert!((auc(&s, &l) - auc(&s2, &l2)).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn strictly_increasing_transform_is_invisible(
        seed in 0u64..10_000,
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let (s, l) = oracle::random_scored(seed);
        let t: Vec<f64> = s.iter().map(|x| (scale * x + shift).exp()).collect();
        prop_assert_eq!(auc(&s, &l), auc(&t, &l));
    }
}
