//! Ranking metrics against a naive, independently written oracle.

mod common;

use common::{oracle_ap, oracle_ranked_labels, oracle_rr, random_set};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssp_forge::eval::{
    clean_filter, evaluate, mean_average_precision, mean_reciprocal_rank, precision_at_1, select_best_answer,
    RankedCandidateSet,
};

#[test]
fn metrics_match_oracle_on_1000_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let raw: Vec<(Vec<f64>, Vec<u8>)> = (0..1000).map(|i| random_set(&mut rng, i)).collect();
    let sets: Vec<RankedCandidateSet> = raw
        .iter()
        .enumerate()
        .map(|(i, (s, l))| RankedCandidateSet::from_scores(format!("q{i}"), s, l).unwrap())
        .collect();

    let ranked: Vec<Vec<u8>> = raw.iter().map(|(s, l)| oracle_ranked_labels(s, l)).collect();
    let n = ranked.len() as f64;
    let p1 = ranked.iter().map(|r| f64::from(r[0])).sum::<f64>() / n;
    let map = ranked.iter().map(|r| oracle_ap(r)).sum::<f64>() / n;
    let mrr = ranked.iter().map(|r| oracle_rr(r)).sum::<f64>() / n;

    assert!((precision_at_1(&sets).unwrap() - p1).abs() < 1e-12);
    assert!((mean_average_precision(&sets).unwrap() - map).abs() < 1e-12);
    assert!((mean_reciprocal_rank(&sets).unwrap() - mrr).abs() < 1e-12);
}

#[test]
fn ap_of_0_1_1_is_seven_twelfths() {
    // oracle on the already-sorted label list, and the library on scores that
    // produce that order
    assert!((oracle_ap(&[0, 1, 1]) - 7.0 / 12.0).abs() < 1e-15);
    let set = RankedCandidateSet::from_scores("q", &[3.0, 2.0, 1.0], &[0, 1, 1]).unwrap();
    assert!((mean_average_precision(&[set]).unwrap() - 7.0 / 12.0).abs() < 1e-12);
}

fn mixed_set() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..20).prop_flat_map(|n| {
        (
            proptest::collection::vec(-1000.0f64..1000.0, n),
            proptest::collection::vec(0u8..=1, n),
            0..n,
            0..n - 1,
        )
            .prop_map(|(s, mut l, p, q)| {
                let q = if q >= p { q + 1 } else { q };
                l[p] = 1;
                l[q] = 0;
                (s, l)
            })
    })
}

proptest! {
    #[test]
    fn clean_filter_removes_exactly_single_label_sets(labels in proptest::collection::vec(proptest::collection::vec(0u8..=1, 1..8), 1..20)) {
        let sets: Vec<RankedCandidateSet> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let scores: Vec<f64> = (0..l.len()).map(|j| j as f64).collect();
                RankedCandidateSet::from_scores(format!("q{i}"), &scores, l).unwrap()
            })
            .collect();
        let kept = clean_filter(sets.clone());
        let expected: Vec<&RankedCandidateSet> = sets
            .iter()
            .filter(|s| s.candidates().iter().any(|c| c.label == 1) && s.candidates().iter().any(|c| c.label == 0))
            .collect();
        prop_assert_eq!(kept.iter().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn monotone_transform_changes_nothing((scores, labels) in mixed_set()) {
        let a = RankedCandidateSet::from_scores("q", &scores, &labels).unwrap();
        let t: Vec<f64> = scores.iter().map(|s| (s / 100.0).tanh() * 3.0 + 7.0).collect();
        // tanh may collapse distinct scores; only compare when the order is preserved
        let order_kept = (0..scores.len()).all(|i| (0..scores.len()).all(|j| (scores[i] < scores[j]) == (t[i] < t[j])));
        prop_assume!(order_kept);
        let b = RankedCandidateSet::from_scores("q", &t, &labels).unwrap();
        prop_assert_eq!(select_best_answer(&a), select_best_answer(&b));
        let ra = evaluate(vec![a], true).unwrap();
        let rb = evaluate(vec![b], true).unwrap();
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn p_at_1_never_exceeds_mrr((scores, labels) in mixed_set()) {
        let r = evaluate(vec![RankedCandidateSet::from_scores("q", &scores, &labels).unwrap()], true).unwrap();
        prop_assert!(r.p_at_1 <= r.mrr);
        for m in [r.p_at_1, r.map, r.mrr] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn permutation_invariant_with_distinct_scores((scores, labels) in mixed_set(), seed in any::<u64>()) {
        let mut uniq = scores.clone();
        uniq.sort_by(f64::total_cmp);
        uniq.dedup();
        prop_assume!(uniq.len() == scores.len());
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        let ps: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
        let pl: Vec<u8> = idx.iter().map(|&i| labels[i]).collect();
        let a = evaluate(vec![RankedCandidateSet::from_scores("q", &scores, &labels).unwrap()], true).unwrap();
        let b = evaluate(vec![RankedCandidateSet::from_scores("q", &ps, &pl).unwrap()], true).unwrap();
        prop_assert_eq!(a, b);
    }
}
