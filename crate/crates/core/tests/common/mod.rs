//! Helpers shared by integration test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Labels in rank order: repeatedly pick the best remaining candidate by
/// scanning for the maximum score, preferring the earliest index.
pub fn oracle_ranked_labels(scores: &[f64], labels: &[u8]) -> Vec<u8> {
    let mut taken = vec![false; scores.len()];
    let mut out = Vec::new();
    for _ in 0..scores.len() {
        let mut best: Option<usize> = None;
        for i in 0..scores.len() {
            if taken[i] {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if scores[i] > scores[b] => best = Some(i),
                _ => {}
            }
        }
        let b = best.unwrap();
        taken[b] = true;
        out.push(labels[b]);
    }
    out
}

pub fn oracle_ap(ranked: &[u8]) -> f64 {
    let total_pos = ranked.iter().filter(|&&l| l == 1).count() as f64;
    let mut sum = 0.0;
    for r in 0..ranked.len() {
        if ranked[r] == 1 {
            let pos_at_or_above = ranked[..=r].iter().filter(|&&l| l == 1).count() as f64;
            sum += pos_at_or_above / (r + 1) as f64;
        }
    }
    sum / total_pos
}

pub fn oracle_rr(ranked: &[u8]) -> f64 {
    for (r, &l) in ranked.iter().enumerate() {
        if l == 1 {
            return 1.0 / (r + 1) as f64;
        }
    }
    unreachable!("caller guarantees a positive")
}

/// Random mixed-label set with n in [2, 30]; scores drawn from a small grid so
/// ties occur.
pub fn random_set(rng: &mut ChaCha8Rng, id: usize) -> (Vec<f64>, Vec<u8>) {
    let n = rng.random_range(2..=30);
    let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
    let p = rng.random_range(0..n);
    let mut q = rng.random_range(0..n - 1);
    if q >= p {
        q += 1;
    }
    labels[p] = 1;
    labels[q] = 0;
    let scores = (0..n)
        .map(|_| {
            if id.is_multiple_of(2) {
                rng.random_range(0..8) as f64 / 8.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    (scores, labels)
}
