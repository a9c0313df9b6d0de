use gnnbench::harness::{accuracy, f1_macro};
use gnnbench::seed::rng_for;
use proptest::prelude::*;
use rand::Rng;

/// Per-class F1 from explicit tp/fp/fn counts.
fn brute_force(pred: &[usize], truth: &[usize], k: usize) -> (f64, f64) {
    let mut f1 = 0.0;
    for c in 0..k {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for (&p, &t) in pred.iter().zip(truth) {
            match (p == c, t == c) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
        if tp + fp + fn_ > 0 {
            f1 += 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64;
        }
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    (f1 / k as f64, hits as f64 / truth.len() as f64)
}

#[test]
fn thousand_random_pairs_match_oracle() {
    let mut rng = rng_for(&[2024]);
    for _ in 0..1000 {
        let k = rng.random_range(2..=10);
        let n = rng.random_range(1..200);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let (f1, acc) = brute_force(&pred, &truth, k);
        assert_eq!(f1_macro(&pred, &truth, k).unwrap(), f1);
        assert_eq!(accuracy(&pred, &truth), acc);
    }
}

#[test]
fn out_of_range_label_is_an_error() {
    assert!(f1_macro(&[0, 2], &[0, 1], 2).is_err());
    assert!(f1_macro(&[0], &[0, 1], 2).is_err());
}

proptest! {
    #[test]
    fn f1_is_invariant_under_relabeling(
        pairs in prop::collection::vec((0usize..6, 0usize..6), 1..100),
        perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let sp: Vec<usize> = pred.iter().map(|&l| perm[l]).collect();
        let st: Vec<usize> = truth.iter().map(|&l| perm[l]).collect();
        let a = f1_macro(&pred, &truth, 6).unwrap();
        let b = f1_macro(&sp, &st, 6).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }
}
