//! Classification metrics.

use crate::error::{Error, Result};

/// `counts[t][p]`: nodes of true class `t` predicted as `p`.
pub fn confusion_matrix(predicted: &[usize], truth: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if predicted.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    let mut counts = vec![vec![0usize; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        if p >= k || t >= k {
            return Err(Error::invalid(format!("label pair ({t}, {p}) outside 0..{k}")));
        }
        counts[t][p] += 1;
    }
    Ok(counts)
}

/// Unweighted mean of per-class F1 over all `k` classes. A class that is
/// neither present nor predicted contributes 0.
pub fn f1_macro(predicted: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    let cm = confusion_matrix(predicted, truth, k)?;
    if k == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for c in 0..k {
        let tp = cm[c][c] as f64;
        let actual: usize = cm[c].iter().sum();
        let predicted: usize = cm.iter().map(|row| row[c]).sum();
        let denom = (actual + predicted) as f64;
        // F1 = 2·tp / (2·tp + fp + fn) = 2·tp / (|actual| + |predicted|)
        if denom > 0.0 {
            total += 2.0 * tp / denom;
        }
    }
    Ok(total / k as f64)
}

/// Fraction of exact matches; 0 for empty input.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    debug_assert_eq!(predicted.len(), truth.len());
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / truth.len() as f64
}
