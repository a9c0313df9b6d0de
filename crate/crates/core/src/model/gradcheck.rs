//! Central finite-difference check of the analytic gradients.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::network::{init_weights, loss_and_grad};
use super::{prepare, ModelSpec, Weights};
use crate::graph::{AttrMode, AttributeMatrix, Dataset, LabelVector, Provenance, SparseGraph};
use crate::seed::{self, rng_for};

pub const GRADCHECK_STEP: f64 = 1e-5;

/// Gradients smaller than this are compared in absolute rather than
/// relative terms; finite differences cannot resolve them below roughly
/// `ε_machine / step`.
const GRADIENT_FLOOR: f64 = 1e-3;

/// A 10-node, 6-attribute, 3-class continuous dataset on a ring with chords.
pub fn toy_dataset(seed: u64) -> Dataset {
    let n = 10;
    let d = 6;
    let mut rng = rng_for(&[seed, 0x7011]);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    edges.extend([(0, 5), (2, 7), (3, 8)]);
    let (graph, _) = SparseGraph::from_edges(n, edges).expect("toy edges");
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let mut triplets = Vec::new();
    for i in 0..n {
        for a in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            let shift = if a % 3 == labels[i] { 1.0 } else { 0.0 };
            triplets.push((i, a, z + shift + 0.01 * rng.random::<f64>()));
        }
    }
    let attributes =
        AttributeMatrix::from_triplets(n, d, AttrMode::Continuous, triplets).expect("toy attrs");
    Dataset::new(
        graph,
        attributes,
        LabelVector::new(labels, 3).expect("toy labels"),
        Provenance::External,
    )
    .expect("toy dataset")
}

/// Maximum relative error between analytic and central-difference
/// gradients of the full (regularized) loss over all nodes, with dropout
/// disabled.
pub fn gradient_check(spec: &ModelSpec, dataset: &Dataset) -> f64 {
    let mut spec = spec.clone();
    spec.dropout = 0.0;
    let input = prepare(&spec, dataset);
    let mut rng = rng_for(&[spec.seed, seed::MODEL]);
    let mut weights = init_weights(
        &spec,
        input.features.cols(),
        dataset.labels.class_count(),
        &mut rng,
    );
    // non-zero biases so their gradients are exercised away from the origin
    for layer in &mut weights.layers {
        for b in &mut layer.bias {
            *b = rng.random_range(-0.1..0.1);
        }
    }
    let targets: Vec<(usize, usize)> = (0..dataset.node_count())
        .map(|i| (i, dataset.labels.get(i)))
        .collect();
    let loss_at = |w: &Weights| loss_and_grad(w, &input, &targets, spec.weight_decay, None).0;
    let (_, analytic) = loss_and_grad(&weights, &input, &targets, spec.weight_decay, None);
    let analytic: Vec<f64> = analytic.slices().concat();

    let mut worst: f64 = 0.0;
    let mut flat_index = 0;
    let shapes: Vec<usize> = weights.slices().iter().map(|s| s.len()).collect();
    for (block, &len) in shapes.iter().enumerate() {
        for i in 0..len {
            let original = weights.slices()[block][i];
            weights.slices_mut()[block][i] = original + GRADCHECK_STEP;
            let plus = loss_at(&weights);
            weights.slices_mut()[block][i] = original - GRADCHECK_STEP;
            let minus = loss_at(&weights);
            weights.slices_mut()[block][i] = original;
            let numeric = (plus - minus) / (2.0 * GRADCHECK_STEP);
            let a = analytic[flat_index];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRADIENT_FLOOR);
            worst = worst.max(err);
            flat_index += 1;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;

    fn spec(kind: ModelKind) -> ModelSpec {
        let mut s = ModelSpec::new(kind);
        s.hidden_size = 5;
        s.weight_decay = 5e-4;
        s.seed = 3;
        s
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let data = toy_dataset(1);
        assert!(gradient_check(&spec(ModelKind::Mlp), &data) <= 1e-4);
        assert!(gradient_check(&spec(ModelKind::Gcn), &data) <= 1e-4);
        assert!(gradient_check(&spec(ModelKind::Sgc), &data) <= 1e-6);
    }

    #[test]
    fn a_wrong_gradient_is_detected() {
        // sanity: perturbing the loss scale breaks agreement
        let data = toy_dataset(2);
        let s = spec(ModelKind::Sgc);
        let input = prepare(&s, &data);
        let mut rng = rng_for(&[s.seed, seed::MODEL]);
        let w = init_weights(&s, input.features.cols(), 3, &mut rng);
        let targets: Vec<(usize, usize)> = (0..10).map(|i| (i, data.labels.get(i))).collect();
        let (_, g) = loss_and_grad(&w, &input, &targets, 0.0, None);
        let (_, g_half) = loss_and_grad(&w, &input, &targets[..5], 0.0, None);
        assert_ne!(g, g_half);
    }
}
