use std::time::Instant;

use super::network::{argmax_rows, forward, init_weights, loss_and_grad, softmax_rows, Adam};
use super::{prepare, EpochRecord, ModelInput, ModelSpec, Predictions, TrainedModel, MODEL_FILE_VERSION};
use crate::error::{Error, Result};
use crate::graph::Dataset;
use crate::harness::split::{uniform_split, Split, DEFAULT_RATIOS};
use crate::metrics::f1_macro;
use crate::seed::{self, rng_for};

fn targets(dataset: &Dataset, nodes: &[usize]) -> Vec<(usize, usize)> {
    nodes.iter().map(|&i| (i, dataset.labels.get(i))).collect()
}

fn check_split(dataset: &Dataset, split: &Split) -> Result<()> {
    if split.train.is_empty() || split.validation.is_empty() {
        return Err(Error::invalid("split needs non-empty train and validation sets"));
    }
    let n = dataset.node_count();
    if split.all().any(|i| i >= n) {
        return Err(Error::invalid("split references nodes outside the dataset"));
    }
    Ok(())
}

/// Full-batch training with early stopping on validation f1-macro. The
/// returned weights are those of the best validation epoch.
pub fn train(spec: &ModelSpec, dataset: &Dataset, split: &Split) -> Result<TrainedModel> {
    spec.validate()?;
    check_split(dataset, split)?;
    let input = prepare(spec, dataset);
    let k = dataset.labels.class_count();
    let mut rng = rng_for(&[spec.seed, seed::MODEL]);
    let mut weights = init_weights(spec, input.features.cols(), k, &mut rng);
    let mut adam = Adam::new(&weights, spec.learning_rate);
    let train_targets = targets(dataset, &split.train);
    let val_truth: Vec<usize> = split.validation.iter().map(|&i| dataset.labels.get(i)).collect();

    let mut best_weights = weights.clone();
    let mut best_score = f64::NEG_INFINITY;
    let mut best_epoch = None;
    let mut stale = 0;
    let mut history = Vec::new();
    for epoch in 0..spec.max_epochs {
        let start = Instant::now();
        let (loss, grads) = loss_and_grad(
            &weights,
            &input,
            &train_targets,
            spec.weight_decay,
            Some((&mut rng, spec.dropout)),
        );
        adam.update(&mut weights, &grads);
        let seconds = start.elapsed().as_secs_f64();
        if !loss.is_finite() {
            return Err(Error::Training(format!("loss diverged at epoch {epoch}")));
        }

        let predicted = argmax_rows(&forward(&weights, &input, None).logits);
        let val_pred: Vec<usize> = split.validation.iter().map(|&i| predicted[i]).collect();
        let score = f1_macro(&val_pred, &val_truth, k)?;
        history.push(EpochRecord {
            epoch,
            train_loss: loss,
            val_f1_macro: score,
            seconds,
        });
        if score > best_score {
            best_score = score;
            best_weights.clone_from(&weights);
            best_epoch = Some(epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= spec.patience {
                break;
            }
        }
    }
    Ok(TrainedModel {
        version: MODEL_FILE_VERSION,
        spec: spec.clone(),
        input_dim: dataset.attributes.attr_count(),
        class_count: k,
        weights: best_weights,
        history,
        best_epoch,
    })
}

/// Runs exactly `epochs` optimization steps on `train_nodes` with no
/// validation or early stopping and returns the final weights.
pub fn train_fixed_epochs(
    spec: &ModelSpec,
    dataset: &Dataset,
    train_nodes: &[usize],
    epochs: usize,
) -> Result<TrainedModel> {
    spec.validate()?;
    if train_nodes.is_empty() {
        return Err(Error::invalid("no training nodes"));
    }
    let input = prepare(spec, dataset);
    let k = dataset.labels.class_count();
    let mut rng = rng_for(&[spec.seed, seed::MODEL]);
    let mut weights = init_weights(spec, input.features.cols(), k, &mut rng);
    let mut adam = Adam::new(&weights, spec.learning_rate);
    let train_targets = targets(dataset, train_nodes);
    let mut history = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let start = Instant::now();
        let (loss, grads) = loss_and_grad(
            &weights,
            &input,
            &train_targets,
            spec.weight_decay,
            Some((&mut rng, spec.dropout)),
        );
        adam.update(&mut weights, &grads);
        history.push(EpochRecord {
            epoch,
            train_loss: loss,
            val_f1_macro: f64::NAN,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(TrainedModel {
        version: MODEL_FILE_VERSION,
        spec: spec.clone(),
        input_dim: dataset.attributes.attr_count(),
        class_count: k,
        weights,
        history,
        best_epoch: epochs.checked_sub(1),
    })
}

fn input_for(model: &TrainedModel, dataset: &Dataset) -> Result<ModelInput> {
    if dataset.attributes.attr_count() != model.input_dim {
        return Err(Error::Dimension(format!(
            "model expects {} attributes, dataset has {}",
            model.input_dim,
            dataset.attributes.attr_count()
        )));
    }
    if dataset.labels.class_count() != model.class_count {
        return Err(Error::Dimension(format!(
            "model predicts {} classes, dataset has {}",
            model.class_count,
            dataset.labels.class_count()
        )));
    }
    Ok(prepare(&model.spec, dataset))
}

/// Deterministic forward pass with dropout disabled.
pub fn predict(model: &TrainedModel, dataset: &Dataset) -> Result<Predictions> {
    let input = input_for(model, dataset)?;
    let logits = forward(&model.weights, &input, None).logits;
    let probabilities = softmax_rows(&logits);
    let labels = argmax_rows(&probabilities);
    Ok(Predictions {
        probabilities,
        labels,
    })
}

/// Regularized cross-entropy of `model` on `nodes` (dropout disabled).
pub fn training_loss(model: &TrainedModel, dataset: &Dataset, nodes: &[usize]) -> Result<f64> {
    let input = input_for(model, dataset)?;
    let (loss, _) = loss_and_grad(
        &model.weights,
        &input,
        &targets(dataset, nodes),
        model.spec.weight_decay,
        None,
    );
    Ok(loss)
}

pub const WARMUP_EPOCHS: usize = 3;
pub const TIMED_EPOCHS: usize = 20;

/// Mean wall-clock seconds per optimization step, excluding warm-up epochs.
pub fn measure_epoch_time(spec: &ModelSpec, dataset: &Dataset) -> Result<f64> {
    spec.validate()?;
    let split = uniform_split(&dataset.labels, DEFAULT_RATIOS, spec.seed)?;
    let input = prepare(spec, dataset);
    let mut rng = rng_for(&[spec.seed, seed::MODEL]);
    let mut weights = init_weights(spec, input.features.cols(), dataset.labels.class_count(), &mut rng);
    let mut adam = Adam::new(&weights, spec.learning_rate);
    let train_targets = targets(dataset, &split.train);
    let mut total = 0.0;
    for epoch in 0..WARMUP_EPOCHS + TIMED_EPOCHS {
        let start = Instant::now();
        let (_, grads) = loss_and_grad(
            &weights,
            &input,
            &train_targets,
            spec.weight_decay,
            Some((&mut rng, spec.dropout)),
        );
        adam.update(&mut weights, &grads);
        if epoch >= WARMUP_EPOCHS {
            total += start.elapsed().as_secs_f64();
        }
    }
    Ok((total / TIMED_EPOCHS as f64).max(f64::MIN_POSITIVE))
}
