use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::split::Split;
use crate::error::{Error, Result};
use crate::graph::Dataset;
use crate::metrics::f1_macro;
use crate::model::{predict, train, ModelKind, ModelSpec, TrainedModel};

/// Hyperparameter grid for one model kind. Points are enumerated with
/// weight decay varying slowest, then learning rate, patience, hidden
/// size, dropout and propagation steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub kind: ModelKind,
    pub weight_decay: Vec<f64>,
    pub learning_rate: Vec<f64>,
    pub patience: Vec<usize>,
    pub hidden_size: Vec<usize>,
    pub dropout: Vec<f64>,
    pub propagation_steps: Vec<usize>,
    pub max_epochs: usize,
}

const WEIGHT_DECAYS: [f64; 4] = [0.0, 5e-6, 5e-5, 5e-4];

impl Grid {
    pub fn default_for(kind: ModelKind) -> Self {
        let base = ModelSpec::new(kind);
        match kind {
            ModelKind::Mlp | ModelKind::Gcn => Grid {
                kind,
                weight_decay: WEIGHT_DECAYS.to_vec(),
                learning_rate: vec![0.002, 0.01, 0.05],
                patience: vec![40, 100],
                hidden_size: if kind == ModelKind::Gcn { vec![16, 32, 64] } else { vec![64] },
                dropout: vec![0.5],
                propagation_steps: vec![base.propagation_steps],
                max_epochs: base.max_epochs,
            },
            ModelKind::Sgc => Grid {
                kind,
                weight_decay: WEIGHT_DECAYS.to_vec(),
                learning_rate: vec![0.2],
                patience: vec![40],
                hidden_size: vec![base.hidden_size],
                dropout: vec![0.0],
                propagation_steps: vec![1, 2, 3],
                max_epochs: base.max_epochs,
            },
        }
    }

    /// A grid containing exactly `spec`.
    pub fn single(spec: &ModelSpec) -> Self {
        Grid {
            kind: spec.kind,
            weight_decay: vec![spec.weight_decay],
            learning_rate: vec![spec.learning_rate],
            patience: vec![spec.patience],
            hidden_size: vec![spec.hidden_size],
            dropout: vec![spec.dropout],
            propagation_steps: vec![spec.propagation_steps],
            max_epochs: spec.max_epochs,
        }
    }

    /// Every grid point in declaration order, each validated.
    pub fn points(&self, seed: u64) -> Result<Vec<ModelSpec>> {
        let mut out = Vec::new();
        for &weight_decay in &self.weight_decay {
            for &learning_rate in &self.learning_rate {
                for &patience in &self.patience {
                    for &hidden_size in &self.hidden_size {
                        for &dropout in &self.dropout {
                            for &propagation_steps in &self.propagation_steps {
                                let spec = ModelSpec {
                                    kind: self.kind,
                                    hidden_size,
                                    dropout,
                                    propagation_steps,
                                    learning_rate,
                                    weight_decay,
                                    patience,
                                    max_epochs: self.max_epochs,
                                    seed,
                                };
                                spec.validate()?;
                                out.push(spec);
                            }
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::invalid(format!("{} grid is empty", self.kind)));
        }
        Ok(out)
    }

    pub fn size(&self) -> usize {
        self.weight_decay.len()
            * self.learning_rate.len()
            * self.patience.len()
            * self.hidden_size.len()
            * self.dropout.len()
            * self.propagation_steps.len()
    }
}

/// Validation f1-macro of a trained model.
pub(crate) fn validation_score(model: &TrainedModel, dataset: &Dataset, split: &Split) -> Result<f64> {
    let predicted = predict(model, dataset)?.labels;
    let pred: Vec<usize> = split.validation.iter().map(|&i| predicted[i]).collect();
    let truth: Vec<usize> = split.validation.iter().map(|&i| dataset.labels.get(i)).collect();
    f1_macro(&pred, &truth, dataset.labels.class_count())
}

pub(crate) struct Selection {
    pub spec: ModelSpec,
    pub score: f64,
    pub model: TrainedModel,
}

/// Trains every grid point and keeps the best by validation f1-macro.
/// Points whose training fails are skipped; if all fail the first error
/// is returned.
pub(crate) fn select(grid: &Grid, dataset: &Dataset, split: &Split, seed: u64) -> Result<Selection> {
    let points = grid.points(seed)?;
    let outcomes: Vec<Result<(TrainedModel, f64)>> = points
        .par_iter()
        .map(|spec| {
            let model = train(spec, dataset, split)?;
            let score = validation_score(&model, dataset, split)?;
            Ok((model, score))
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut first_error = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok((_, score)) => {
                let better = match best {
                    None => true,
                    Some((b, bs)) => prefer(&points[i], *score, &points[b], bs),
                };
                if better {
                    best = Some((i, *score));
                }
            }
            Err(e) => {
                log::warn!("{} grid point {} failed: {e}", grid.kind, points[i].describe());
                if first_error.is_none() {
                    first_error = Some(i);
                }
            }
        }
    }
    match best {
        Some((i, score)) => {
            let (model, _) = outcomes.into_iter().nth(i).unwrap()?;
            Ok(Selection {
                spec: points[i].clone(),
                score,
                model,
            })
        }
        None => match outcomes.into_iter().nth(first_error.unwrap_or(0)) {
            Some(Err(e)) => Err(e),
            _ => Err(Error::Training("grid search produced no model".into())),
        },
    }
}

/// Whether candidate `a` (later in declaration order) beats incumbent `b`.
fn prefer(a: &ModelSpec, a_score: f64, b: &ModelSpec, b_score: f64) -> bool {
    if a_score != b_score {
        return a_score > b_score;
    }
    if a.weight_decay != b.weight_decay {
        return a.weight_decay < b.weight_decay;
    }
    a.learning_rate < b.learning_rate
}

/// Returns the grid point with the highest validation f1-macro and its
/// score. Ties go to lower weight decay, then lower learning rate, then
/// the earlier point.
pub fn grid_search(
    kind: ModelKind,
    grid: &Grid,
    dataset: &Dataset,
    split: &Split,
    seed: u64,
) -> Result<(ModelSpec, f64)> {
    if grid.kind != kind {
        return Err(Error::invalid(format!(
            "grid is for {} but {kind} was requested",
            grid.kind
        )));
    }
    let s = select(grid, dataset, split, seed)?;
    Ok((s.spec, s.score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::split::{stratified_split, DEFAULT_RATIOS};
    use crate::preset::planted_features;
    use crate::generator::{generate, GenParams};

    fn toy() -> Dataset {
        let f = planted_features(150, 300, 30, 3).unwrap();
        generate(&GenParams::from_features(&f, 5)).unwrap()
    }

    #[test]
    fn default_grid_sizes() {
        assert_eq!(Grid::default_for(ModelKind::Mlp).size(), 24);
        assert_eq!(Grid::default_for(ModelKind::Gcn).size(), 72);
        assert_eq!(Grid::default_for(ModelKind::Sgc).size(), 12);
        assert_eq!(Grid::default_for(ModelKind::Gcn).points(0).unwrap().len(), 72);
    }

    #[test]
    fn tie_break_order() {
        let mut a = ModelSpec::new(ModelKind::Mlp);
        let mut b = a.clone();
        a.weight_decay = 0.0;
        b.weight_decay = 5e-4;
        assert!(prefer(&a, 0.5, &b, 0.5));
        assert!(!prefer(&b, 0.5, &a, 0.5));
        assert!(prefer(&b, 0.6, &a, 0.5));
        b.weight_decay = 0.0;
        a.learning_rate = 0.002;
        assert!(prefer(&a, 0.5, &b, 0.5));
        // identical keys: the incumbent (earlier point) stays
        assert!(!prefer(&a, 0.5, &a.clone(), 0.5));
    }

    #[test]
    fn degenerate_learning_rate_loses() {
        let data = toy();
        let split = stratified_split(&data.labels, DEFAULT_RATIOS, 1).unwrap();
        let mut grid = Grid::default_for(ModelKind::Mlp);
        grid.weight_decay = vec![5e-4];
        grid.patience = vec![40];
        grid.learning_rate = vec![1e-12, 0.01];
        grid.hidden_size = vec![16];
        let (spec, score) = grid_search(ModelKind::Mlp, &grid, &data, &split, 3).unwrap();
        assert_eq!(spec.learning_rate, 0.01);
        assert!(score > 0.5);
        assert_eq!(grid_search(ModelKind::Mlp, &grid, &data, &split, 3).unwrap().0, spec);
    }

    #[test]
    fn singleton_grid() {
        let data = toy();
        let split = stratified_split(&data.labels, DEFAULT_RATIOS, 1).unwrap();
        let mut spec = ModelSpec::new(ModelKind::Sgc);
        spec.seed = 8;
        let (chosen, _) = grid_search(ModelKind::Sgc, &Grid::single(&spec), &data, &split, 8).unwrap();
        assert_eq!(chosen, spec);
        assert!(grid_search(ModelKind::Gcn, &Grid::single(&spec), &data, &split, 8).is_err());
    }
}
