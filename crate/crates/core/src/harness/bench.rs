use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{select, Grid};
use super::split::{make_split, Split, SplitMode, DEFAULT_RATIOS};
use crate::error::{Error, Result};
use crate::generator::{generate, GenParams};
use crate::graph::Dataset;
use crate::metrics::{accuracy, f1_macro};
use crate::model::{measure_epoch_time, predict, train, ModelKind, ModelSpec, TrainedModel};
use crate::seed::{self, derive_seed};
use crate::transforms::{
    balanced_class_sizes, configure_class_sizes, configure_preference_mean, mix_attr_correlation,
    uniform_attr_correlation, AxisPoint, SweepAxis,
};

fn default_graphs() -> usize {
    3
}

fn default_restarts() -> usize {
    3
}

fn default_true() -> bool {
    true
}

fn default_ratios() -> [f64; 3] {
    DEFAULT_RATIOS
}

/// Repetition and splitting settings for a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_ratios")]
    pub split_ratios: [f64; 3],
    #[serde(default)]
    pub split: SplitMode,
    #[serde(default = "default_graphs")]
    pub graphs_per_setting: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Measure per-epoch time after training. Timings are wall-clock and
    /// therefore the only non-reproducible report column.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            split_ratios: DEFAULT_RATIOS,
            split: SplitMode::Stratified,
            graphs_per_setting: default_graphs(),
            restarts: default_restarts(),
            master_seed: 0,
            record_timing: true,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.graphs_per_setting == 0 {
            return Err(Error::invalid("protocol.graphs_per_setting must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("protocol.restarts must be at least 1"));
        }
        let sum: f64 = self.split_ratios.iter().sum();
        if self.split_ratios.iter().any(|r| *r <= 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "protocol.split_ratios {:?} must be positive and sum to 1",
                self.split_ratios
            )));
        }
        Ok(())
    }

    pub fn graph_seed(&self, graph_index: usize) -> u64 {
        self.master_seed.wrapping_add(graph_index as u64)
    }

    pub fn restart_seed(&self, axis_index: usize, graph_index: usize, restart: usize) -> u64 {
        derive_seed(&[
            self.master_seed,
            seed::MODEL,
            axis_index as u64,
            graph_index as u64,
            restart as u64,
        ])
    }
}

/// One trained-and-evaluated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub axis_index: usize,
    pub axis_value: String,
    pub model: ModelKind,
    pub graph_index: usize,
    pub graph_seed: u64,
    pub restart_index: usize,
    pub restart_seed: u64,
    /// Selected hyperparameters, absent when the run failed before selection.
    pub params: Option<String>,
    pub f1_macro: f64,
    pub accuracy: f64,
    pub epochs: usize,
    pub epoch_time_s: Option<f64>,
    pub error: Option<String>,
}

impl BenchRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Mean and population standard deviation over the successful records of
/// one (axis point, model) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub axis_index: usize,
    pub axis_value: String,
    pub model: ModelKind,
    pub runs: usize,
    pub failures: usize,
    pub f1_macro_mean: f64,
    pub f1_macro_std: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub epochs_mean: f64,
    pub epoch_time_mean: Option<f64>,
    pub epoch_time_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub axis_kind: String,
    pub records: Vec<BenchRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl BenchReport {
    pub fn aggregate(&self, axis_value: &str, model: ModelKind) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.axis_value == axis_value && a.model == model)
    }
}

/// Mean and population standard deviation; `(NaN, NaN)` for no values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Generation parameters for `point` applied on top of `base`.
pub fn params_for_point(base: &GenParams, point: &AxisPoint, seed: u64) -> Result<GenParams> {
    let mut p = base.clone();
    p.seed = seed;
    match *point {
        AxisPoint::Balanced => p.class_fractions = balanced_class_sizes(p.class_count),
        AxisPoint::Alpha(a) => p.class_fractions = configure_class_sizes(a, p.class_count)?,
        AxisPoint::Beta(b) => p.preference_mean = configure_preference_mean(&p.preference_mean, b)?,
        AxisPoint::Gamma(g) => p.attr_correlation = mix_attr_correlation(&p.attr_correlation, g)?,
        AxisPoint::UniformAttributes => p.attr_correlation = uniform_attr_correlation(&p.attr_correlation),
        AxisPoint::Size { nodes, edges } => {
            p.node_count = nodes;
            p.target_edge_count = edges;
        }
        AxisPoint::Edges(m) => p.target_edge_count = m,
    }
    p.validate()?;
    Ok(p)
}

fn evaluate(model: &TrainedModel, dataset: &Dataset, split: &Split) -> Result<(f64, f64)> {
    let predicted = predict(model, dataset)?.labels;
    let pred: Vec<usize> = split.test.iter().map(|&i| predicted[i]).collect();
    let truth: Vec<usize> = split.test.iter().map(|&i| dataset.labels.get(i)).collect();
    Ok((
        f1_macro(&pred, &truth, dataset.labels.class_count())?,
        accuracy(&pred, &truth),
    ))
}

struct Task<'a> {
    axis_index: usize,
    point: &'a AxisPoint,
    graph_index: usize,
}

fn failed(task: &Task, protocol: &ProtocolConfig, model: ModelKind, restart: usize, params: Option<String>, e: &Error) -> BenchRecord {
    BenchRecord {
        axis_index: task.axis_index,
        axis_value: task.point.to_string(),
        model,
        graph_index: task.graph_index,
        graph_seed: protocol.graph_seed(task.graph_index),
        restart_index: restart,
        restart_seed: protocol.restart_seed(task.axis_index, task.graph_index, restart),
        params,
        f1_macro: f64::NAN,
        accuracy: f64::NAN,
        epochs: 0,
        epoch_time_s: None,
        error: Some(e.to_string()),
    }
}

fn build_dataset(base: &GenParams, task: &Task, protocol: &ProtocolConfig) -> Result<(Dataset, Split)> {
    let graph_seed = protocol.graph_seed(task.graph_index);
    let params = params_for_point(base, task.point, graph_seed)?;
    let dataset = generate(&params)?;
    let split = make_split(
        protocol.split,
        &dataset.labels,
        protocol.split_ratios,
        derive_seed(&[graph_seed, seed::SPLIT]),
    )?;
    Ok((dataset, split))
}

fn run_task(
    base: &GenParams,
    task: &Task,
    grids: &[Grid],
    protocol: &ProtocolConfig,
) -> Vec<BenchRecord> {
    let graph_seed = protocol.graph_seed(task.graph_index);
    let (dataset, split) = match build_dataset(base, task, protocol) {
        Ok(x) => x,
        Err(e) => {
            return grids
                .iter()
                .flat_map(|g| (0..protocol.restarts).map(move |r| (g.kind, r)))
                .map(|(kind, r)| failed(task, protocol, kind, r, None, &e))
                .collect();
        }
    };
    log::info!(
        "axis {} graph {}: {} nodes, {} edges",
        task.point,
        task.graph_index,
        dataset.node_count(),
        dataset.graph.edge_count()
    );

    let mut records = Vec::new();
    for grid in grids {
        let tuning_seed = protocol.restart_seed(task.axis_index, task.graph_index, 0);
        let selection = match select(grid, &dataset, &split, tuning_seed) {
            Ok(s) => s,
            Err(e) => {
                records.extend((0..protocol.restarts).map(|r| failed(task, protocol, grid.kind, r, None, &e)));
                continue;
            }
        };
        let params = selection.spec.describe();
        for restart in 0..protocol.restarts {
            let restart_seed = protocol.restart_seed(task.axis_index, task.graph_index, restart);
            let trained = if restart == 0 {
                Ok(selection.model.clone())
            } else {
                let spec = ModelSpec {
                    seed: restart_seed,
                    ..selection.spec.clone()
                };
                train(&spec, &dataset, &split)
            };
            let outcome = trained.and_then(|m| evaluate(&m, &dataset, &split).map(|s| (m, s)));
            records.push(match outcome {
                Ok((model, (f1, acc))) => BenchRecord {
                    axis_index: task.axis_index,
                    axis_value: task.point.to_string(),
                    model: grid.kind,
                    graph_index: task.graph_index,
                    graph_seed,
                    restart_index: restart,
                    restart_seed,
                    params: Some(params.clone()),
                    f1_macro: f1,
                    accuracy: acc,
                    epochs: model.history.len(),
                    epoch_time_s: None,
                    error: None,
                },
                Err(e) => failed(task, protocol, grid.kind, restart, Some(params.clone()), &e),
            });
        }
    }
    records
}

/// Epoch times measured one record at a time, outside the worker pool, so
/// concurrent training cannot distort them.
fn time_records(base: &GenParams, axis: &SweepAxis, protocol: &ProtocolConfig, grids: &[Grid], records: &mut [BenchRecord]) {
    let mut by_graph: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.is_ok() {
            by_graph.entry((r.axis_index, r.graph_index)).or_default().push(i);
        }
    }
    for ((axis_index, graph_index), indices) in by_graph {
        let task = Task {
            axis_index,
            point: &axis.values()[axis_index],
            graph_index,
        };
        let Ok((dataset, _)) = build_dataset(base, &task, protocol) else {
            continue;
        };
        for i in indices {
            let record = &mut records[i];
            let Some(grid) = grids.iter().find(|g| g.kind == record.model) else {
                continue;
            };
            let spec = record
                .params
                .as_deref()
                .and_then(|p| spec_from_description(grid.kind, p))
                .map(|s| ModelSpec {
                    seed: record.restart_seed,
                    ..s
                });
            if let Some(spec) = spec {
                match measure_epoch_time(&spec, &dataset) {
                    Ok(t) => record.epoch_time_s = Some(t),
                    Err(e) => log::warn!("timing failed: {e}"),
                }
            }
        }
    }
}

/// Inverse of [`ModelSpec::describe`].
pub fn spec_from_description(kind: ModelKind, text: &str) -> Option<ModelSpec> {
    let mut spec = ModelSpec::new(kind);
    for part in text.split(';') {
        let (key, value) = part.split_once('=')?;
        match key {
            "lr" => spec.learning_rate = value.parse().ok()?,
            "wd" => spec.weight_decay = value.parse().ok()?,
            "patience" => spec.patience = value.parse().ok()?,
            "epochs" => spec.max_epochs = value.parse().ok()?,
            "k" => spec.propagation_steps = value.parse().ok()?,
            "hidden" => spec.hidden_size = value.parse().ok()?,
            "dropout" => spec.dropout = value.parse().ok()?,
            _ => return None,
        }
    }
    Some(spec)
}

fn aggregate(axis: &SweepAxis, grids: &[Grid], records: &[BenchRecord]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for (axis_index, point) in axis.values().iter().enumerate() {
        for grid in grids {
            let cell: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.axis_index == axis_index && r.model == grid.kind)
                .collect();
            let ok: Vec<&&BenchRecord> = cell.iter().filter(|r| r.is_ok()).collect();
            let (f1_macro_mean, f1_macro_std) = mean_std(&ok.iter().map(|r| r.f1_macro).collect::<Vec<_>>());
            let (accuracy_mean, accuracy_std) = mean_std(&ok.iter().map(|r| r.accuracy).collect::<Vec<_>>());
            let (epochs_mean, _) = mean_std(&ok.iter().map(|r| r.epochs as f64).collect::<Vec<_>>());
            let times: Vec<f64> = ok.iter().filter_map(|r| r.epoch_time_s).collect();
            let (tm, ts) = mean_std(&times);
            out.push(Aggregate {
                axis_index,
                axis_value: point.to_string(),
                model: grid.kind,
                runs: ok.len(),
                failures: cell.len() - ok.len(),
                f1_macro_mean,
                f1_macro_std,
                accuracy_mean,
                accuracy_std,
                epochs_mean,
                epoch_time_mean: (!times.is_empty()).then_some(tm),
                epoch_time_std: (!times.is_empty()).then_some(ts),
            });
        }
    }
    out
}

/// Runs the full protocol over every point of `axis`: for each point,
/// `graphs_per_setting` graphs are generated from `base` with the point
/// applied; each model is tuned once per graph on restart 0 and then
/// trained with `restarts` seeds. Failures are recorded per record.
///
/// Tasks run on the current rayon pool; results do not depend on the
/// number of workers.
pub fn run_benchmark(
    base: &GenParams,
    axis: &SweepAxis,
    grids: &[Grid],
    protocol: &ProtocolConfig,
) -> Result<BenchReport> {
    protocol.validate()?;
    if grids.is_empty() {
        return Err(Error::invalid("no models to benchmark"));
    }
    for g in grids {
        g.points(0)?;
    }
    base.validate()?;
    let tasks: Vec<Task> = axis
        .values()
        .iter()
        .enumerate()
        .flat_map(|(axis_index, point)| {
            (0..protocol.graphs_per_setting).map(move |graph_index| Task {
                axis_index,
                point,
                graph_index,
            })
        })
        .collect();
    let per_task: Vec<Vec<BenchRecord>> = tasks
        .par_iter()
        .map(|t| run_task(base, t, grids, protocol))
        .collect();
    let mut records: Vec<BenchRecord> = per_task.into_iter().flatten().collect();
    let model_rank = |k: ModelKind| grids.iter().position(|g| g.kind == k).unwrap_or(usize::MAX);
    records.sort_by_key(|r| (r.axis_index, model_rank(r.model), r.graph_index, r.restart_index));
    if protocol.record_timing {
        time_records(base, axis, protocol, grids, &mut records);
    }
    let aggregates = aggregate(axis, grids, &records);
    Ok(BenchReport {
        axis_kind: axis.kind().as_str().to_string(),
        records,
        aggregates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::planted_features;
    use crate::transforms::AxisKind;

    fn small_grid(kind: ModelKind) -> Grid {
        let mut spec = ModelSpec::new(kind);
        spec.hidden_size = 8;
        spec.max_epochs = 30;
        spec.patience = 10;
        Grid::single(&spec)
    }

    #[test]
    fn mean_std_is_population() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert!(mean_std(&[]).0.is_nan());
    }

    #[test]
    fn description_round_trips() {
        for kind in ModelKind::ALL {
            let mut s = ModelSpec::new(kind);
            s.learning_rate = 0.002;
            s.weight_decay = 5e-6;
            assert_eq!(spec_from_description(kind, &s.describe()).unwrap(), s);
        }
        assert!(spec_from_description(ModelKind::Gcn, "lr=x").is_none());
    }

    #[test]
    fn small_sweep_layout_and_determinism() {
        let f = planted_features(120, 240, 20, 3).unwrap();
        let base = GenParams::from_features(&f, 0);
        let axis = SweepAxis::new(AxisKind::Preference, vec![AxisPoint::Beta(0.0), AxisPoint::Beta(8.0)]).unwrap();
        let grids = vec![small_grid(ModelKind::Gcn), small_grid(ModelKind::Mlp)];
        let protocol = ProtocolConfig {
            graphs_per_setting: 2,
            restarts: 2,
            master_seed: 11,
            record_timing: false,
            ..ProtocolConfig::default()
        };
        let report = run_benchmark(&base, &axis, &grids, &protocol).unwrap();
        assert_eq!(report.records.len(), 2 * 2 * 2 * 2);
        assert_eq!(report.aggregates.len(), 4);
        assert!(report.records.iter().all(|r| r.is_ok() && r.epoch_time_s.is_none()));
        assert_eq!(report.records[0].graph_seed, 11);
        assert_eq!(report.records[1].graph_seed, 11);
        assert_eq!(report.records[2].graph_seed, 12);
        assert_eq!(run_benchmark(&base, &axis, &grids, &protocol).unwrap(), report);
    }

    #[test]
    fn setup_failure_is_recorded_per_record() {
        let f = planted_features(60, 120, 10, 3).unwrap();
        let base = GenParams::from_features(&f, 0);
        let axis = SweepAxis::new(AxisKind::ClassSize, vec![AxisPoint::Alpha(0.6)]).unwrap();
        // too few nodes for a non-empty test set
        let protocol = ProtocolConfig {
            graphs_per_setting: 1,
            restarts: 2,
            record_timing: false,
            split_ratios: [0.98, 0.01, 0.01],
            ..ProtocolConfig::default()
        };
        let report = run_benchmark(&base, &axis, &[small_grid(ModelKind::Mlp)], &protocol).unwrap();
        assert_eq!(report.records.len(), 2);
        assert!(report.records.iter().all(|r| r.error.is_some()));
        assert_eq!(report.aggregates[0].failures, 2);
        assert!(report.aggregates[0].f1_macro_mean.is_nan());
    }
}
