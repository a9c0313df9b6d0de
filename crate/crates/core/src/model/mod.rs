//! Node classifiers: a graph-agnostic MLP, SGC (logistic regression on
//! propagated features) and a two-layer GCN, all with hand-written
//! gradients.

mod gradcheck;
mod network;
mod train;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{normalized_adjacency, AttributeMatrix, Dataset, SparseGraph};
use crate::linalg::{CsrMatrix, Dense};

pub use gradcheck::{gradient_check, toy_dataset, GRADCHECK_STEP};
pub use train::{measure_epoch_time, predict, train, train_fixed_epochs, training_loss};

pub const MODEL_FILE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlp,
    Sgc,
    Gcn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mlp, ModelKind::Sgc, ModelKind::Gcn];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Sgc => "sgc",
            ModelKind::Gcn => "gcn",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mlp" => Ok(ModelKind::Mlp),
            "sgc" => Ok(ModelKind::Sgc),
            "gcn" => Ok(ModelKind::Gcn),
            other => Err(Error::invalid(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden_size: usize,
    pub dropout: f64,
    /// SGC only.
    pub propagation_steps: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Mlp | ModelKind::Gcn => Self {
                kind,
                hidden_size: 64,
                dropout: 0.5,
                propagation_steps: 2,
                learning_rate: 0.01,
                weight_decay: 5e-4,
                patience: 100,
                max_epochs: 200,
                seed: 0,
            },
            ModelKind::Sgc => Self {
                kind,
                hidden_size: 1,
                dropout: 0.0,
                propagation_steps: 2,
                learning_rate: 0.2,
                weight_decay: 5e-5,
                patience: 40,
                max_epochs: 100,
                seed: 0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_size == 0 {
            return Err(Error::invalid("hidden_size must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if self.kind == ModelKind::Sgc && self.propagation_steps == 0 {
            return Err(Error::invalid("SGC needs at least one propagation step"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::invalid("weight_decay must be non-negative"));
        }
        if self.patience == 0 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        Ok(())
    }

    /// Compact `key=value;...` description for reports.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "lr={};wd={};patience={};epochs={}",
            self.learning_rate, self.weight_decay, self.patience, self.max_epochs
        );
        match self.kind {
            ModelKind::Sgc => s.push_str(&format!(";k={}", self.propagation_steps)),
            _ => s.push_str(&format!(";hidden={};dropout={}", self.hidden_size, self.dropout)),
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weight: Dense,
    pub bias: Vec<f64>,
}

/// One layer for SGC, two for MLP and GCN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub layers: Vec<Layer>,
}

impl Weights {
    pub fn zeros_like(&self) -> Self {
        Weights {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weight: Dense::zeros(l.weight.rows(), l.weight.cols()),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.as_slice().len() + l.bias.len())
            .sum()
    }

    pub(crate) fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weight.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub(crate) fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weight.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    /// `Σ ||W||²` over weight matrices (biases excluded).
    pub(crate) fn weight_norm_sq(&self) -> f64 {
        self.layers.iter().map(|l| l.weight.frobenius_sq()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_f1_macro: f64,
    /// Wall time of the optimization step (forward, backward, update).
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub spec: ModelSpec,
    pub input_dim: usize,
    pub class_count: usize,
    pub weights: Weights,
    pub history: Vec<EpochRecord>,
    /// Epoch whose weights were kept; `None` when no epoch ran.
    pub best_epoch: Option<usize>,
}

impl TrainedModel {
    pub fn mean_epoch_seconds(&self) -> Option<f64> {
        if self.history.is_empty() {
            None
        } else {
            Some(self.history.iter().map(|h| h.seconds).sum::<f64>() / self.history.len() as f64)
        }
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).expect("model serialize");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: TrainedModel = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        if m.version != MODEL_FILE_VERSION {
            return Err(Error::invalid(format!("unsupported model file version {}", m.version)));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    /// n×k, rows sum to 1.
    pub probabilities: Dense,
    pub labels: Vec<usize>,
}

/// `Â^K X`; `K = 0` returns `X` unchanged.
pub fn propagate(graph: &SparseGraph, attrs: &AttributeMatrix, steps: usize) -> CsrMatrix {
    let mut out = attrs.as_csr().clone();
    if steps == 0 {
        return out;
    }
    let adj = normalized_adjacency(graph);
    for _ in 0..steps {
        out = adj.matmul_sparse(&out);
    }
    out
}

/// Model inputs after any graph preprocessing.
pub(crate) struct ModelInput {
    pub features: CsrMatrix,
    /// `Â` for GCN layers.
    pub adjacency: Option<CsrMatrix>,
}

pub(crate) fn prepare(spec: &ModelSpec, dataset: &Dataset) -> ModelInput {
    match spec.kind {
        ModelKind::Mlp => ModelInput {
            features: dataset.attributes.as_csr().clone(),
            adjacency: None,
        },
        ModelKind::Sgc => ModelInput {
            features: propagate(&dataset.graph, &dataset.attributes, spec.propagation_steps),
            adjacency: None,
        },
        ModelKind::Gcn => ModelInput {
            features: dataset.attributes.as_csr().clone(),
            adjacency: Some(normalized_adjacency(&dataset.graph)),
        },
    }
}
