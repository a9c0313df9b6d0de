//! Run configuration: a versioned JSON file whose keys can be overridden
//! by command-line flags. Precedence is flag, then file, then default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::generator::{apportion, AttrModel, DegreeModel, GenParams};
use crate::harness::{Grid, ProtocolConfig};
use crate::model::ModelKind;
use crate::preset::{cora_like_features, planted_features, Preset};
use crate::transforms::{
    configure_class_sizes, configure_preference_mean, mix_attr_correlation,
    uniform_attr_correlation, AxisKind, AxisPoint, SweepAxis,
};

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_OUT: &str = "out";

pub const PLANTED_DEFAULT_NODES: usize = 3000;
pub const PLANTED_DEFAULT_EDGES: usize = 5000;
pub const PLANTED_DEFAULT_ATTRS: usize = 500;
pub const PLANTED_DEFAULT_CLASSES: usize = 5;

fn config_version() -> u32 {
    CONFIG_VERSION
}

/// Feature transforms applied before generation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Replace the attribute-class correlation by its global mean.
    #[serde(default)]
    pub uniform_attributes: bool,
}

impl TransformConfig {
    pub fn is_identity(&self) -> bool {
        self.alpha.is_none() && self.beta.is_none() && self.gamma.is_none() && !self.uniform_attributes
    }
}

/// Sweep values are numbers, or the strings `balanced` (class size),
/// `uniform` (attribute) and `NxM` / `[N, M]` (graph size).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: AxisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Value>>,
}

/// Partial grid; missing keys take the model's default grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_decay: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_size: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropout: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagation_steps: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<usize>,
}

impl GridConfig {
    pub fn resolve(&self, kind: ModelKind) -> Grid {
        let mut g = Grid::default_for(kind);
        if let Some(v) = &self.weight_decay {
            g.weight_decay = v.clone();
        }
        if let Some(v) = &self.learning_rate {
            g.learning_rate = v.clone();
        }
        if let Some(v) = &self.patience {
            g.patience = v.clone();
        }
        if let Some(v) = &self.hidden_size {
            g.hidden_size = v.clone();
        }
        if let Some(v) = &self.dropout {
            g.dropout = v.clone();
        }
        if let Some(v) = &self.propagation_steps {
            g.propagation_steps = v.clone();
        }
        if let Some(v) = self.max_epochs {
            g.max_epochs = v;
        }
        g
    }

    fn from_grid(g: &Grid) -> Self {
        GridConfig {
            weight_decay: Some(g.weight_decay.clone()),
            learning_rate: Some(g.learning_rate.clone()),
            patience: Some(g.patience.clone()),
            hidden_size: Some(g.hidden_size.clone()),
            dropout: Some(g.dropout.clone()),
            propagation_steps: Some(g.propagation_steps.clone()),
            max_epochs: Some(g.max_epochs),
        }
    }
}

/// Contents of a config file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "config_version")]
    pub version: u32,
    /// `cora-like` (default) or `planted`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// A `features.json` to generate from, instead of a preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<PathBuf>,
    /// Explicit generation parameters, instead of a preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GenParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attrs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    /// `powerlaw`, `powerlaw:<exponent>` or `uniform`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_model: Option<String>,
    /// `bernoulli`, `gaussian` or `gaussian:<sigma>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attr_model: Option<String>,
    #[serde(default, skip_serializing_if = "TransformConfig::is_identity")]
    pub transform: TransformConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<ModelKind>>,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub grids: BTreeMap<ModelKind, GridConfig>,
    /// Worker threads; 0 or absent means all available cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Json {
            path: origin.into(),
            source: e,
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::invalid(format!(
                "{}: key `version`: unsupported config version {} (expected {CONFIG_VERSION})",
                origin.display(),
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialize") + "\n"
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn workers(&self) -> usize {
        match self.workers {
            Some(w) if w > 0 => w,
            _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn model_kinds(&self) -> Vec<ModelKind> {
        self.models.clone().unwrap_or_else(|| ModelKind::ALL.to_vec())
    }

    pub fn grids(&self) -> Vec<Grid> {
        self.model_kinds()
            .into_iter()
            .map(|k| self.grids.get(&k).cloned().unwrap_or_default().resolve(k))
            .collect()
    }

    pub fn sweep(&self) -> Result<Option<SweepAxis>> {
        let Some(s) = &self.sweep else {
            return Ok(None);
        };
        let axis = match &s.values {
            None => SweepAxis::with_defaults(s.kind),
            Some(values) => {
                let points = values
                    .iter()
                    .map(|v| parse_axis_point(s.kind, v))
                    .collect::<Result<Vec<_>>>()?;
                SweepAxis::new(s.kind, points)?
            }
        };
        Ok(Some(axis))
    }

    fn preset(&self) -> Result<Preset> {
        self.preset.as_deref().unwrap_or("cora-like").parse()
    }

    /// Base features before transforms, from exactly one of `params`,
    /// `features` or `preset`.
    fn base_features(&self) -> Result<Option<FeatureSet>> {
        let sources = [self.params.is_some(), self.features.is_some(), self.preset.is_some()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(Error::invalid(
                "keys `preset`, `features` and `params` are mutually exclusive",
            ));
        }
        if self.params.is_some() {
            return Ok(None);
        }
        if let Some(path) = &self.features {
            return FeatureSet::load(path).map(Some);
        }
        let f = match self.preset()? {
            Preset::CoraLike => {
                let f = cora_like_features();
                for (key, value, fixed) in [
                    ("attrs", self.attrs, f.graph.attr_count),
                    ("classes", self.classes, f.graph.class_count),
                ] {
                    if value.is_some_and(|v| v != fixed) {
                        return Err(Error::invalid(format!(
                            "key `{key}`: the cora-like preset has fixed {key} = {fixed}; use the planted preset"
                        )));
                    }
                }
                f
            }
            Preset::Planted => planted_features(
                self.nodes.unwrap_or(PLANTED_DEFAULT_NODES),
                self.edges.unwrap_or(PLANTED_DEFAULT_EDGES),
                self.attrs.unwrap_or(PLANTED_DEFAULT_ATTRS),
                self.classes.unwrap_or(PLANTED_DEFAULT_CLASSES),
            )?,
        };
        Ok(Some(f))
    }

    /// Generation parameters with overrides and transforms applied.
    pub fn gen_params(&self) -> Result<GenParams> {
        let mut p = match self.base_features()? {
            Some(f) => GenParams::from_features(&apply_transform(&f, &self.transform)?, 0),
            None => {
                let mut p = self.params.clone().unwrap();
                let f = FeatureSet::new(
                    crate::features::GraphFeatures {
                        node_count: p.node_count,
                        edge_count: p.target_edge_count,
                        attr_count: p.attr_count,
                        class_count: p.class_count,
                    },
                    crate::features::ClassFeatures {
                        sizes: apportion(p.node_count, &p.class_fractions),
                        size_fractions: p.class_fractions.clone(),
                        preference_mean: p.preference_mean.clone(),
                        attr_correlation: p.attr_correlation.clone(),
                    },
                );
                let t = apply_transform(&f, &self.transform)?;
                p.class_fractions = t.class.size_fractions;
                p.preference_mean = t.class.preference_mean;
                p.attr_correlation = t.class.attr_correlation;
                for (key, value, fixed) in [
                    ("attrs", self.attrs, p.attr_count),
                    ("classes", self.classes, p.class_count),
                ] {
                    if value.is_some_and(|v| v != fixed) {
                        return Err(Error::invalid(format!(
                            "key `{key}` conflicts with params.{key} = {fixed}"
                        )));
                    }
                }
                p
            }
        };
        if let Some(n) = self.nodes {
            p.node_count = n;
        }
        if let Some(m) = self.edges {
            p.target_edge_count = m;
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(d) = &self.degree_model {
            p.degree_model = d
                .parse::<DegreeModel>()
                .map_err(|e| Error::invalid(format!("key `degree_model`: {e}")))?;
        }
        if let Some(a) = &self.attr_model {
            p.attr_model = a
                .parse::<AttrModel>()
                .map_err(|e| Error::invalid(format!("key `attr_model`: {e}")))?;
        }
        p.validate()?;
        Ok(p)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        self.gen_params()?;
        self.sweep()?;
        self.protocol.validate()?;
        for g in self.grids() {
            g.points(0)?;
        }
        for kind in self.grids.keys() {
            if !self.model_kinds().contains(kind) {
                log::warn!("grid for {kind} is configured but {kind} is not in `models`");
            }
        }
        Ok(())
    }

    /// The configuration with every default filled in, suitable for an
    /// exact rerun.
    pub fn resolved(&self) -> Result<RunConfig> {
        self.validate()?;
        let mut r = self.clone();
        r.version = CONFIG_VERSION;
        if r.params.is_none() && r.features.is_none() {
            let preset = self.preset()?;
            r.preset = Some(preset.name().to_string());
            let p = self.gen_params()?;
            r.nodes = Some(p.node_count);
            r.edges = Some(p.target_edge_count);
            r.attrs = Some(p.attr_count);
            r.classes = Some(p.class_count);
        }
        let p = self.gen_params()?;
        r.seed = Some(p.seed);
        r.degree_model = Some(degree_model_name(p.degree_model));
        r.attr_model = Some(attr_model_name(p.attr_model));
        r.models = Some(self.model_kinds());
        r.grids = self
            .grids()
            .iter()
            .map(|g| (g.kind, GridConfig::from_grid(g)))
            .collect();
        if let Some(axis) = self.sweep()? {
            r.sweep = Some(SweepConfig {
                kind: axis.kind(),
                values: Some(axis.values().iter().map(axis_point_value).collect()),
            });
        }
        r.workers = Some(self.workers());
        r.out = Some(self.out_dir());
        Ok(r)
    }
}

pub fn degree_model_name(m: DegreeModel) -> String {
    match m {
        DegreeModel::Uniform => "uniform".into(),
        DegreeModel::Powerlaw { exponent } => format!("powerlaw:{exponent}"),
    }
}

pub fn attr_model_name(m: AttrModel) -> String {
    match m {
        AttrModel::Bernoulli => "bernoulli".into(),
        AttrModel::Gaussian { sigma } => format!("gaussian:{sigma}"),
    }
}

fn axis_point_value(p: &AxisPoint) -> Value {
    match *p {
        AxisPoint::Alpha(v) | AxisPoint::Beta(v) | AxisPoint::Gamma(v) => Value::from(v),
        AxisPoint::Edges(m) => Value::from(m),
        AxisPoint::Balanced | AxisPoint::UniformAttributes | AxisPoint::Size { .. } => {
            Value::from(p.to_string())
        }
    }
}

/// Parses one sweep value of the given axis.
pub fn parse_axis_point(kind: AxisKind, v: &Value) -> Result<AxisPoint> {
    let bad = || {
        Error::invalid(format!(
            "key `sweep.values`: `{v}` is not a valid {} value",
            kind.as_str()
        ))
    };
    let number = || v.as_f64().ok_or_else(bad);
    let point = match kind {
        AxisKind::ClassSize => match v.as_str() {
            Some("balanced") => AxisPoint::Balanced,
            Some(_) => return Err(bad()),
            None => AxisPoint::Alpha(number()?),
        },
        AxisKind::Preference => AxisPoint::Beta(number()?),
        AxisKind::Attribute => match v.as_str() {
            Some("uniform") => AxisPoint::UniformAttributes,
            Some(_) => return Err(bad()),
            None => AxisPoint::Gamma(number()?),
        },
        AxisKind::GraphSize => {
            let (nodes, edges) = match v {
                Value::String(s) => {
                    let (a, b) = s.split_once('x').ok_or_else(bad)?;
                    (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
                }
                Value::Array(a) if a.len() == 2 => (
                    a[0].as_u64().ok_or_else(bad)? as usize,
                    a[1].as_u64().ok_or_else(bad)? as usize,
                ),
                _ => return Err(bad()),
            };
            AxisPoint::Size { nodes, edges }
        }
        AxisKind::EdgeDensity => AxisPoint::Edges(v.as_u64().ok_or_else(bad)? as usize),
    };
    Ok(point)
}

/// Applies the configured α, β, γ and uniform-attribute transforms.
pub fn apply_transform(features: &FeatureSet, t: &TransformConfig) -> Result<FeatureSet> {
    if t.gamma.is_some() && t.uniform_attributes {
        return Err(Error::invalid("`gamma` and `uniform_attributes` are mutually exclusive"));
    }
    let mut out = features.clone();
    if let Some(alpha) = t.alpha {
        out.class.size_fractions = configure_class_sizes(alpha, out.graph.class_count)?;
        out.class.sizes = apportion(out.graph.node_count, &out.class.size_fractions);
    }
    if let Some(beta) = t.beta {
        out.class.preference_mean = configure_preference_mean(&out.class.preference_mean, beta)?;
    }
    if let Some(gamma) = t.gamma {
        out.class.attr_correlation = mix_attr_correlation(&out.class.attr_correlation, gamma)?;
    }
    if t.uniform_attributes {
        out.class.attr_correlation = uniform_attr_correlation(&out.class.attr_correlation);
    }
    Ok(out)
}
