//! Class features (ρ, M, H) and graph features (n, m, d, k) of a labeled
//! attributed graph.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributeMatrix, Dataset, LabelVector, SparseGraph};

pub const FEATURES_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFeatures {
    /// Node count per class.
    pub sizes: Vec<usize>,
    /// `sizes / n`.
    pub size_fractions: Vec<f64>,
    /// k×k class preference mean, row-stochastic.
    pub preference_mean: Vec<Vec<f64>>,
    /// d×k attribute-class correlation.
    pub attr_correlation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFeatures {
    pub node_count: usize,
    pub edge_count: usize,
    pub attr_count: usize,
    pub class_count: usize,
}

/// On-disk form of `features.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSet {
    pub schema_version: u32,
    pub graph: GraphFeatures,
    pub class: ClassFeatures,
}

impl FeatureSet {
    pub fn new(graph: GraphFeatures, class: ClassFeatures) -> Self {
        Self {
            schema_version: FEATURES_SCHEMA_VERSION,
            graph,
            class,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("features serialize") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let fs: FeatureSet = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        if fs.schema_version != FEATURES_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "{}: unsupported schema_version {}",
                path.display(),
                fs.schema_version
            )));
        }
        Ok(fs)
    }
}

/// Counts and fractions per class. Every class must be non-empty.
pub fn extract_class_sizes(labels: &LabelVector) -> Result<(Vec<usize>, Vec<f64>)> {
    let sizes = labels.class_sizes();
    if let Some(l) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::invalid(format!("class {l} has no nodes")));
    }
    let n = labels.len() as f64;
    let fractions = sizes.iter().map(|&s| s as f64 / n).collect();
    Ok((sizes, fractions))
}

/// `M[a][b]` is the mean, over non-isolated nodes of class `a`, of the
/// fraction of their neighbors that belong to class `b`.
pub fn extract_preference_mean(graph: &SparseGraph, labels: &LabelVector) -> Result<Vec<Vec<f64>>> {
    if graph.node_count() != labels.len() {
        return Err(Error::Dimension(format!(
            "graph has {} nodes but {} labels",
            graph.node_count(),
            labels.len()
        )));
    }
    let k = labels.class_count();
    let mut sums = vec![vec![0.0; k]; k];
    let mut counted = vec![0usize; k];
    let mut hist = vec![0usize; k];
    for i in 0..graph.node_count() {
        let nbrs = graph.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        hist.iter_mut().for_each(|h| *h = 0);
        for &j in nbrs {
            hist[labels.get(j)] += 1;
        }
        let c = labels.get(i);
        let deg = nbrs.len() as f64;
        for (s, &h) in sums[c].iter_mut().zip(&hist) {
            *s += h as f64 / deg;
        }
        counted[c] += 1;
    }
    for (l, row) in sums.iter_mut().enumerate() {
        if counted[l] == 0 {
            return Err(Error::invalid(format!(
                "class {l} has no node with a neighbor; its preference row is undefined"
            )));
        }
        let c = counted[l] as f64;
        row.iter_mut().for_each(|x| *x /= c);
    }
    Ok(sums)
}

/// `H[δ][l]` is the mean of attribute δ over nodes of class `l`.
pub fn extract_attr_correlation(
    attrs: &AttributeMatrix,
    labels: &LabelVector,
) -> Result<Vec<Vec<f64>>> {
    if attrs.node_count() != labels.len() {
        return Err(Error::Dimension(format!(
            "attributes have {} rows but {} labels",
            attrs.node_count(),
            labels.len()
        )));
    }
    let (sizes, _) = extract_class_sizes(labels)?;
    let k = labels.class_count();
    let mut h = vec![vec![0.0; k]; attrs.attr_count()];
    for (node, attr, value) in attrs.triplets() {
        h[attr][labels.get(node)] += value;
    }
    for row in &mut h {
        for (x, &s) in row.iter_mut().zip(&sizes) {
            *x /= s as f64;
        }
    }
    Ok(h)
}

pub fn extract_graph_features(dataset: &Dataset) -> GraphFeatures {
    GraphFeatures {
        node_count: dataset.node_count(),
        edge_count: dataset.graph.edge_count(),
        attr_count: dataset.attributes.attr_count(),
        class_count: dataset.labels.class_count(),
    }
}

pub fn extract_class_features(dataset: &Dataset) -> Result<ClassFeatures> {
    let (sizes, size_fractions) = extract_class_sizes(&dataset.labels)?;
    Ok(ClassFeatures {
        sizes,
        size_fractions,
        preference_mean: extract_preference_mean(&dataset.graph, &dataset.labels)?,
        attr_correlation: extract_attr_correlation(&dataset.attributes, &dataset.labels)?,
    })
}

pub fn extract(dataset: &Dataset) -> Result<FeatureSet> {
    Ok(FeatureSet::new(
        extract_graph_features(dataset),
        extract_class_features(dataset)?,
    ))
}

/// Mean of the diagonal of a square matrix.
pub fn diagonal_mean(m: &[Vec<f64>]) -> f64 {
    m.iter().enumerate().map(|(i, r)| r[i]).sum::<f64>() / m.len() as f64
}

/// Largest absolute entry-wise difference.
pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}
