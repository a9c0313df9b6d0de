//! Controlled variants of the class features: class-size imbalance (α),
//! homophily/heterophily shift (β) and attribute randomization (γ).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-9;

/// Imbalanced class sizes: the first class takes `alpha`, each middle class
/// takes `alpha` of the remaining mass and the last class takes the rest.
pub fn configure_class_sizes(alpha: f64, classes: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if classes < 2 {
        return Err(Error::invalid(format!("need at least 2 classes, got {classes}")));
    }
    let mut out = Vec::with_capacity(classes);
    // Track the unassigned mass as a product so deep tails stay positive.
    let mut remaining = 1.0;
    for l in 0..classes {
        let v = if l + 1 < classes { alpha * remaining } else { remaining };
        remaining *= 1.0 - alpha;
        out.push(v);
    }
    Ok(out)
}

pub fn balanced_class_sizes(classes: usize) -> Vec<f64> {
    vec![1.0 / classes as f64; classes]
}

/// Moves `0.1·beta` of diagonal mass onto the off-diagonals, spread evenly.
///
/// Diagonals are clamped at zero; rows where the clamp fired are then
/// renormalized so every row stays a probability distribution. Rows without
/// clamping already sum to their original total and are left untouched.
pub fn configure_preference_mean(m: &[Vec<f64>], beta: f64) -> Result<Vec<Vec<f64>>> {
    check_row_stochastic(m)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be a finite value >= 0, got {beta}")));
    }
    let k = m.len();
    if beta == 0.0 {
        return Ok(m.to_vec());
    }
    if k == 1 {
        return Err(Error::invalid(
            "beta > 0 needs at least two classes to receive off-diagonal mass",
        ));
    }
    let shift = 0.1 * beta;
    let spread = shift / (k - 1) as f64;
    let mut out = Vec::with_capacity(k);
    for (l1, row) in m.iter().enumerate() {
        let mut clamped = false;
        let mut new_row: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(l2, &v)| {
                if l1 == l2 {
                    let d = v - shift;
                    if d < 0.0 {
                        clamped = true;
                        0.0
                    } else {
                        d
                    }
                } else {
                    v + spread
                }
            })
            .collect();
        if clamped {
            let s: f64 = new_row.iter().sum();
            new_row.iter_mut().for_each(|x| *x /= s);
        }
        out.push(new_row);
    }
    Ok(out)
}

/// Global mean of all entries of `h`.
pub fn mean_entry(h: &[Vec<f64>]) -> f64 {
    let count: usize = h.iter().map(Vec::len).sum();
    if count == 0 {
        return 0.0;
    }
    h.iter().flatten().sum::<f64>() / count as f64
}

/// `(H + γ·c) / (1 + γ)` where `c` is the mean entry of `H`.
pub fn mix_attr_correlation(h: &[Vec<f64>], gamma: f64) -> Result<Vec<Vec<f64>>> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be a finite value >= 0, got {gamma}")));
    }
    let c = mean_entry(h);
    let scale = 1.0 + gamma;
    Ok(h
        .iter()
        .map(|row| row.iter().map(|&v| (v + gamma * c) / scale).collect())
        .collect())
}

/// Every entry replaced by the mean entry of `H`.
pub fn uniform_attr_correlation(h: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = mean_entry(h);
    h.iter().map(|row| vec![c; row.len()]).collect()
}

pub(crate) fn check_row_stochastic(m: &[Vec<f64>]) -> Result<()> {
    let k = m.len();
    if k == 0 {
        return Err(Error::invalid("preference matrix is empty"));
    }
    for (l, row) in m.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Dimension(format!(
                "preference matrix row {l} has {} entries, expected {k}",
                row.len()
            )));
        }
        if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::invalid(format!("preference row {l} has entries outside [0, 1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::invalid(format!("preference row {l} sums to {s}, expected 1")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    ClassSize,
    Preference,
    Attribute,
    GraphSize,
    EdgeDensity,
}

impl AxisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisKind::ClassSize => "class_size",
            AxisKind::Preference => "preference",
            AxisKind::Attribute => "attribute",
            AxisKind::GraphSize => "graph_size",
            AxisKind::EdgeDensity => "edge_density",
        }
    }

    /// Default sweep values for this axis.
    pub fn default_points(self) -> Vec<AxisPoint> {
        match self {
            AxisKind::ClassSize => vec![
                AxisPoint::Balanced,
                AxisPoint::Alpha(0.5),
                AxisPoint::Alpha(0.7),
            ],
            AxisKind::Preference => [0.0, 2.0, 4.0, 6.0, 8.0].map(AxisPoint::Beta).to_vec(),
            AxisKind::Attribute => {
                let mut v: Vec<_> = [16.0, 4.0, 1.0, 0.0].map(AxisPoint::Gamma).to_vec();
                v.push(AxisPoint::UniformAttributes);
                v
            }
            AxisKind::GraphSize => [(3000, 5000), (6000, 10000), (9000, 15000), (12000, 20000)]
                .map(|(nodes, edges)| AxisPoint::Size { nodes, edges })
                .to_vec(),
            AxisKind::EdgeDensity => [5000, 10000, 15000, 20000].map(AxisPoint::Edges).to_vec(),
        }
    }
}

impl std::str::FromStr for AxisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "class_size" => AxisKind::ClassSize,
            "preference" => AxisKind::Preference,
            "attribute" => AxisKind::Attribute,
            "graph_size" => AxisKind::GraphSize,
            "edge_density" => AxisKind::EdgeDensity,
            other => return Err(Error::invalid(format!("unknown sweep kind `{other}`"))),
        })
    }
}

/// One point on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisPoint {
    Balanced,
    Alpha(f64),
    Beta(f64),
    Gamma(f64),
    UniformAttributes,
    Size { nodes: usize, edges: usize },
    Edges(usize),
}

impl AxisPoint {
    pub fn kind(&self) -> AxisKind {
        match self {
            AxisPoint::Balanced | AxisPoint::Alpha(_) => AxisKind::ClassSize,
            AxisPoint::Beta(_) => AxisKind::Preference,
            AxisPoint::Gamma(_) | AxisPoint::UniformAttributes => AxisKind::Attribute,
            AxisPoint::Size { .. } => AxisKind::GraphSize,
            AxisPoint::Edges(_) => AxisKind::EdgeDensity,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            AxisPoint::Alpha(a) => a > 0.0 && a < 1.0,
            AxisPoint::Beta(b) => b >= 0.0 && b.is_finite(),
            AxisPoint::Gamma(g) => g >= 0.0 && g.is_finite(),
            AxisPoint::Size { nodes, edges } => nodes > 0 && edges > 0,
            AxisPoint::Edges(m) => m > 0,
            AxisPoint::Balanced | AxisPoint::UniformAttributes => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("axis value {self} is out of range")))
        }
    }
}

impl fmt::Display for AxisPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisPoint::Balanced => f.write_str("balanced"),
            AxisPoint::Alpha(v) | AxisPoint::Beta(v) | AxisPoint::Gamma(v) => write!(f, "{v}"),
            AxisPoint::UniformAttributes => f.write_str("uniform"),
            AxisPoint::Size { nodes, edges } => write!(f, "{nodes}x{edges}"),
            AxisPoint::Edges(m) => write!(f, "{m}"),
        }
    }
}

/// A single-axis sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    kind: AxisKind,
    values: Vec<AxisPoint>,
}

impl SweepAxis {
    pub fn new(kind: AxisKind, values: Vec<AxisPoint>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sweep has no values"));
        }
        for v in &values {
            if v.kind() != kind {
                return Err(Error::invalid(format!(
                    "value {v} does not belong to a {} sweep",
                    kind.as_str()
                )));
            }
            v.validate()?;
        }
        Ok(Self { kind, values })
    }

    pub fn with_defaults(kind: AxisKind) -> Self {
        Self {
            kind,
            values: kind.default_points(),
        }
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn values(&self) -> &[AxisPoint] {
        &self.values
    }
}
