//! Built-in parameter presets.
//!
//! `cora-like` carries the published Cora statistics (2708 nodes, 5278
//! edges, 1433 binary attributes, 7 classes, class sizes
//! 351/217/418/818/426/298/180). The class preference mean and the
//! attribute-class correlation are synthetic stand-ins:
//!
//! * `M` has diagonal `[0.78, 0.87, 0.90, 0.83, 0.80, 0.71, 0.78]`
//!   (mean 0.81). Off-diagonal mass comes from a symmetric edge-count matrix
//!   `E[a][b] = s_a·s_b` whose row sums match each class's share of edge
//!   endpoints, so the matrix is consistent with the class sizes and the
//!   generator reproduces it.
//! * `H` gives every attribute a Zipf-like base rate (about 18 active
//!   attributes per node on average) modulated per class by log-normal
//!   factors drawn from a fixed internal seed.
//!
//! `planted` builds a simple parameterized structure for arbitrary
//! `(n, m, d, k)`: balanced classes, a preference diagonal of 0.81 with
//! uniform off-diagonals, and attributes with one "home" class each.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::features::{ClassFeatures, FeatureSet, GraphFeatures};
use crate::generator::{apportion, AttrModel, DegreeModel, GenParams};
use crate::seed::rng_for;
use crate::transforms::balanced_class_sizes;

pub const CORA_NODES: usize = 2708;
pub const CORA_EDGES: usize = 5278;
pub const CORA_ATTRS: usize = 1433;
pub const CORA_CLASSES: usize = 7;
pub const CORA_CLASS_SIZES: [usize; CORA_CLASSES] = [351, 217, 418, 818, 426, 298, 180];
pub const CORA_DIAGONAL: [f64; CORA_CLASSES] = [0.78, 0.87, 0.90, 0.83, 0.80, 0.71, 0.78];

/// Average number of active attributes per node.
const CORA_ATTRS_PER_NODE: f64 = 18.2;
/// Spread of the per-class log-normal attribute factors.
const CORA_ATTR_SIGNAL: f64 = 0.9;
const CORA_ATTR_SEED: u64 = 0x00C0_7A11;

pub const PLANTED_DIAGONAL: f64 = 0.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    CoraLike,
    Planted,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::CoraLike => "cora-like",
            Preset::Planted => "planted",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cora-like" | "cora" => Ok(Preset::CoraLike),
            "planted" => Ok(Preset::Planted),
            other => Err(Error::invalid(format!(
                "unknown preset `{other}` (expected cora-like or planted)"
            ))),
        }
    }
}

pub fn cora_like_fractions() -> Vec<f64> {
    CORA_CLASS_SIZES
        .iter()
        .map(|&s| s as f64 / CORA_NODES as f64)
        .collect()
}

/// Row-stochastic preference mean with the given diagonal whose
/// off-diagonal part is the normalized rows of a rank-one symmetric edge
/// matrix.
fn consistent_preference(fractions: &[f64], diagonal: &[f64]) -> Vec<Vec<f64>> {
    let k = fractions.len();
    // Row l needs off-diagonal edge mass r_l = (1 - diag_l)·ρ_l, realized as
    // s_l·(S - s_l) with S = Σ s. For a fixed S the smaller root is
    // s_l = (S - sqrt(S² - 4 r_l)) / 2; Σ s_l(S) - S is decreasing in S.
    let r: Vec<f64> = fractions
        .iter()
        .zip(diagonal)
        .map(|(&p, &d)| (1.0 - d) * p)
        .collect();
    let shares = |total: f64| -> Vec<f64> {
        r.iter()
            .map(|&rl| (total - (total * total - 4.0 * rl).max(0.0).sqrt()) / 2.0)
            .collect()
    };
    let r_max = r.iter().cloned().fold(0.0, f64::max);
    let mut lo = 2.0 * r_max.sqrt();
    let mut hi = 1.0 + lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shares(mid).iter().sum::<f64>() > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = shares(0.5 * (lo + hi));
    (0..k)
        .map(|a| {
            let off: Vec<f64> = (0..k).map(|b| if a == b { 0.0 } else { s[a] * s[b] }).collect();
            let off_sum: f64 = off.iter().sum();
            (0..k)
                .map(|b| {
                    if a == b {
                        diagonal[a]
                    } else {
                        (1.0 - diagonal[a]) * off[b] / off_sum
                    }
                })
                .collect()
        })
        .collect()
}

pub fn cora_like_preference_mean() -> Vec<Vec<f64>> {
    consistent_preference(&cora_like_fractions(), &CORA_DIAGONAL)
}

pub fn cora_like_attr_correlation() -> Vec<Vec<f64>> {
    let k = CORA_CLASSES;
    let raw: Vec<f64> = (0..CORA_ATTRS)
        .map(|a| 1.0 / ((a + 20) as f64).powf(0.9))
        .collect();
    let scale = CORA_ATTRS_PER_NODE / raw.iter().sum::<f64>();
    let mut rng = rng_for(&[CORA_ATTR_SEED]);
    raw.iter()
        .map(|&r| {
            let base = r * scale;
            let factors: Vec<f64> = (0..k)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (CORA_ATTR_SIGNAL * z).exp()
                })
                .collect();
            let mean = factors.iter().sum::<f64>() / k as f64;
            factors.iter().map(|f| (base * f / mean).min(1.0)).collect()
        })
        .collect()
}

pub fn cora_like_features() -> FeatureSet {
    FeatureSet::new(
        GraphFeatures {
            node_count: CORA_NODES,
            edge_count: CORA_EDGES,
            attr_count: CORA_ATTRS,
            class_count: CORA_CLASSES,
        },
        ClassFeatures {
            sizes: CORA_CLASS_SIZES.to_vec(),
            size_fractions: cora_like_fractions(),
            preference_mean: cora_like_preference_mean(),
            attr_correlation: cora_like_attr_correlation(),
        },
    )
}

/// Planted-partition features for arbitrary sizes.
pub fn planted_features(nodes: usize, edges: usize, attrs: usize, classes: usize) -> Result<FeatureSet> {
    if classes == 0 || attrs == 0 || nodes < classes {
        return Err(Error::invalid(format!(
            "planted preset needs 0 < k <= n and d > 0 (n={nodes}, d={attrs}, k={classes})"
        )));
    }
    let fractions = balanced_class_sizes(classes);
    let preference_mean = (0..classes)
        .map(|a| {
            (0..classes)
                .map(|b| match (classes, a == b) {
                    (1, _) => 1.0,
                    (_, true) => PLANTED_DIAGONAL,
                    (_, false) => (1.0 - PLANTED_DIAGONAL) / (classes - 1) as f64,
                })
                .collect()
        })
        .collect();
    let mut rng = rng_for(&[CORA_ATTR_SEED, attrs as u64, classes as u64]);
    let attr_correlation = (0..attrs)
        .map(|a| {
            let home = a % classes;
            (0..classes)
                .map(|l| if l == home { 0.2 } else { 0.02 + 0.01 * rng.random::<f64>() })
                .collect()
        })
        .collect();
    Ok(FeatureSet::new(
        GraphFeatures {
            node_count: nodes,
            edge_count: edges,
            attr_count: attrs,
            class_count: classes,
        },
        ClassFeatures {
            sizes: apportion(nodes, &fractions),
            size_fractions: fractions,
            preference_mean,
            attr_correlation,
        },
    ))
}

impl GenParams {
    /// Generation parameters that reproduce `features`.
    pub fn from_features(features: &FeatureSet, seed: u64) -> Self {
        GenParams {
            node_count: features.graph.node_count,
            target_edge_count: features.graph.edge_count,
            attr_count: features.graph.attr_count,
            class_count: features.graph.class_count,
            class_fractions: features.class.size_fractions.clone(),
            preference_mean: features.class.preference_mean.clone(),
            attr_correlation: features.class.attr_correlation.clone(),
            degree_model: DegreeModel::default(),
            attr_model: AttrModel::default(),
            seed,
        }
    }

    pub fn cora_like(seed: u64) -> Self {
        Self::from_features(&cora_like_features(), seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::diagonal_mean;
    use crate::transforms::{configure_preference_mean, mean_entry};

    #[test]
    fn cora_constants() {
        let f = cora_like_features();
        assert_eq!(
            (f.graph.node_count, f.graph.edge_count, f.graph.attr_count, f.graph.class_count),
            (2708, 5278, 1433, 7)
        );
        assert_eq!(f.class.sizes.iter().sum::<usize>(), 2708);
        assert!((f.class.size_fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cora_preference_is_stochastic_with_anchored_diagonal() {
        let m = cora_like_preference_mean();
        assert!((diagonal_mean(&m) - 0.81).abs() < 1e-12);
        for row in &m {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        // edge-count consistency: ρ_a·M[a][b] == ρ_b·M[b][a]
        let rho = cora_like_fractions();
        for a in 0..7 {
            for b in 0..7 {
                assert!((rho[a] * m[a][b] - rho[b] * m[b][a]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cora_heterophilic_diagonal() {
        let conf = configure_preference_mean(&cora_like_preference_mean(), 8.0).unwrap();
        let d = diagonal_mean(&conf);
        assert!((d - 0.03).abs() <= 0.02, "{d}");
    }

    #[test]
    fn cora_attribute_density() {
        let h = cora_like_attr_correlation();
        assert_eq!(h.len(), 1433);
        assert!(h.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));
        let per_node = mean_entry(&h) * 1433.0;
        assert!((per_node - CORA_ATTRS_PER_NODE).abs() < 0.5, "{per_node}");
    }

    #[test]
    fn planted_shapes() {
        let f = planted_features(100, 200, 10, 4).unwrap();
        assert_eq!(f.class.attr_correlation.len(), 10);
        assert_eq!(f.class.preference_mean.len(), 4);
        assert_eq!(f.class.sizes, vec![25; 4]);
        GenParams::from_features(&f, 0).validate().unwrap();
        assert!(planted_features(2, 1, 1, 3).is_err());
        let one = planted_features(5, 3, 2, 1).unwrap();
        assert_eq!(one.class.preference_mean, vec![vec![1.0]]);
    }
}
