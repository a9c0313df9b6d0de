//! Attributed graph generation from class features (ρ, M, H) and graph
//! features (n, m, d, k).
//!
//! The procedure:
//!
//! 1. class counts are the largest-remainder apportionment of `n·ρ`, shuffled
//!    over node ids;
//! 2. every node gets an expected degree (truncated power law or constant),
//!    rescaled so the degrees sum to `2m`;
//! 3. the `m` edge proposals are apportioned over nodes in proportion to their
//!    expected degree. Each proposal picks a target class from the node's row
//!    of `M`, then a target node inside that class with probability
//!    proportional to expected degree. Self-loops and duplicate proposals are
//!    dropped, and the resulting deficit is redrawn with fresh streams for up
//!    to [`TOPUP_ROUNDS`] rounds;
//! 4. attributes are drawn independently per entry from `H[δ][class]`.
//!
//! When `M` is consistent with the class degree masses (`D_a·M[a][b] = D_b·M[b][a]`)
//! every neighbor of a class-`a` node is in class `b` with probability `M[a][b]`,
//! so the extracted preference mean matches the input.
//!
//! Random streams are keyed by (seed, stage, node) so the output is a pure
//! function of the parameters regardless of thread scheduling.

use rand::Rng;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttrMode, AttributeMatrix, Dataset, LabelVector, Provenance, SparseGraph};
use crate::linalg::CsrMatrix;
use crate::seed::{self, rng_for};
use crate::transforms::check_row_stochastic;

pub const DEFAULT_POWERLAW_EXPONENT: f64 = 2.5;
pub const DEFAULT_GAUSSIAN_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeModel {
    Powerlaw { exponent: f64 },
    Uniform,
}

impl Default for DegreeModel {
    fn default() -> Self {
        DegreeModel::Powerlaw {
            exponent: DEFAULT_POWERLAW_EXPONENT,
        }
    }
}

impl std::str::FromStr for DegreeModel {
    type Err = Error;

    /// `uniform`, `powerlaw` or `powerlaw:<exponent>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "uniform" => Ok(DegreeModel::Uniform),
            None if s == "powerlaw" => Ok(DegreeModel::default()),
            Some(("powerlaw", e)) => {
                let exponent: f64 = e
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad power-law exponent `{e}`")))?;
                Ok(DegreeModel::Powerlaw { exponent })
            }
            _ => Err(Error::invalid(format!("unknown degree model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrModel {
    #[default]
    Bernoulli,
    Gaussian { sigma: f64 },
}

impl std::str::FromStr for AttrModel {
    type Err = Error;

    /// `bernoulli`, `gaussian` or `gaussian:<sigma>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "bernoulli" => Ok(AttrModel::Bernoulli),
            None if s == "gaussian" => Ok(AttrModel::Gaussian {
                sigma: DEFAULT_GAUSSIAN_SIGMA,
            }),
            Some(("gaussian", v)) => {
                let sigma: f64 = v
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad gaussian sigma `{v}`")))?;
                Ok(AttrModel::Gaussian { sigma })
            }
            _ => Err(Error::invalid(format!("unknown attribute model `{s}`"))),
        }
    }
}

/// Everything [`generate`] needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    pub node_count: usize,
    pub target_edge_count: usize,
    pub attr_count: usize,
    pub class_count: usize,
    pub class_fractions: Vec<f64>,
    /// k×k, row-stochastic.
    pub preference_mean: Vec<Vec<f64>>,
    /// d×k.
    pub attr_correlation: Vec<Vec<f64>>,
    #[serde(default)]
    pub degree_model: DegreeModel,
    #[serde(default)]
    pub attr_model: AttrModel,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let k = self.class_count;
        if k == 0 {
            return Err(Error::invalid("class_count must be positive"));
        }
        if self.node_count < k {
            return Err(Error::invalid(format!(
                "node_count {} is smaller than class_count {k}",
                self.node_count
            )));
        }
        if self.target_edge_count == 0 {
            return Err(Error::invalid("target_edge_count must be at least 1"));
        }
        if self.attr_count == 0 {
            return Err(Error::invalid("attr_count must be positive"));
        }
        validate_fractions(&self.class_fractions, k)?;
        if self.preference_mean.len() != k {
            return Err(Error::Dimension(format!(
                "preference_mean has {} rows, expected k={k}",
                self.preference_mean.len()
            )));
        }
        check_row_stochastic(&self.preference_mean)?;
        if self.attr_correlation.len() != self.attr_count {
            return Err(Error::Dimension(format!(
                "attr_correlation has {} rows, expected d={}",
                self.attr_correlation.len(),
                self.attr_count
            )));
        }
        if let Some(r) = self.attr_correlation.iter().position(|r| r.len() != k) {
            return Err(Error::Dimension(format!(
                "attr_correlation row {r} has {} columns, expected k={k}",
                self.attr_correlation[r].len()
            )));
        }
        if self.attr_correlation.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("attr_correlation has non-finite entries"));
        }
        match self.attr_model {
            AttrModel::Bernoulli => check_probabilities(&self.attr_correlation)?,
            AttrModel::Gaussian { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid(format!("gaussian sigma must be >= 0, got {sigma}")));
                }
            }
        }
        if let DegreeModel::Powerlaw { exponent } = self.degree_model {
            if !(exponent > 1.0 && exponent.is_finite()) {
                return Err(Error::invalid(format!(
                    "power-law exponent must exceed 1, got {exponent}"
                )));
            }
        }
        Ok(())
    }
}

fn validate_fractions(fractions: &[f64], k: usize) -> Result<()> {
    if fractions.len() != k {
        return Err(Error::Dimension(format!(
            "class_fractions has {} entries, expected k={k}",
            fractions.len()
        )));
    }
    if fractions.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(Error::invalid("class fractions must all be positive"));
    }
    let s: f64 = fractions.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("class fractions sum to {s}, expected 1")));
    }
    Ok(())
}

fn check_probabilities(h: &[Vec<f64>]) -> Result<()> {
    for (a, row) in h.iter().enumerate() {
        if let Some(l) = row.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid(format!(
                "bernoulli attributes need H in [0, 1]; H[{a}][{l}] = {}",
                row[l]
            )));
        }
    }
    Ok(())
}

/// Largest-remainder apportionment of `total` units over `weights`.
/// Ties in the remainder go to the lower index.
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Class labels whose counts are the apportionment of `n·ρ`, shuffled over
/// node ids. A class that would round to zero borrows one node from the
/// largest class so every class is non-empty.
pub fn assign_labels(fractions: &[f64], n: usize, seed: u64) -> Result<LabelVector> {
    let k = fractions.len();
    validate_fractions(fractions, k)?;
    if n < k {
        return Err(Error::invalid(format!("cannot place {k} classes on {n} nodes")));
    }
    let mut counts = apportion(n, fractions);
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let donor = (0..k).max_by_key(|&l| (counts[l], std::cmp::Reverse(l))).unwrap();
        counts[donor] -= 1;
        counts[empty] += 1;
    }
    let mut labels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(l, &c)| std::iter::repeat_n(l, c))
        .collect();
    labels.shuffle(&mut rng_for(&[seed, seed::LABELS]));
    LabelVector::new(labels, k)
}

/// Expected degrees summing to `2m`.
pub fn sample_degrees(n: usize, m: usize, model: DegreeModel, seed: u64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let target = 2.0 * m as f64;
    match model {
        DegreeModel::Uniform => vec![target / n as f64; n],
        DegreeModel::Powerlaw { exponent } => {
            let lo = 1.0f64;
            let hi = ((n - 1) as f64).max(lo);
            let raw: Vec<f64> = if hi <= lo {
                vec![1.0; n]
            } else {
                // inverse CDF of a power law truncated to [lo, hi]
                let e = 1.0 - exponent;
                let (a, b) = (lo.powf(e), hi.powf(e));
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let u: f64 = rng_for(&[seed, seed::DEGREES, i as u64]).random();
                        (a + u * (b - a)).powf(1.0 / e)
                    })
                    .collect()
            };
            let scale = target / raw.iter().sum::<f64>();
            raw.into_iter().map(|x| x * scale).collect()
        }
    }
}

/// Cumulative-weight table for sampling indices proportionally to weight.
struct WeightedTable {
    items: Vec<usize>,
    cumulative: Vec<f64>,
}

impl WeightedTable {
    fn new(items: Vec<usize>, weights: impl Iterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { items, cumulative }
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let x = rng.random::<f64>() * self.total();
        let p = self.cumulative.partition_point(|&c| c <= x);
        self.items[p.min(self.items.len() - 1)]
    }
}

/// Extra sampling rounds used to replace dropped proposals.
pub const TOPUP_ROUNDS: u64 = 8;

/// Result of [`generate_topology`].
#[derive(Debug, Clone)]
pub struct Topology {
    pub graph: SparseGraph,
    /// Requested edge count (half the total expected degree).
    pub proposals: usize,
}

impl Topology {
    pub fn shortfall(&self) -> usize {
        self.proposals - self.graph.edge_count()
    }
}

pub fn generate_topology(
    labels: &LabelVector,
    preference_mean: &[Vec<f64>],
    degrees: &[f64],
    seed: u64,
) -> Result<Topology> {
    let n = labels.len();
    let k = labels.class_count();
    if degrees.len() != n {
        return Err(Error::Dimension(format!(
            "{} degrees for {n} nodes",
            degrees.len()
        )));
    }
    if preference_mean.len() != k {
        return Err(Error::Dimension(format!(
            "preference_mean is {}x?, expected {k}x{k}",
            preference_mean.len()
        )));
    }
    check_row_stochastic(preference_mean)?;
    if degrees.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(Error::invalid("expected degrees must be finite and non-negative"));
    }

    let members = labels.members();
    let class_tables: Vec<WeightedTable> = members
        .into_iter()
        .map(|nodes| {
            let w: Vec<f64> = nodes.iter().map(|&i| degrees[i]).collect();
            WeightedTable::new(nodes, w.into_iter())
        })
        .collect();
    let row_tables: Vec<WeightedTable> = preference_mean
        .iter()
        .map(|row| WeightedTable::new((0..k).collect(), row.iter().copied()))
        .collect();

    let total_degree: f64 = degrees.iter().sum();
    let proposals = (total_degree / 2.0).round() as usize;

    let draw = |round: u64, per_node: Vec<usize>| -> Result<Vec<(usize, usize)>> {
        let drawn: Vec<Result<Vec<(usize, usize)>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = if round == 0 {
                    rng_for(&[seed, seed::TOPOLOGY, i as u64])
                } else {
                    rng_for(&[seed, seed::TOPOLOGY, i as u64, round])
                };
                let rows = &row_tables[labels.get(i)];
                let mut out = Vec::with_capacity(per_node[i]);
                for _ in 0..per_node[i] {
                    let target_class = rows.sample(&mut rng);
                    let table = &class_tables[target_class];
                    if table.total() <= 0.0 {
                        return Err(Error::Generation(format!(
                            "class {target_class} has zero total expected degree but received a proposal"
                        )));
                    }
                    let j = table.sample(&mut rng);
                    if j != i {
                        out.push((i.min(j), i.max(j)));
                    }
                }
                Ok(out)
            })
            .collect();
        let mut pairs = Vec::new();
        for chunk in drawn {
            pairs.extend(chunk?);
        }
        Ok(pairs)
    };

    let mut pairs = draw(0, apportion(proposals, degrees))?;
    pairs.par_sort_unstable();
    pairs.dedup();
    for round in 1..=TOPUP_ROUNDS {
        let deficit = proposals.saturating_sub(pairs.len());
        if deficit == 0 {
            break;
        }
        pairs.extend(draw(round, apportion(deficit, degrees))?);
        pairs.par_sort_unstable();
        pairs.dedup();
    }
    Ok(Topology {
        graph: SparseGraph::from_canonical_pairs(n, &pairs),
        proposals,
    })
}

pub fn generate_attributes(
    labels: &LabelVector,
    attr_correlation: &[Vec<f64>],
    attr_count: usize,
    model: AttrModel,
    seed: u64,
) -> Result<AttributeMatrix> {
    let k = labels.class_count();
    if attr_correlation.len() != attr_count || attr_correlation.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension(format!(
            "attr_correlation must be {attr_count}x{k}"
        )));
    }
    let normal = match model {
        AttrModel::Bernoulli => {
            check_probabilities(attr_correlation)?;
            None
        }
        AttrModel::Gaussian { sigma } => Some(
            Normal::new(0.0, sigma)
                .map_err(|e| Error::invalid(format!("gaussian sigma {sigma}: {e}")))?,
        ),
    };
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..labels.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&[seed, seed::ATTRIBUTES, i as u64]);
            let c = labels.get(i);
            let mut idx = Vec::new();
            let mut val = Vec::new();
            for (a, row) in attr_correlation.iter().enumerate() {
                let v = match &normal {
                    None => {
                        if rng.random::<f64>() < row[c] {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    Some(noise) => row[c] + noise.sample(&mut rng),
                };
                if v != 0.0 {
                    idx.push(a);
                    val.push(v);
                }
            }
            (idx, val)
        })
        .collect();
    let mut indptr = Vec::with_capacity(labels.len() + 1);
    indptr.push(0);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for (idx, val) in rows {
        indices.extend(idx);
        values.extend(val);
        indptr.push(indices.len());
    }
    let mode = match model {
        AttrModel::Bernoulli => AttrMode::Binary,
        AttrModel::Gaussian { .. } => AttrMode::Continuous,
    };
    Ok(AttributeMatrix::from_csr(
        mode,
        CsrMatrix::from_parts(labels.len(), attr_count, indptr, indices, values),
    ))
}

/// Generates a full dataset. Deterministic in `params` (seed included).
pub fn generate(params: &GenParams) -> Result<Dataset> {
    params.validate()?;
    let labels = assign_labels(&params.class_fractions, params.node_count, params.seed)?;
    let degrees = sample_degrees(
        params.node_count,
        params.target_edge_count,
        params.degree_model,
        params.seed,
    );
    let topology = generate_topology(&labels, &params.preference_mean, &degrees, params.seed)?;
    let attributes = generate_attributes(
        &labels,
        &params.attr_correlation,
        params.attr_count,
        params.attr_model,
        params.seed,
    )?;
    let shortfall = params
        .target_edge_count
        .saturating_sub(topology.graph.edge_count());
    Dataset::new(
        topology.graph,
        attributes,
        labels,
        Provenance::Generated {
            params: Box::new(params.clone()),
            edge_shortfall: shortfall,
        },
    )
}

/// Stochastic block model: every unordered pair `(i, j)` is an edge with
/// probability `block_probabilities[c_i][c_j]`. Nodes are labeled in blocks,
/// class 0 first. No attributes are produced.
pub fn sbm_generate(
    block_probabilities: &[Vec<f64>],
    class_counts: &[usize],
    seed: u64,
) -> Result<(SparseGraph, LabelVector)> {
    let k = class_counts.len();
    if k == 0 || block_probabilities.len() != k || block_probabilities.iter().any(|r| r.len() != k)
    {
        return Err(Error::Dimension(format!(
            "block probabilities must be {k}x{k} to match class_counts"
        )));
    }
    for a in 0..k {
        for b in 0..k {
            let p = block_probabilities[a][b];
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("probability [{a}][{b}] = {p} outside [0, 1]")));
            }
            if p != block_probabilities[b][a] {
                return Err(Error::invalid(format!(
                    "block probabilities are not symmetric at [{a}][{b}]"
                )));
            }
        }
    }
    let labels: Vec<usize> = class_counts
        .iter()
        .enumerate()
        .flat_map(|(l, &c)| std::iter::repeat_n(l, c))
        .collect();
    let n = labels.len();
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(&[seed, seed::SBM, i as u64]);
            let probs = &block_probabilities[labels[i]];
            ((i + 1)..n)
                .filter(|&j| {
                    let p = probs[labels[j]];
                    p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p)
                })
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    let pairs: Vec<(usize, usize)> = rows.into_iter().flatten().collect();
    Ok((
        SparseGraph::from_canonical_pairs(n, &pairs),
        LabelVector::new(labels, k)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{extract_attr_correlation, extract_preference_mean};

    #[test]
    fn apportionment_examples() {
        assert_eq!(apportion(8, &[0.5, 0.25, 0.25]), vec![4, 2, 2]);
        let rho = crate::transforms::configure_class_sizes(0.5, 7).unwrap();
        assert_eq!(apportion(2708, &rho), vec![1354, 677, 339, 169, 85, 42, 42]);
        assert_eq!(apportion(5, &[1.0]), vec![5]);
        assert_eq!(apportion(3, &[1.0, 1.0]), vec![2, 1]);
    }

    #[test]
    fn labels_follow_apportionment() {
        let y = assign_labels(&[0.5, 0.25, 0.25], 8, 3).unwrap();
        assert_eq!(y.class_sizes(), vec![4, 2, 2]);
        let y = assign_labels(&[1.0], 5, 3).unwrap();
        assert_eq!(y.as_slice(), &[0; 5]);
        let rho = crate::transforms::configure_class_sizes(0.5, 7).unwrap();
        let y = assign_labels(&rho, 2708, 11).unwrap();
        assert_eq!(y.class_sizes(), vec![1354, 677, 339, 169, 85, 42, 42]);
        assert!(assign_labels(&[0.5, 0.5], 1, 0).is_err());
    }

    #[test]
    fn tiny_fractions_still_get_a_node() {
        let y = assign_labels(&[0.98, 0.01, 0.01], 10, 0).unwrap();
        assert!(y.class_sizes().iter().all(|&c| c > 0));
        assert_eq!(y.len(), 10);
    }

    #[test]
    fn label_order_depends_on_seed() {
        let a = assign_labels(&[0.5, 0.5], 50, 1).unwrap();
        let b = assign_labels(&[0.5, 0.5], 50, 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, assign_labels(&[0.5, 0.5], 50, 1).unwrap());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(sample_degrees(4, 4, DegreeModel::Uniform, 0), vec![2.0; 4]);
        for seed in 0..5 {
            let d = sample_degrees(3000, 5000, DegreeModel::default(), seed);
            assert!((d.iter().sum::<f64>() - 10000.0).abs() < 1e-6);
            assert!(d.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn powerlaw_is_heavy_tailed() {
        // fraction of seeds whose max degree exceeds five times the mean
        let hits = (0..100)
            .filter(|&s| {
                let d = sample_degrees(3000, 5000, DegreeModel::default(), s);
                let mean = 10000.0 / 3000.0;
                d.iter().cloned().fold(0.0, f64::max) > 5.0 * mean
            })
            .count();
        assert!(hits >= 95, "{hits}");
    }

    #[test]
    fn identity_preference_gives_no_cross_edges() {
        let y = assign_labels(&[0.5, 0.5], 200, 1).unwrap();
        let d = sample_degrees(200, 400, DegreeModel::default(), 1);
        let t = generate_topology(&y, &[vec![1.0, 0.0], vec![0.0, 1.0]], &d, 1).unwrap();
        t.graph.validate().unwrap();
        assert!(t.graph.edges().all(|(u, v)| y.get(u) == y.get(v)));
        assert!(t.graph.edge_count() > 300);
    }

    #[test]
    fn shortfall_within_two_percent() {
        for seed in 0..3 {
            let mut p = GenParams::cora_like(seed);
            p.node_count = 3000;
            p.target_edge_count = 5000;
            let d = generate(&p).unwrap();
            let m = d.graph.edge_count();
            assert!(m <= 5000 && m as f64 >= 0.98 * 5000.0, "seed {seed}: {m}");
        }
    }

    #[test]
    fn single_class_topology() {
        let y = assign_labels(&[1.0], 300, 4).unwrap();
        let d = sample_degrees(300, 600, DegreeModel::Uniform, 4);
        let t = generate_topology(&y, &[vec![1.0]], &d, 4).unwrap();
        t.graph.validate().unwrap();
        assert_eq!(t.proposals, 600);
        assert_eq!(extract_preference_mean(&t.graph, &y).unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn zero_degree_class_receiving_proposals_errors() {
        let y = LabelVector::new(vec![0, 0, 1, 1], 2).unwrap();
        let d = [2.0, 2.0, 0.0, 0.0];
        let m = [vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(generate_topology(&y, &m, &d, 0).is_err());
    }

    #[test]
    fn attribute_extremes() {
        let y = LabelVector::new(vec![0, 1, 0, 1], 2).unwrap();
        let h = vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]];
        let x = generate_attributes(&y, &h, 3, AttrModel::Bernoulli, 9).unwrap();
        for i in 0..4 {
            for a in 0..3 {
                let expect = if y.get(i) == 1 && a < 2 { 1.0 } else { 0.0 };
                assert_eq!(x.get(i, a), expect);
            }
        }
        let zeros = vec![vec![0.0, 0.0]; 3];
        let x = generate_attributes(&y, &zeros, 3, AttrModel::Bernoulli, 9).unwrap();
        assert_eq!(x.as_csr().nnz(), 0);
        let bad = vec![vec![1.5, 0.0]; 3];
        assert!(generate_attributes(&y, &bad, 3, AttrModel::Bernoulli, 9).is_err());
        assert!(generate_attributes(&y, &bad, 3, AttrModel::Gaussian { sigma: 0.1 }, 9).is_ok());
    }

    #[test]
    fn gaussian_attributes_center_on_h() {
        let y = assign_labels(&[0.5, 0.5], 2000, 2).unwrap();
        let h = vec![vec![0.2, 0.8], vec![-1.0, 3.0]];
        let x = generate_attributes(&y, &h, 2, AttrModel::Gaussian { sigma: 0.1 }, 2).unwrap();
        assert_eq!(x.mode(), AttrMode::Continuous);
        let got = extract_attr_correlation(&x, &y).unwrap();
        assert!(crate::features::max_abs_diff(&got, &h) < 0.02);
    }

    #[test]
    fn sbm_extremes() {
        let (g, _) = sbm_generate(&[vec![0.0]], &[10], 0).unwrap();
        assert_eq!(g.edge_count(), 0);
        let (g, _) = sbm_generate(&[vec![1.0]], &[4], 0).unwrap();
        assert_eq!(g.edge_count(), 6);
        g.validate().unwrap();
        assert!(sbm_generate(&[vec![0.1, 0.2], vec![0.3, 0.1]], &[2, 2], 0).is_err());
        assert!(sbm_generate(&[vec![0.1, 0.2]], &[2, 2], 0).is_err());
    }

    #[test]
    fn sbm_homophilic_blocks() {
        let p = vec![vec![0.2, 0.005], vec![0.005, 0.2]];
        let (g, y) = sbm_generate(&p, &[100, 100], 5).unwrap();
        let m = extract_preference_mean(&g, &y).unwrap();
        assert!(m[0][0] > 0.9 && m[1][1] > 0.9, "{m:?}");
    }

    #[test]
    fn erdos_renyi_edge_count() {
        let n = 300usize;
        let p = 0.05;
        let pairs = (n * (n - 1) / 2) as f64;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let (g, _) = sbm_generate(&[vec![p]], &[n], seed).unwrap();
            assert!((g.edge_count() as f64 - pairs * p).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn parse_models() {
        assert_eq!("uniform".parse::<DegreeModel>().unwrap(), DegreeModel::Uniform);
        assert_eq!(
            "powerlaw:3".parse::<DegreeModel>().unwrap(),
            DegreeModel::Powerlaw { exponent: 3.0 }
        );
        assert_eq!(
            "gaussian".parse::<AttrModel>().unwrap(),
            AttrModel::Gaussian { sigma: 0.1 }
        );
        assert!("cauchy".parse::<AttrModel>().is_err());
    }
}
