//! Graph, attribute and label containers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::GenParams;
use crate::linalg::CsrMatrix;

/// Undirected simple graph in CSR form. Both directions of every edge are
/// materialized so neighbor scans are O(degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    node_count: usize,
    row_offsets: Vec<usize>,
    column_indices: Vec<usize>,
    edge_count: usize,
}

impl SparseGraph {
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            row_offsets: vec![0; node_count + 1],
            column_indices: Vec::new(),
            edge_count: 0,
        }
    }

    /// Builds a graph from an arbitrary edge list. Edges are symmetrized and
    /// deduplicated; self-loops are dropped. Returns the graph and the number
    /// of self-loops that were discarded.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut self_loops = 0;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok((Self::from_canonical_pairs(node_count, &pairs), self_loops))
    }

    /// `pairs` must be sorted, deduplicated, with `u < v < node_count`.
    pub(crate) fn from_canonical_pairs(node_count: usize, pairs: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; node_count];
        for &(u, v) in pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut row_offsets = Vec::with_capacity(node_count + 1);
        row_offsets.push(0);
        for d in &degree {
            row_offsets.push(row_offsets.last().unwrap() + d);
        }
        let mut cursor = row_offsets[..node_count].to_vec();
        let mut column_indices = vec![0usize; 2 * pairs.len()];
        // Sorted (u, v) pairs fill each row in increasing column order: for row w,
        // entries where w is the larger endpoint (u < w) arrive first, ordered by u,
        // followed by entries where w is the smaller endpoint, ordered by v.
        for &(u, v) in pairs {
            column_indices[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in pairs {
            column_indices[cursor[u]] = v;
            cursor[u] += 1;
        }
        Self {
            node_count,
            row_offsets,
            column_indices,
            edge_count: pairs.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.column_indices
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.column_indices[self.row_offsets[node]..self.row_offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.row_offsets[node + 1] - self.row_offsets[node]
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Checks every structural invariant. Used by tests and by loaders of
    /// untrusted data.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count;
        if self.row_offsets.len() != n + 1 || self.row_offsets[0] != 0 {
            return Err(Error::invalid("row_offsets has the wrong shape"));
        }
        if self.row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("row_offsets is decreasing"));
        }
        if self.row_offsets[n] != 2 * self.edge_count
            || self.column_indices.len() != 2 * self.edge_count
        {
            return Err(Error::invalid("row_offsets[n] != 2 * edge_count"));
        }
        for i in 0..n {
            let row = self.neighbors(i);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("row {i} is not strictly increasing")));
            }
            for &j in row {
                if j >= n {
                    return Err(Error::invalid(format!("row {i} references node {j}")));
                }
                if j == i {
                    return Err(Error::invalid(format!("self-loop at node {i}")));
                }
                if self.neighbors(j).binary_search(&i).is_err() {
                    return Err(Error::invalid(format!("edge ({i}, {j}) is not symmetric")));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric GCN normalization with self-loops: `D̃^{-1/2} (A + I) D̃^{-1/2}`.
/// Isolated nodes get a diagonal entry of 1.
pub fn normalized_adjacency(graph: &SparseGraph) -> CsrMatrix {
    let n = graph.node_count();
    let dtilde: Vec<f64> = (0..n).map(|i| (graph.degree(i) + 1) as f64).collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(n + graph.column_indices().len());
    let mut values = Vec::with_capacity(indices.capacity());
    indptr.push(0);
    for i in 0..n {
        let mut diag_done = false;
        for &j in graph.neighbors(i) {
            if !diag_done && j > i {
                indices.push(i);
                values.push(1.0 / (dtilde[i] * dtilde[i]).sqrt());
                diag_done = true;
            }
            indices.push(j);
            // the product is commutative, so (i, j) and (j, i) are bitwise equal
            values.push(1.0 / (dtilde[i] * dtilde[j]).sqrt());
        }
        if !diag_done {
            indices.push(i);
            values.push(1.0 / (dtilde[i] * dtilde[i]).sqrt());
        }
        indptr.push(indices.len());
    }
    CsrMatrix::from_parts(n, n, indptr, indices, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrMode {
    Binary,
    Continuous,
}

impl AttrMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AttrMode::Binary => "binary",
            AttrMode::Continuous => "continuous",
        }
    }
}

impl std::str::FromStr for AttrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(AttrMode::Binary),
            "continuous" => Ok(AttrMode::Continuous),
            other => Err(Error::invalid(format!("unknown attribute mode `{other}`"))),
        }
    }
}

/// Node attributes `X`, stored sparsely (zero entries omitted).
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix {
    mode: AttrMode,
    values: CsrMatrix,
}

impl AttributeMatrix {
    /// Builds from `(node, attr, value)` triplets. Zero values are dropped.
    pub fn from_triplets(
        node_count: usize,
        attr_count: usize,
        mode: AttrMode,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        triplets.retain(|t| t.2 != 0.0);
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; node_count + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(node, attr, value) in &triplets {
            if node >= node_count {
                return Err(Error::invalid(format!("attribute row {node} >= n={node_count}")));
            }
            if attr >= attr_count {
                return Err(Error::invalid(format!("attribute index {attr} >= d={attr_count}")));
            }
            if !value.is_finite() {
                return Err(Error::invalid(format!("non-finite attribute at ({node}, {attr})")));
            }
            if mode == AttrMode::Binary && value != 1.0 {
                return Err(Error::invalid(format!(
                    "binary attribute at ({node}, {attr}) has value {value}"
                )));
            }
            if prev == Some((node, attr)) {
                return Err(Error::invalid(format!("duplicate attribute entry ({node}, {attr})")));
            }
            prev = Some((node, attr));
            indptr[node + 1] += 1;
            indices.push(attr);
            values.push(value);
        }
        for i in 0..node_count {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self {
            mode,
            values: CsrMatrix::from_parts(node_count, attr_count, indptr, indices, values),
        })
    }

    pub(crate) fn from_csr(mode: AttrMode, values: CsrMatrix) -> Self {
        Self { mode, values }
    }

    pub fn node_count(&self) -> usize {
        self.values.rows()
    }

    pub fn attr_count(&self) -> usize {
        self.values.cols()
    }

    pub fn mode(&self) -> AttrMode {
        self.mode
    }

    pub fn as_csr(&self) -> &CsrMatrix {
        &self.values
    }

    pub fn get(&self, node: usize, attr: usize) -> f64 {
        self.values.get(node, attr)
    }

    /// Non-zero `(node, attr, value)` entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |r| {
            let (idx, val) = self.values.row(r);
            idx.iter().zip(val).map(move |(&c, &v)| (r, c, v))
        })
    }
}

/// Per-node class ids in `[0, class_count)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    class_count: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, class_count: usize) -> Result<Self> {
        if class_count == 0 {
            return Err(Error::invalid("class_count must be positive"));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= class_count) {
            return Err(Error::invalid(format!(
                "label {l} of node {i} is outside 0..{class_count}"
            )));
        }
        Ok(Self {
            labels,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Node ids grouped by class, each group in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    External,
    Generated {
        params: Box<GenParams>,
        /// Edges requested minus edges realized after dropping duplicate and self-loop proposals.
        edge_shortfall: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: SparseGraph,
    pub attributes: AttributeMatrix,
    pub labels: LabelVector,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(
        graph: SparseGraph,
        attributes: AttributeMatrix,
        labels: LabelVector,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = graph.node_count();
        if attributes.node_count() != n || labels.len() != n {
            return Err(Error::Dimension(format!(
                "graph has {n} nodes, attributes {}, labels {}",
                attributes.node_count(),
                labels.len()
            )));
        }
        Ok(Self {
            graph,
            attributes,
            labels,
            provenance,
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}
