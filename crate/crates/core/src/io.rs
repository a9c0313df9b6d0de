//! Dataset directory layout:
//!
//! ```text
//! graph.edges      u<TAB>v per line, u < v, lexicographic order
//! attrs.tsv        "# n=<n> d=<d> mode=<binary|continuous>" then node<TAB>attr<TAB>value
//! labels.tsv       "# k=<k>" then node<TAB>label
//! provenance.json  generation parameters and seed, or {"source": "external"}
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttrMode, AttributeMatrix, Dataset, LabelVector, Provenance, SparseGraph};

pub const EDGES_FILE: &str = "graph.edges";
pub const ATTRS_FILE: &str = "attrs.tsv";
pub const LABELS_FILE: &str = "labels.tsv";
pub const PROVENANCE_FILE: &str = "provenance.json";

#[derive(Serialize, Deserialize)]
struct ProvenanceFile {
    tool: String,
    version: String,
    #[serde(flatten)]
    provenance: Provenance,
}

pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut edges = String::with_capacity(dataset.graph.edge_count() * 12);
    for (u, v) in dataset.graph.edges() {
        writeln!(edges, "{u}\t{v}").unwrap();
    }
    write_file(&dir.join(EDGES_FILE), &edges)?;

    let x = &dataset.attributes;
    let mut attrs = format!(
        "# n={} d={} mode={}\n",
        x.node_count(),
        x.attr_count(),
        x.mode().as_str()
    );
    for (node, attr, value) in x.triplets() {
        writeln!(attrs, "{node}\t{attr}\t{value}").unwrap();
    }
    write_file(&dir.join(ATTRS_FILE), &attrs)?;

    let mut labels = format!("# k={}\n", dataset.labels.class_count());
    for (node, label) in dataset.labels.as_slice().iter().enumerate() {
        writeln!(labels, "{node}\t{label}").unwrap();
    }
    write_file(&dir.join(LABELS_FILE), &labels)?;

    let prov = ProvenanceFile {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        provenance: dataset.provenance.clone(),
    };
    let path = dir.join(PROVENANCE_FILE);
    let json = serde_json::to_string_pretty(&prov).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    write_file(&path, &(json + "\n"))
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let attrs_path = dir.join(ATTRS_FILE);
    let attrs_text = read_file(&attrs_path)?;
    let attributes = parse_attrs(&attrs_path, &attrs_text)?;
    let n = attributes.node_count();

    let labels_path = dir.join(LABELS_FILE);
    let labels = parse_labels(&labels_path, &read_file(&labels_path)?, n)?;

    let edges_path = dir.join(EDGES_FILE);
    let graph = parse_edges(&edges_path, &read_file(&edges_path)?, n)?;

    let prov_path = dir.join(PROVENANCE_FILE);
    let provenance = if prov_path.exists() {
        let text = read_file(&prov_path)?;
        let file: ProvenanceFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: prov_path.clone(),
            source: e,
        })?;
        file.provenance
    } else {
        Provenance::External
    };

    Dataset::new(graph, attributes, labels, provenance)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from(path),
        line,
        message: message.into(),
    }
}

/// Reads `key=value` pairs from a `# ...` header line.
fn header_value<'a>(path: &Path, header: &'a str, key: &str) -> Result<&'a str> {
    header
        .trim_start_matches('#')
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| parse_err(path, 1, format!("header is missing `{key}=`")))
}

fn parse_usize(path: &Path, line: usize, field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("{what} `{field}` is not a non-negative integer")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_attrs(path: &Path, text: &str) -> Result<AttributeMatrix> {
    let header = text
        .lines()
        .next()
        .filter(|l| l.starts_with('#'))
        .ok_or_else(|| parse_err(path, 1, "missing `# n=.. d=.. mode=..` header"))?;
    let n = parse_usize(path, 1, header_value(path, header, "n")?, "n")?;
    let d = parse_usize(path, 1, header_value(path, header, "d")?, "d")?;
    let mode: AttrMode = header_value(path, header, "mode")?
        .parse()
        .map_err(|e: Error| parse_err(path, 1, e.to_string()))?;

    let mut triplets = Vec::new();
    for (lineno, line) in data_lines(text) {
        let mut fields = line.split('\t');
        let (Some(a), Some(b), Some(c), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(parse_err(path, lineno, "expected node<TAB>attr<TAB>value"));
        };
        let node = parse_usize(path, lineno, a, "node id")?;
        let attr = parse_usize(path, lineno, b, "attribute index")?;
        let value: f64 = c
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("value `{c}` is not a number")))?;
        if node >= n {
            return Err(parse_err(path, lineno, format!("node {node} >= n={n}")));
        }
        if attr >= d {
            return Err(parse_err(path, lineno, format!("attribute index {attr} >= d={d}")));
        }
        triplets.push((node, attr, value));
    }
    AttributeMatrix::from_triplets(n, d, mode, triplets)
        .map_err(|e| parse_err(path, 0, e.to_string()))
}

fn parse_labels(path: &Path, text: &str, n: usize) -> Result<LabelVector> {
    let header = text
        .lines()
        .next()
        .filter(|l| l.starts_with('#'))
        .ok_or_else(|| parse_err(path, 1, "missing `# k=..` header"))?;
    let k = parse_usize(path, 1, header_value(path, header, "k")?, "k")?;
    let mut labels: Vec<Option<usize>> = vec![None; n];
    for (lineno, line) in data_lines(text) {
        let Some((a, b)) = line.split_once('\t') else {
            return Err(parse_err(path, lineno, "expected node<TAB>label"));
        };
        let node = parse_usize(path, lineno, a, "node id")?;
        let label = parse_usize(path, lineno, b, "label")?;
        if node >= n {
            return Err(parse_err(path, lineno, format!("node {node} >= n={n}")));
        }
        if label >= k {
            return Err(parse_err(path, lineno, format!("label {label} >= k={k}")));
        }
        if labels[node].replace(label).is_some() {
            return Err(parse_err(path, lineno, format!("node {node} labeled twice")));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| parse_err(path, 0, format!("node {i} has no label"))))
        .collect::<Result<Vec<_>>>()?;
    LabelVector::new(labels, k)
}

fn parse_edges(path: &Path, text: &str, n: usize) -> Result<SparseGraph> {
    let mut edges = Vec::new();
    for (lineno, line) in data_lines(text) {
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(path, lineno, "expected u<TAB>v"));
        };
        let u = parse_usize(path, lineno, a, "node id")?;
        let v = parse_usize(path, lineno, b, "node id")?;
        if u >= n || v >= n {
            return Err(parse_err(path, lineno, format!("edge ({u}, {v}) outside 0..{n}")));
        }
        edges.push((u, v));
    }
    let (graph, self_loops) = SparseGraph::from_edges(n, edges)?;
    if self_loops > 0 {
        log::warn!("{}: dropped {self_loops} self-loop(s)", path.display());
    }
    Ok(graph)
}
