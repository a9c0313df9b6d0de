//! Synthetic attributed-graph generation with controllable class
//! features, and a node-classification benchmark harness built on native
//! MLP, SGC and GCN classifiers.

pub mod config;
pub mod error;
pub mod features;
pub mod generator;
pub mod graph;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod preset;
pub mod seed;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::{AttrMode, AttributeMatrix, Dataset, LabelVector, Provenance, SparseGraph};
