use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::apportion;
use crate::graph::LabelVector;
use crate::seed::{self, rng_for};

pub const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.2, 0.2];

/// Smallest class a stratified split accepts.
pub const MIN_CLASS_SIZE: usize = 3;

/// Disjoint train/validation/test node sets covering every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.train
            .iter()
            .chain(&self.validation)
            .chain(&self.test)
            .copied()
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    #[default]
    Stratified,
    Uniform,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::Stratified => "stratified",
            SplitMode::Uniform => "uniform",
        }
    }
}

fn check_ratios(ratios: [f64; 3]) -> Result<()> {
    if ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::invalid(format!("split ratios {ratios:?} must all be positive")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("split ratios {ratios:?} sum to {sum}, not 1")));
    }
    Ok(())
}

fn deal(nodes: &[usize], ratios: [f64; 3], split: &mut Split) {
    let counts = apportion(nodes.len(), &ratios);
    let (train, rest) = nodes.split_at(counts[0]);
    let (validation, test) = rest.split_at(counts[1]);
    split.train.extend_from_slice(train);
    split.validation.extend_from_slice(validation);
    split.test.extend_from_slice(test);
}

fn finish(mut split: Split) -> Result<Split> {
    if split.train.is_empty() || split.validation.is_empty() || split.test.is_empty() {
        return Err(Error::invalid("split leaves an empty train, validation or test set"));
    }
    split.train.sort_unstable();
    split.validation.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Per-class split: each class is shuffled and cut by `ratios` with
/// largest-remainder rounding. Classes without members are skipped.
pub fn stratified_split(labels: &LabelVector, ratios: [f64; 3], seed: u64) -> Result<Split> {
    check_ratios(ratios)?;
    let mut split = Split {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for (class, mut members) in labels.members().into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < MIN_CLASS_SIZE {
            return Err(Error::invalid(format!(
                "class {class} has {} nodes; stratified splitting needs at least {MIN_CLASS_SIZE}",
                members.len()
            )));
        }
        members.shuffle(&mut rng_for(&[seed, seed::SPLIT, class as u64]));
        deal(&members, ratios, &mut split);
    }
    finish(split)
}

/// Class-blind split of all nodes.
pub fn uniform_split(labels: &LabelVector, ratios: [f64; 3], seed: u64) -> Result<Split> {
    check_ratios(ratios)?;
    let mut nodes: Vec<usize> = (0..labels.len()).collect();
    nodes.shuffle(&mut rng_for(&[seed, seed::SPLIT]));
    let mut split = Split {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    deal(&nodes, ratios, &mut split);
    finish(split)
}

pub fn make_split(mode: SplitMode, labels: &LabelVector, ratios: [f64; 3], seed: u64) -> Result<Split> {
    match mode {
        SplitMode::Stratified => stratified_split(labels, ratios, seed),
        SplitMode::Uniform => uniform_split(labels, ratios, seed),
    }
}
