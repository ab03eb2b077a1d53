//! Labeled real-valued embedding sets and their interchange formats.
//!
//! An [`EmbeddingSet`] is the input to the encoder: one record per image with
//! an identifier, a class label and a fixed-length vector of activations.
//! Record order is significant. It is the canonical insertion order used for
//! tie-breaking everywhere downstream.

mod io;
mod manifest;
mod synth;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_embeddings, load_embeddings_with, read_binary, read_csv, save_embeddings, write_binary,
    write_csv, EmbeddingFormat, LoadOptions, EMBEDDING_MAGIC,
};
pub use manifest::{DatasetManifest, SplitCounts};
pub use synth::{generate_synthetic, SynthParams};

/// Which dataset split a set of embeddings was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Validation,
    Test,
    #[default]
    Other,
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitTag::Train => "train",
            SplitTag::Validation => "validation",
            SplitTag::Test => "test",
            SplitTag::Other => "other",
        })
    }
}

impl FromStr for SplitTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitTag::Train),
            "validation" | "val" => Ok(SplitTag::Validation),
            "test" => Ok(SplitTag::Test),
            "other" => Ok(SplitTag::Other),
            _ => Err(Error::InvalidArgument(format!("unknown split tag `{s}`"))),
        }
    }
}

/// One sample: identifier, class label and its embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub id: String,
    pub label: String,
    pub vector: Vec<f64>,
}

impl EmbeddingRecord {
    pub fn new(id: impl Into<String>, label: impl Into<String>, vector: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            vector,
        }
    }
}

/// A validated, immutable collection of embedding records of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    records: Vec<EmbeddingRecord>,
    dim: usize,
    split: SplitTag,
    sigmoid_range: bool,
}

impl EmbeddingSet {
    /// Validates `records` and builds a set of dimension `dim`.
    ///
    /// Every vector must have exactly `dim` finite components, ids must be
    /// unique, and when `sigmoid_range` is set every component must lie in
    /// `[0, 1]`.
    pub fn new(dim: usize, records: Vec<EmbeddingRecord>, sigmoid_range: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "embedding dimension must be at least 1".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(records.len());
        for record in &records {
            validate_record(record, dim, sigmoid_range)?;
            if !seen.insert(record.id.as_str()) {
                return Err(Error::DuplicateId(record.id.clone()));
            }
        }
        Ok(Self {
            records,
            dim,
            split: SplitTag::default(),
            sigmoid_range,
        })
    }

    pub fn with_split(mut self, split: SplitTag) -> Self {
        self.split = split;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn split(&self) -> SplitTag {
        self.split
    }

    pub fn sigmoid_range(&self) -> bool {
        self.sigmoid_range
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EmbeddingRecord> {
        self.records.iter()
    }

    /// Distinct labels in order of first appearance.
    pub fn labels(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .map(|r| r.label.as_str())
            .filter(|l| seen.insert(*l))
            .collect()
    }

    /// Splits off the last `per_class` records of every label as a held-out
    /// set. Both halves keep the original relative order.
    pub fn split_holdout(&self, per_class: usize) -> (EmbeddingSet, EmbeddingSet) {
        let mut remaining: std::collections::HashMap<&str, usize> =
            std::collections::HashMap::new();
        for r in &self.records {
            *remaining.entry(r.label.as_str()).or_default() += 1;
        }
        let mut kept = Vec::new();
        let mut held = Vec::new();
        for r in &self.records {
            let left = remaining.get_mut(r.label.as_str()).expect("label counted");
            if *left <= per_class {
                held.push(r.clone());
            } else {
                kept.push(r.clone());
            }
            *left -= 1;
        }
        let make = |records| EmbeddingSet {
            records,
            dim: self.dim,
            split: self.split,
            sigmoid_range: self.sigmoid_range,
        };
        (make(kept), make(held))
    }
}

impl<'a> IntoIterator for &'a EmbeddingSet {
    type Item = &'a EmbeddingRecord;
    type IntoIter = std::slice::Iter<'a, EmbeddingRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

fn validate_record(record: &EmbeddingRecord, dim: usize, sigmoid_range: bool) -> Result<()> {
    if record.vector.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: record.vector.len(),
        });
    }
    for (index, &value) in record.vector.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if sigmoid_range && !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                id: record.id.clone(),
                index,
                value,
            });
        }
    }
    Ok(())
}
