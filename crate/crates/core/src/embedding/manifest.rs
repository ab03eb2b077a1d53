//! Per-class, per-split sample counts.
//!
//! Manifest CSV: header `label,train,validation,test,total`, one row per
//! class. The `total` column is checked against the split counts on load.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: u64,
    pub validation: u64,
    pub test: u64,
}

impl SplitCounts {
    pub const fn new(train: u64, validation: u64, test: u64) -> Self {
        Self {
            train,
            validation,
            test,
        }
    }

    pub fn total(&self) -> u64 {
        self.train + self.validation + self.test
    }
}

impl std::ops::Add for SplitCounts {
    type Output = SplitCounts;

    fn add(self, rhs: SplitCounts) -> SplitCounts {
        SplitCounts::new(
            self.train + rhs.train,
            self.validation + rhs.validation,
            self.test + rhs.test,
        )
    }
}

/// Sample counts per class label and split. Totals are always derived from
/// the per-class counts, so they cannot drift out of sync.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    classes: BTreeMap<String, SplitCounts>,
}

impl DatasetManifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, counts: SplitCounts) {
        self.classes.insert(label.into(), counts);
    }

    /// The original four-class radio-galaxy distribution (1982 samples,
    /// 404 of them in the test split).
    pub fn radio_galaxy_original() -> Self {
        let mut m = Self::new();
        m.insert("Bent", SplitCounts::new(305, 100, 103));
        m.insert("Compact", SplitCounts::new(226, 80, 100));
        m.insert("FRI", SplitCounts::new(215, 74, 100));
        m.insert("FRII", SplitCounts::new(434, 144, 101));
        m
    }

    /// Per-class totals of the balanced radio-galaxy set (2708 samples)
    /// after train/validation upsampling.
    pub fn radio_galaxy_balanced_totals() -> BTreeMap<String, u64> {
        [("Bent", 680), ("Compact", 675), ("FRI", 674), ("FRII", 679)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn classes(&self) -> &BTreeMap<String, SplitCounts> {
        &self.classes
    }

    pub fn get(&self, label: &str) -> Option<SplitCounts> {
        self.classes.get(label).copied()
    }

    /// Sum of every class's counts, per split.
    pub fn totals(&self) -> SplitCounts {
        self.classes
            .values()
            .fold(SplitCounts::default(), |acc, c| acc + *c)
    }

    pub fn total(&self) -> u64 {
        self.totals().total()
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| Error::MalformedRow {
                line: 1,
                reason: e.to_string(),
            })?
            .clone();
        if header.is_empty() {
            return Err(Error::Empty("manifest has no header"));
        }
        let expected = ["label", "train", "validation", "test", "total"];
        if header.iter().ne(expected) {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("manifest header must be `{}`", expected.join(",")),
            });
        }

        let mut manifest = Self::new();
        for (row_idx, row) in rdr.records().enumerate() {
            let line = row_idx + 2;
            let row = row.map_err(|e| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            if row.len() != expected.len() {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("expected {} fields, found {}", expected.len(), row.len()),
                });
            }
            let num = |i: usize| {
                row[i]
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::MalformedRow {
                        line,
                        reason: format!("`{}` is not a non-negative integer", &row[i]),
                    })
            };
            let counts = SplitCounts::new(num(1)?, num(2)?, num(3)?);
            if counts.total() != num(4)? {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!(
                        "total {} does not equal train+validation+test = {}",
                        &row[4],
                        counts.total()
                    ),
                });
            }
            if manifest.classes.contains_key(&row[0]) {
                return Err(Error::DuplicateId(row[0].to_string()));
            }
            manifest.insert(&row[0], counts);
        }
        Ok(manifest)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Corrupt(e.to_string());
        out.write_record(["label", "train", "validation", "test", "total"])
            .map_err(io)?;
        for (label, c) in &self.classes {
            out.write_record([
                label.clone(),
                c.train.to_string(),
                c.validation.to_string(),
                c.test.to_string(),
                c.total().to_string(),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}
