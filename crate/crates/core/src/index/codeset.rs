use std::io::{Read, Write};

use crate::encoder::{BinaryCode, ThresholdPercentile};
use crate::error::{Error, Result};

/// Parallel lists of codes, ids and labels produced at one percentile.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSet {
    codes: Vec<BinaryCode>,
    ids: Vec<String>,
    labels: Vec<String>,
    code_length: usize,
    percentile: ThresholdPercentile,
}

impl CodeSet {
    pub fn new(
        codes: Vec<BinaryCode>,
        ids: Vec<String>,
        labels: Vec<String>,
        code_length: usize,
        percentile: ThresholdPercentile,
    ) -> Result<Self> {
        if codes.len() != ids.len() || codes.len() != labels.len() {
            return Err(Error::InvalidCodeSet(format!(
                "{} codes, {} ids, {} labels",
                codes.len(),
                ids.len(),
                labels.len()
            )));
        }
        if let Some((i, c)) = codes
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() != code_length)
        {
            return Err(Error::InvalidCodeSet(format!(
                "code {i} has {} bits, expected {code_length}",
                c.len()
            )));
        }
        Ok(Self {
            codes,
            ids,
            labels,
            code_length,
            percentile,
        })
    }

    pub fn codes(&self) -> &[BinaryCode] {
        &self.codes
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn code_length(&self) -> usize {
        self.code_length
    }

    pub fn percentile(&self) -> ThresholdPercentile {
        self.percentile
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Writes `id,label,code` rows, code rendered bit 0 first.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Corrupt(e.to_string());
        out.write_record(["id", "label", "code"]).map_err(err)?;
        for ((id, label), code) in self.ids.iter().zip(&self.labels).zip(&self.codes) {
            out.write_record([id.as_str(), label.as_str(), &code.to_string()])
                .map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the `id,label,code` layout written by [`CodeSet::write_csv`].
    /// The percentile is not stored in the CSV and must be supplied.
    pub fn read_csv<R: Read>(reader: R, percentile: ThresholdPercentile) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::MalformedRow {
            line: 1,
            reason: e.to_string(),
        })?;
        if header.is_empty() {
            return Err(Error::Empty("code file has no header"));
        }
        if header.iter().ne(["id", "label", "code"]) {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "header must be `id,label,code`".into(),
            });
        }
        let (mut codes, mut ids, mut labels) = (Vec::new(), Vec::new(), Vec::new());
        for (i, row) in rdr.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            let code: BinaryCode = row[2].parse().map_err(|e: Error| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            ids.push(row[0].to_string());
            labels.push(row[1].to_string());
            codes.push(code);
        }
        let len = codes
            .first()
            .map(BinaryCode::len)
            .ok_or(Error::Empty("code file has no rows"))?;
        Self::new(codes, ids, labels, len, percentile)
    }
}
