//! Immutable Hamming-distance index with exact linear-scan top-k queries.
//!
//! Ranking is by ascending Hamming distance, ties broken by the reference's
//! position in the indexed [`CodeSet`]. With short codes (L = 8 gives only
//! nine distinct distances) ties are the common case, so the tie-break is
//! part of the query contract.

mod codeset;
mod persist;
mod scan;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::encoder::{words_for, BinaryCode, ThresholdPercentile};
use crate::error::{Error, Result};

pub use codeset::CodeSet;
pub use persist::{
    deserialize_index, read_index, serialize_index, write_index, INDEX_MAGIC, INDEX_VERSION,
};
pub use scan::Neighbor;

/// Number of results returned when the caller does not choose `k`.
pub const DEFAULT_K: usize = 100;

/// Number of differing bit positions between two equal-length codes.
pub fn hamming(a: &BinaryCode, b: &BinaryCode) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(scan::hamming_words(a.words(), b.words()))
}

/// SHA-256 digest of an index's serialized content.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b:02x}"))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({self})")
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub reference_id: String,
    pub reference_label: String,
    pub distance: u32,
}

/// Ranked hits for one query: distances non-decreasing, equal distances in
/// ascending reference position, `min(k, n)` entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RetrievalResult {
    pub query_id: String,
    pub hits: Vec<Hit>,
}

#[derive(Debug, Clone)]
pub struct HashIndex {
    codeset: CodeSet,
    /// All codes packed back to back, `stride` words each.
    words: Vec<u64>,
    stride: usize,
    fingerprint: Fingerprint,
}

impl PartialEq for HashIndex {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint && self.codeset == other.codeset
    }
}

impl HashIndex {
    pub fn build(codeset: CodeSet) -> Result<Self> {
        if codeset.is_empty() {
            return Err(Error::Empty("cannot index an empty code set"));
        }
        let stride = words_for(codeset.code_length());
        let mut words = Vec::with_capacity(stride * codeset.len());
        for code in codeset.codes() {
            words.extend_from_slice(code.words());
        }
        let (header, payload) = persist::encode_body(&codeset)?;
        let fingerprint = persist::digest(&header, &payload);
        Ok(Self {
            codeset,
            words,
            stride,
            fingerprint,
        })
    }

    pub fn codeset(&self) -> &CodeSet {
        &self.codeset
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn code_length(&self) -> usize {
        self.codeset.code_length()
    }

    pub fn percentile(&self) -> ThresholdPercentile {
        self.codeset.percentile()
    }

    pub fn len(&self) -> usize {
        self.codeset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codeset.is_empty()
    }

    fn check_query(&self, code: &BinaryCode, k: usize) -> Result<()> {
        if code.len() != self.code_length() {
            return Err(Error::LengthMismatch {
                left: self.code_length(),
                right: code.len(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(())
    }

    /// Positions and distances of the `k` nearest references.
    pub fn rank(&self, code: &BinaryCode, k: usize) -> Result<Vec<Neighbor>> {
        self.check_query(code, k)?;
        Ok(scan::top_k(
            &self.words,
            self.stride,
            self.code_length(),
            code.words(),
            k,
        ))
    }

    /// Distance from `code` to every reference, in reference order.
    pub fn distances(&self, code: &BinaryCode) -> Result<Vec<u32>> {
        self.check_query(code, 1)?;
        let mut out = Vec::with_capacity(self.len());
        scan::distances(&self.words, self.stride, code.words(), &mut out);
        Ok(out)
    }

    /// Exact top-`k` references for `code`; `k > n` returns all `n`.
    /// The result's `query_id` is empty.
    pub fn query(&self, code: &BinaryCode, k: usize) -> Result<RetrievalResult> {
        self.query_as("", code, k)
    }

    pub fn query_as(&self, query_id: &str, code: &BinaryCode, k: usize) -> Result<RetrievalResult> {
        let hits = self
            .rank(code, k)?
            .into_iter()
            .map(|n| Hit {
                reference_id: self.codeset.ids()[n.position].clone(),
                reference_label: self.codeset.labels()[n.position].clone(),
                distance: n.distance,
            })
            .collect();
        Ok(RetrievalResult {
            query_id: query_id.to_string(),
            hits,
        })
    }

    /// Runs every query of `queries`; result `i` belongs to query `i`.
    pub fn batch_query(&self, queries: &CodeSet, k: usize) -> Result<Vec<RetrievalResult>> {
        if !queries.is_empty() && queries.code_length() != self.code_length() {
            return Err(Error::LengthMismatch {
                left: self.code_length(),
                right: queries.code_length(),
            });
        }
        queries
            .codes()
            .par_iter()
            .zip(queries.ids())
            .map(|(code, id)| self.query_as(id, code, k))
            .collect()
    }
}
