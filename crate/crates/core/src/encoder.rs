//! Percentile-threshold binarization of real-valued vectors.
//!
//! Each vector is thresholded against a percentile of its *own* components:
//! bit `i` is set iff `v[i] >= percentile(v, q)`. The percentile uses linear
//! interpolation between order statistics, so `q = 50` is the median and
//! `q = 0` / `q = 100` are the minimum and maximum.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::index::CodeSet;

/// Longest supported code, in bits.
pub const MAX_CODE_LENGTH: usize = 4096;

/// A threshold percentile `q` in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ThresholdPercentile(f64);

impl ThresholdPercentile {
    pub const MEDIAN: ThresholdPercentile = ThresholdPercentile(50.0);

    pub fn new(q: f64) -> Result<Self> {
        if (0.0..=100.0).contains(&q) {
            Ok(Self(q))
        } else {
            Err(Error::InvalidPercentile(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for ThresholdPercentile {
    fn default() -> Self {
        Self::MEDIAN
    }
}

impl TryFrom<f64> for ThresholdPercentile {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<ThresholdPercentile> for f64 {
    fn from(q: ThresholdPercentile) -> f64 {
        q.0
    }
}

impl fmt::Display for ThresholdPercentile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ThresholdPercentile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = s
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number")))?;
        Self::new(q)
    }
}

/// An `L`-bit code packed little-endian into 64-bit words: bit `i` lives in
/// word `i / 64` at position `i % 64`. Padding bits past `L` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    words: Vec<u64>,
    len: usize,
}

pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

fn check_length(len: usize) -> Result<()> {
    if (1..=MAX_CODE_LENGTH).contains(&len) {
        Ok(())
    } else {
        Err(Error::UnsupportedCodeLength(len))
    }
}

impl BinaryCode {
    pub fn zeros(len: usize) -> Result<Self> {
        check_length(len)?;
        Ok(Self {
            words: vec![0; words_for(len)],
            len,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut code = Self::zeros(bits.len())?;
        for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            code.words[i / 64] |= 1 << (i % 64);
        }
        Ok(code)
    }

    /// Rebuilds a code from packed words, rejecting set padding bits.
    pub fn from_words(words: Vec<u64>, len: usize) -> Result<Self> {
        check_length(len)?;
        if words.len() != words_for(len) {
            return Err(Error::InvalidCodeSet(format!(
                "{len}-bit code needs {} words, got {}",
                words_for(len),
                words.len()
            )));
        }
        let tail = len % 64;
        if tail != 0 && words[words.len() - 1] >> tail != 0 {
            return Err(Error::InvalidCodeSet(format!(
                "padding bits beyond position {} are set",
                len - 1
            )));
        }
        Ok(Self { words, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit {i} out of range for {}-bit code",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

/// Renders bit 0 first, e.g. `10101010` has bits 0, 2, 4 and 6 set.
impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryCode({self})")
    }
}

impl FromStr for BinaryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("`{s}` is not a bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

/// The `q`-th percentile of `vector`'s own components.
///
/// With sorted components `x[0] <= ... <= x[D-1]` and `h = (D-1) q / 100`,
/// returns `x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)])`.
pub fn percentile_threshold(vector: &[f64], q: ThresholdPercentile) -> Result<f64> {
    if vector.is_empty() {
        return Err(Error::Empty("cannot threshold an empty vector"));
    }
    if let Some((index, &value)) = vector.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }

    let h = (vector.len() - 1) as f64 * q.value() / 100.0;
    let lo = h.floor() as usize;
    let frac = h - h.floor();

    let mut scratch = vector.to_vec();
    let (_, &mut lower, upper) = scratch.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || upper.is_empty() {
        return Ok(lower);
    }
    let next = upper.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(lower + frac * (next - lower))
}

/// Sets bit `i` iff `vector[i] >= percentile_threshold(vector, q)`.
pub fn binarize(vector: &[f64], q: ThresholdPercentile) -> Result<BinaryCode> {
    let threshold = percentile_threshold(vector, q)?;
    let mut code = BinaryCode::zeros(vector.len())?;
    for (i, &v) in vector.iter().enumerate() {
        if v >= threshold {
            code.words[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(code)
}

/// Encodes every record of `set` at percentile `q`, preserving order.
pub fn encode_set(set: &EmbeddingSet, q: ThresholdPercentile) -> Result<CodeSet> {
    if set.is_empty() {
        return Err(Error::Empty("cannot encode an empty embedding set"));
    }
    check_length(set.dim())?;
    let codes = set
        .records()
        .par_iter()
        .map(|r| binarize(&r.vector, q))
        .collect::<Result<Vec<_>>>()?;
    let ids = set.iter().map(|r| r.id.clone()).collect();
    let labels = set.iter().map(|r| r.label.clone()).collect();
    CodeSet::new(codes, ids, labels, set.dim(), q)
}
