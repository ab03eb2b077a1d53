//! Average precision, mean average precision and percentile sweeps.
//!
//! For one query with ranked relevance `rel[1..n]` and `gtp` relevant
//! references in the whole reference set:
//!
//! ```text
//! AP  = (1 / gtp) * sum_i precision(i) * rel[i],   precision(i) = hits(1..i) / i
//! mAP = mean of AP over queries with gtp >= 1
//! ```
//!
//! `gtp` always counts the full reference set, so evaluating a truncated
//! ranking ([`Depth::TopK`]) penalizes relevant references that were not
//! retrieved. Queries whose label never occurs among the references have no
//! defined AP; they are reported in [`EvalReport::excluded`] and left out of
//! the mean.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::embedding::EmbeddingSet;
use crate::encoder::{encode_set, ThresholdPercentile};
use crate::error::{Error, Result};
use crate::index::{CodeSet, Fingerprint, HashIndex};

/// `rel[i]` is true when the reference at rank `i + 1` shares the query's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceVector(Vec<bool>);

impl RelevanceVector {
    pub fn new(rel: Vec<bool>) -> Self {
        Self(rel)
    }

    pub fn from_labels<'a>(ranked: impl IntoIterator<Item = &'a str>, query_label: &str) -> Self {
        Self(ranked.into_iter().map(|l| l == query_label).collect())
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn relevant_count(&self) -> usize {
        self.0.iter().filter(|r| **r).count()
    }
}

impl From<Vec<bool>> for RelevanceVector {
    fn from(rel: Vec<bool>) -> Self {
        Self(rel)
    }
}

pub fn average_precision(rel: &RelevanceVector, gtp: usize) -> Result<f64> {
    if gtp == 0 {
        return Err(Error::InvalidArgument(
            "average precision is undefined with zero ground-truth positives".into(),
        ));
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, _) in rel.0.iter().enumerate().filter(|(_, r)| **r) {
        hits += 1;
        sum += hits as f64 / (i + 1) as f64;
    }
    if hits > gtp {
        return Err(Error::InvalidArgument(format!(
            "ranking holds {hits} relevant items but gtp is {gtp}"
        )));
    }
    Ok(sum / gtp as f64)
}

/// How many ranked references each query is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Depth {
    /// Every reference in the index.
    #[default]
    Full,
    TopK(usize),
}

impl Depth {
    pub fn resolve(self, reference_count: usize) -> usize {
        match self {
            Depth::Full => reference_count,
            Depth::TopK(k) => k.min(reference_count),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Full => f.write_str("full"),
            Depth::TopK(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Depth::Full),
            other => match other.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Depth::TopK(k)),
                _ => Err(Error::InvalidArgument(format!(
                    "depth must be `full` or a positive integer, got `{s}`"
                ))),
            },
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Full => serializer.serialize_str("full"),
            Depth::TopK(k) => serializer.serialize_u64(*k as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApResult {
    pub query_id: String,
    pub label: String,
    /// `None` when `gtp == 0`.
    pub ap: Option<f64>,
    pub gtp: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub map: f64,
    pub n_queries_scored: usize,
    pub per_class_map: BTreeMap<String, f64>,
    /// Ids of queries whose label has no reference.
    pub excluded: Vec<String>,
    pub percentile: ThresholdPercentile,
    pub depth: Depth,
    pub code_length: usize,
    pub reference_count: usize,
    pub reference_fingerprint: Fingerprint,
    pub per_query: Vec<ApResult>,
}

impl EvalReport {
    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self).map_err(|e| Error::Io(e.into()))
    }

    /// `query_id,label,ap,gtp`; `ap` is empty for excluded queries.
    pub fn write_per_query_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Corrupt(e.to_string());
        out.write_record(["query_id", "label", "ap", "gtp"])
            .map_err(err)?;
        for r in &self.per_query {
            out.write_record([
                r.query_id.as_str(),
                r.label.as_str(),
                &r.ap.map(|ap| ap.to_string()).unwrap_or_default(),
                &r.gtp.to_string(),
            ])
            .map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Mean of the defined APs, in input order; `None` if no AP is defined.
pub fn mean_average_precision(per_query: &[ApResult]) -> Option<f64> {
    let (sum, n) = per_query
        .iter()
        .filter_map(|r| r.ap)
        .fold((0.0, 0usize), |(s, n), ap| (s + ap, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Query input for [`evaluate`]: raw embeddings are encoded at the index's
/// percentile, codes must already carry that percentile.
#[derive(Debug, Clone, Copy)]
pub enum Queries<'a> {
    Embeddings(&'a EmbeddingSet),
    Codes(&'a CodeSet),
}

impl<'a> From<&'a EmbeddingSet> for Queries<'a> {
    fn from(set: &'a EmbeddingSet) -> Self {
        Queries::Embeddings(set)
    }
}

impl<'a> From<&'a CodeSet> for Queries<'a> {
    fn from(set: &'a CodeSet) -> Self {
        Queries::Codes(set)
    }
}

pub fn evaluate<'a>(
    index: &HashIndex,
    queries: impl Into<Queries<'a>>,
    depth: Depth,
) -> Result<EvalReport> {
    let encoded;
    let codes = match queries.into() {
        Queries::Codes(codes) => {
            if codes.percentile() != index.percentile() {
                return Err(Error::PercentileMismatch {
                    index: index.percentile().value(),
                    queries: codes.percentile().value(),
                });
            }
            codes
        }
        Queries::Embeddings(set) => {
            if set.dim() != index.code_length() {
                return Err(Error::DimensionMismatch {
                    expected: index.code_length(),
                    found: set.dim(),
                });
            }
            if set.is_empty() {
                return Err(Error::NoScorableQuery);
            }
            encoded = encode_set(set, index.percentile())?;
            &encoded
        }
    };
    if !codes.is_empty() && codes.code_length() != index.code_length() {
        return Err(Error::LengthMismatch {
            left: index.code_length(),
            right: codes.code_length(),
        });
    }

    let ref_labels = index.codeset().labels();
    let mut gtp_by_label: HashMap<&str, usize> = HashMap::new();
    for label in ref_labels {
        *gtp_by_label.entry(label.as_str()).or_default() += 1;
    }
    let n = depth.resolve(index.len());

    let per_query = codes
        .codes()
        .par_iter()
        .zip(codes.ids())
        .zip(codes.labels())
        .map(|((code, id), label)| {
            let gtp = gtp_by_label.get(label.as_str()).copied().unwrap_or(0);
            let ap = if gtp == 0 {
                None
            } else {
                let ranked = index.rank(code, n)?;
                let rel = RelevanceVector::from_labels(
                    ranked.iter().map(|nb| ref_labels[nb.position].as_str()),
                    label,
                );
                Some(average_precision(&rel, gtp)?)
            };
            Ok(ApResult {
                query_id: id.clone(),
                label: label.clone(),
                ap,
                gtp,
                depth: n,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let map = mean_average_precision(&per_query).ok_or(Error::NoScorableQuery)?;
    let mut by_class: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in &per_query {
        if let Some(ap) = r.ap {
            let e = by_class.entry(r.label.clone()).or_default();
            e.0 += ap;
            e.1 += 1;
        }
    }

    Ok(EvalReport {
        map,
        n_queries_scored: per_query.iter().filter(|r| r.ap.is_some()).count(),
        per_class_map: by_class
            .into_iter()
            .map(|(label, (sum, n))| (label, sum / n as f64))
            .collect(),
        excluded: per_query
            .iter()
            .filter(|r| r.ap.is_none())
            .map(|r| r.query_id.clone())
            .collect(),
        percentile: index.percentile(),
        depth,
        code_length: index.code_length(),
        reference_count: index.len(),
        reference_fingerprint: index.fingerprint(),
        per_query,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub percentile: ThresholdPercentile,
    pub map: f64,
}

/// mAP as a function of the encoding percentile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// Sorted by ascending percentile.
    pub points: Vec<SweepPoint>,
    pub max_map: f64,
    /// Every percentile whose mAP equals `max_map`.
    pub argmax: Vec<ThresholdPercentile>,
    pub depth: Depth,
    pub reference_count: usize,
    pub query_count: usize,
}

impl SweepReport {
    /// `percentile,map` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Corrupt(e.to_string());
        out.write_record(["percentile", "map"]).map_err(err)?;
        for p in &self.points {
            out.write_record([p.percentile.to_string(), p.map.to_string()])
                .map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self).map_err(|e| Error::Io(e.into()))
    }
}

/// Encodes both sets at every percentile, indexes the references and
/// evaluates the queries. Duplicate percentiles are evaluated once.
pub fn sweep(
    reference: &EmbeddingSet,
    queries: &EmbeddingSet,
    percentiles: &[ThresholdPercentile],
    depth: Depth,
) -> Result<SweepReport> {
    if percentiles.is_empty() {
        return Err(Error::InvalidArgument("empty percentile list".into()));
    }
    let mut qs = percentiles.to_vec();
    qs.sort_by(|a, b| a.value().total_cmp(&b.value()));
    qs.dedup();

    let points = qs
        .par_iter()
        .map(|&q| {
            let index = HashIndex::build(encode_set(reference, q)?)?;
            let report = evaluate(&index, queries, depth)?;
            Ok(SweepPoint {
                percentile: q,
                map: report.map,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_map = points
        .iter()
        .map(|p| p.map)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax = points
        .iter()
        .filter(|p| p.map == max_map)
        .map(|p| p.percentile)
        .collect();
    Ok(SweepReport {
        points,
        max_map,
        argmax,
        depth,
        reference_count: reference.len(),
        query_count: queries.len(),
    })
}
