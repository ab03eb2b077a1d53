//! Brute-force reference implementations used as ground truth by the tests.
//!
//! Nothing here calls into the engine's distance, ranking or scoring code:
//! bits are read one at a time from the packed words, rankings come from a
//! full sort of every (distance, position) pair, and AP recomputes
//! precision at each rank from scratch.

#![allow(dead_code)]

use hashfind_core::{BinaryCode, CodeSet};

/// Bit `i` of `code`, read directly from its packed words.
fn bit(code: &BinaryCode, i: usize) -> bool {
    let word = code.words()[i / 64];
    (word >> (i % 64)) & 1 == 1
}

pub fn oracle_hamming(a: &BinaryCode, b: &BinaryCode) -> Result<u32, String> {
    if a.len() != b.len() {
        return Err(format!("length mismatch: {} vs {}", a.len(), b.len()));
    }
    let mut differing = 0;
    for i in 0..a.len() {
        if bit(a, i) != bit(b, i) {
            differing += 1;
        }
    }
    Ok(differing)
}

/// Every reference as `(distance, position)`, fully sorted.
pub fn oracle_ranking(reference: &CodeSet, query: &BinaryCode) -> Vec<(u32, usize)> {
    let mut all: Vec<(u32, usize)> = reference
        .codes()
        .iter()
        .enumerate()
        .map(|(pos, c)| (oracle_hamming(query, c).expect("equal lengths"), pos))
        .collect();
    all.sort();
    all
}

/// AP = 1/GTP * sum_{i=1..n} Precision(i) * Rel(i), transcribed literally.
pub fn oracle_ap(rel: &[bool], gtp: usize) -> f64 {
    assert!(gtp > 0);
    let mut total = 0.0;
    for i in 1..=rel.len() {
        let relevant_in_top_i = rel[..i].iter().filter(|r| **r).count();
        let precision = relevant_in_top_i as f64 / i as f64;
        let indicator = if rel[i - 1] { 1.0 } else { 0.0 };
        total += precision * indicator;
    }
    total / gtp as f64
}

/// mAP over `query_labels` when every query sees the references in the
/// order given by `ranking_for(j)`. Queries with no relevant reference are
/// skipped; returns `None` if none remain.
fn oracle_map_with(
    ref_labels: &[String],
    query_labels: &[String],
    depth: Option<usize>,
    ranking_for: impl Fn(usize) -> Vec<usize>,
) -> Option<f64> {
    let mut aps = Vec::new();
    for (j, qlabel) in query_labels.iter().enumerate() {
        let gtp = ref_labels.iter().filter(|l| *l == qlabel).count();
        if gtp == 0 {
            continue;
        }
        let mut order = ranking_for(j);
        if let Some(d) = depth {
            order.truncate(d);
        }
        let rel: Vec<bool> = order.iter().map(|&p| ref_labels[p] == *qlabel).collect();
        aps.push(oracle_ap(&rel, gtp));
    }
    if aps.is_empty() {
        return None;
    }
    let n = aps.len() as f64;
    Some(aps.into_iter().sum::<f64>() / n)
}

/// `depth = None` scores the full ranking.
pub fn oracle_map(reference: &CodeSet, queries: &CodeSet, depth: Option<usize>) -> Option<f64> {
    oracle_map_with(reference.labels(), queries.labels(), depth, |j| {
        oracle_ranking(reference, &queries.codes()[j])
            .into_iter()
            .map(|(_, pos)| pos)
            .collect()
    })
}

/// mAP when every query sees the references in plain insertion order.
pub fn oracle_map_fixed_order(
    ref_labels: &[String],
    query_labels: &[String],
    depth: Option<usize>,
) -> Option<f64> {
    oracle_map_with(ref_labels, query_labels, depth, |_| {
        (0..ref_labels.len()).collect()
    })
}
