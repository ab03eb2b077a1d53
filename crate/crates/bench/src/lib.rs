//! Shared fixtures for the benchmarks.

use hashfind_core::{
    encode_set, generate_synthetic, CodeSet, EmbeddingSet, HashIndex, SynthParams,
    ThresholdPercentile,
};

pub const REFERENCE_COUNT: usize = 2708;
pub const QUERY_COUNT: usize = 404;

/// Embeddings split into 2708 references and 404 queries across 4 classes.
pub fn embeddings(dim: usize) -> (EmbeddingSet, EmbeddingSet) {
    let data = generate_synthetic(&SynthParams {
        num_classes: 4,
        per_class: (REFERENCE_COUNT + QUERY_COUNT) / 4,
        dim,
        separation: 2.0,
        noise: 0.5,
        seed: 7,
    })
    .expect("valid synthetic parameters");
    data.split_holdout(QUERY_COUNT / 4)
}

pub struct Fixture {
    pub references: EmbeddingSet,
    pub queries: EmbeddingSet,
    pub index: HashIndex,
    pub query_codes: CodeSet,
}

pub fn fixture(dim: usize) -> Fixture {
    let (references, queries) = embeddings(dim);
    let q = ThresholdPercentile::MEDIAN;
    let index = HashIndex::build(encode_set(&references, q).unwrap()).unwrap();
    let query_codes = encode_set(&queries, q).unwrap();
    Fixture {
        references,
        queries,
        index,
        query_codes,
    }
}
