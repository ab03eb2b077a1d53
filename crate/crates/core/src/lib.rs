//! Binary-hash similarity retrieval.
//!
//! Real-valued embeddings are binarized per vector at a percentile of their
//! own components ([`encoder`]), indexed as packed bit codes and searched
//! exactly by Hamming distance ([`index`]), and the ranking quality is
//! measured with average precision and mAP ([`eval`]).
//!
//! ```
//! use hashfind_core::{encode_set, evaluate, generate_synthetic, Depth, HashIndex, SynthParams,
//!     ThresholdPercentile};
//!
//! let data = generate_synthetic(&SynthParams {
//!     num_classes: 4, per_class: 60, dim: 8, separation: 6.0, noise: 0.2, seed: 42,
//! })?;
//! let (reference, queries) = data.split_holdout(10);
//! let index = HashIndex::build(encode_set(&reference, ThresholdPercentile::MEDIAN)?)?;
//! let report = evaluate(&index, &queries, Depth::Full)?;
//! assert!(report.map > 0.9);
//! # Ok::<(), hashfind_core::Error>(())
//! ```

pub mod embedding;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod index;
mod wire;

pub use embedding::{
    generate_synthetic, load_embeddings, save_embeddings, DatasetManifest, EmbeddingFormat,
    EmbeddingRecord, EmbeddingSet, LoadOptions, SplitTag, SynthParams,
};
pub use encoder::{binarize, encode_set, percentile_threshold, BinaryCode, ThresholdPercentile};
pub use error::{Error, Result};
pub use eval::{
    average_precision, evaluate, sweep, ApResult, Depth, EvalReport, Queries, RelevanceVector,
    SweepPoint, SweepReport,
};
pub use index::{
    deserialize_index, hamming, serialize_index, CodeSet, Fingerprint, HashIndex, Hit,
    RetrievalResult, DEFAULT_K,
};
