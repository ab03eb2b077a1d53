use std::collections::HashSet;

use hashfind_core::{binarize, encode_set, EmbeddingRecord, EmbeddingSet, ThresholdPercentile};
use proptest::prelude::*;

/// Vectors whose components are pairwise distinct.
fn distinct_vector(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1.0, 1..=max_dim).prop_filter("distinct components", |v| {
        let set: HashSet<u64> = v.iter().map(|x| x.to_bits()).collect();
        set.len() == v.len()
    })
}

/// Distinct vectors whose sorted gaps survive rounding under `a * x + b`.
fn well_separated_vector(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    distinct_vector(max_dim).prop_filter("gap >= 1e-6", |v| {
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        s.windows(2).all(|w| w[1] - w[0] >= 1e-6)
    })
}

fn q(v: f64) -> ThresholdPercentile {
    ThresholdPercentile::new(v).unwrap()
}

proptest! {
    #[test]
    fn popcount_is_non_increasing_in_q(v in distinct_vector(64)) {
        let counts: Vec<u32> = (0..=100).map(|p| binarize(&v, q(p as f64)).unwrap().count_ones()).collect();
        prop_assert_eq!(counts[0] as usize, v.len());
        prop_assert!(counts[100] >= 1);
        prop_assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{:?}", counts);
    }

    #[test]
    fn median_sets_half_rounded_up(v in distinct_vector(64)) {
        let ones = binarize(&v, q(50.0)).unwrap().count_ones() as usize;
        prop_assert_eq!(ones, v.len().div_ceil(2));
    }

    #[test]
    fn bit_pattern_survives_positive_affine_maps(
        v in well_separated_vector(32),
        p in 0u32..=100,
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
    ) {
        let mapped: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        prop_assert_eq!(binarize(&mapped, q(p as f64)).unwrap(), binarize(&v, q(p as f64)).unwrap());
    }

    #[test]
    fn encoding_is_local_to_each_vector(
        v in distinct_vector(16),
        others in proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, 16), 0..5),
        p in 0u32..=100,
    ) {
        let dim = v.len();
        let mut records = vec![EmbeddingRecord::new("target", "x", v.clone())];
        for (i, o) in others.iter().enumerate() {
            records.push(EmbeddingRecord::new(format!("o{i}"), "y", o[..dim].to_vec()));
        }
        let set = EmbeddingSet::new(dim, records, true).unwrap();
        let codes = encode_set(&set, q(p as f64)).unwrap();
        prop_assert_eq!(&codes.codes()[0], &binarize(&v, q(p as f64)).unwrap());
    }
}
