//! Exact top-k by linear popcount scan.
//!
//! Distances are bounded by the code length, so the ranking is a counting
//! sort over `L + 1` buckets: one pass computes distances and a histogram,
//! one pass places the selected positions. Within a bucket positions are
//! visited in ascending order, which gives the (distance, insertion order)
//! ordering without a comparison sort.

/// A ranked reference: its position in the code set and its distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Neighbor {
    pub distance: u32,
    pub position: usize,
}

#[inline]
pub(crate) fn hamming_words(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Distances from `query` to every stride-sized code in `words`.
pub(crate) fn distances(words: &[u64], stride: usize, query: &[u64], out: &mut Vec<u32>) {
    out.clear();
    if stride == 1 {
        let q = query[0];
        out.extend(words.iter().map(|w| (w ^ q).count_ones()));
    } else {
        out.extend(words.chunks_exact(stride).map(|c| hamming_words(c, query)));
    }
}

/// The `k` nearest codes ordered by (distance, position).
pub(crate) fn top_k(
    words: &[u64],
    stride: usize,
    code_length: usize,
    query: &[u64],
    k: usize,
) -> Vec<Neighbor> {
    let mut dist = Vec::with_capacity(words.len() / stride);
    distances(words, stride, query, &mut dist);
    select(&dist, code_length, k)
}

pub(crate) fn select(dist: &[u32], code_length: usize, k: usize) -> Vec<Neighbor> {
    let k = k.min(dist.len());
    if k == 0 {
        return Vec::new();
    }

    let mut quota = vec![0usize; code_length + 1];
    for &d in dist {
        quota[d as usize] += 1;
    }
    // Trim the histogram to exactly k slots: everything below the cutoff
    // distance, and only the earliest positions at the cutoff.
    let mut taken = 0;
    for q in quota.iter_mut() {
        let keep = (*q).min(k - taken);
        *q = keep;
        taken += keep;
    }

    let mut offset = Vec::with_capacity(quota.len());
    let mut acc = 0;
    for &q in &quota {
        offset.push(acc);
        acc += q;
    }

    let mut out = vec![
        Neighbor {
            distance: 0,
            position: 0
        };
        k
    ];
    let mut placed = 0;
    for (position, &d) in dist.iter().enumerate() {
        let d = d as usize;
        if quota[d] > 0 {
            quota[d] -= 1;
            out[offset[d]] = Neighbor {
                distance: d as u32,
                position,
            };
            offset[d] += 1;
            placed += 1;
            if placed == k {
                break;
            }
        }
    }
    out
}
