//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p hashfind-core --test acceptance`.

mod oracle;

use std::time::{Duration, Instant};

use hashfind_core::index::{read_index, write_index};
use hashfind_core::{
    average_precision, binarize, encode_set, evaluate, generate_synthetic, hamming,
    percentile_threshold, sweep, BinaryCode, CodeSet, Depth, EmbeddingSet, Error, HashIndex,
    RelevanceVector, SynthParams, ThresholdPercentile,
};
use oracle::{oracle_hamming, oracle_map, oracle_map_fixed_order, oracle_ranking};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5EED;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn q(v: f64) -> ThresholdPercentile {
    ThresholdPercentile::new(v).unwrap()
}

fn random_code(rng: &mut ChaCha8Rng, len: usize) -> BinaryCode {
    let bits: Vec<bool> = (0..len).map(|_| rng.random()).collect();
    BinaryCode::from_bits(&bits).unwrap()
}

fn random_codeset(rng: &mut ChaCha8Rng, n: usize, len: usize, classes: usize) -> CodeSet {
    CodeSet::new(
        (0..n).map(|_| random_code(rng, len)).collect(),
        (0..n).map(|i| format!("id{i}")).collect(),
        (0..n)
            .map(|_| format!("c{}", rng.random_range(0..classes)))
            .collect(),
        len,
        ThresholdPercentile::MEDIAN,
    )
    .unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn hamming_oracle_equivalence() -> Outcome {
    const PAIRS: usize = 10_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0;
    for len in [1, 7, 8, 63, 64, 65, 512] {
        for _ in 0..PAIRS {
            let a = random_code(&mut rng, len);
            let b = random_code(&mut rng, len);
            if hamming(&a, &b).unwrap() != oracle_hamming(&a, &b).unwrap() {
                mismatches += 1;
            }
        }
    }
    let t = start.elapsed();
    Outcome::check(
        mismatches == 0 && within(t, Duration::from_secs(5)),
        format!("{PAIRS} pairs x 7 lengths, {mismatches} mismatches, {t:.2?} (limit 5s)"),
    )
}

fn metric_axioms() -> Outcome {
    const TRIPLES: usize = 10_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut violations = 0;
    for len in [8, 128] {
        for _ in 0..TRIPLES {
            let (a, b, c) = (
                random_code(&mut rng, len),
                random_code(&mut rng, len),
                random_code(&mut rng, len),
            );
            let d = |x: &BinaryCode, y: &BinaryCode| hamming(x, y).unwrap();
            if d(&a, &a) != 0 || d(&a, &b) != d(&b, &a) || d(&a, &c) > d(&a, &b) + d(&b, &c) {
                violations += 1;
            }
        }
    }
    let t = start.elapsed();
    Outcome::check(
        violations == 0 && within(t, Duration::from_secs(5)),
        format!("{TRIPLES} triples at L=8 and L=128, {violations} violations, {t:.2?} (limit 5s)"),
    )
}

fn ranking_exactness() -> Outcome {
    const INSTANCES: usize = 1_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut wrong = 0;
    for _ in 0..INSTANCES {
        let n = rng.random_range(1..=200);
        let len = *[1, 4, 8, 16, 65].choose(&mut rng).unwrap();
        let refs = random_codeset(&mut rng, n, len, 4);
        let query = random_code(&mut rng, len);
        let k = rng.random_range(1..=n + 10);
        let index = HashIndex::build(refs.clone()).unwrap();
        let got: Vec<(u32, usize)> = index
            .rank(&query, k)
            .unwrap()
            .into_iter()
            .map(|nb| (nb.distance, nb.position))
            .collect();
        let mut expected = oracle_ranking(&refs, &query);
        expected.truncate(k);
        if got != expected {
            wrong += 1;
        }
    }
    let t = start.elapsed();
    Outcome::check(
        wrong == 0 && within(t, Duration::from_secs(10)),
        format!("{INSTANCES} instances (n <= 200), {wrong} differ from brute-force sort, {t:.2?} (limit 10s)"),
    )
}

fn ap_hand_cases() -> Outcome {
    let rel = |b: &[u8]| RelevanceVector::new(b.iter().map(|x| *x == 1).collect());
    let mixed = average_precision(&rel(&[1, 0, 1]), 2).unwrap();
    let perfect = average_precision(&rel(&[1, 1, 1]), 3).unwrap();
    let none = average_precision(&rel(&[0, 0, 0]), 5).unwrap();
    Outcome::check(
        (mixed - 5.0 / 6.0).abs() < 1e-12 && perfect == 1.0 && none == 0.0,
        format!("AP([1,0,1],2)={mixed:.15}, AP(perfect)={perfect}, AP(none)={none}"),
    )
}

fn map_oracle_equivalence() -> Outcome {
    const INSTANCES: usize = 500;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut compared = 0;
    for i in 0..INSTANCES {
        let (n, nq) = (rng.random_range(1..=30), rng.random_range(1..=10));
        let refs = random_codeset(&mut rng, n, 8, 4);
        let queries = random_codeset(&mut rng, nq, 8, 4);
        let index = HashIndex::build(refs.clone()).unwrap();
        let top_k = rng.random_range(1..=30);
        for depth in [None, Some(top_k)] {
            let engine = evaluate(&index, &queries, depth.map_or(Depth::Full, Depth::TopK));
            match (engine, oracle_map(&refs, &queries, depth)) {
                (Ok(report), Some(expected)) => {
                    compared += 1;
                    worst = worst.max((report.map - expected).abs());
                }
                (Err(Error::NoScorableQuery), None) => {}
                (got, want) => {
                    failures += 1;
                    eprintln!(
                        "instance {i}: engine {:?} vs oracle {want:?}",
                        got.map(|r| r.map)
                    );
                }
            }
        }
    }
    let t = start.elapsed();
    Outcome::check(
        failures == 0 && worst < 1e-12 && within(t, Duration::from_secs(30)),
        format!(
            "{INSTANCES} instances x {{full, top-k}}: {compared} scored comparisons, max |diff| = {worst:e}, {failures} disagreements, {t:.2?} (limit 30s)"
        ),
    )
}

fn encoder_checks() -> Outcome {
    const TRIALS: usize = 1_000;
    let worked = [0.9, 0.1, 0.5, 0.3, 0.7, 0.2, 0.8, 0.4];
    let threshold = percentile_threshold(&worked, q(50.0)).unwrap();
    let bits = binarize(&worked, q(50.0)).unwrap().to_string();
    let worked_ok = (threshold - 0.45).abs() < 1e-12 && bits == "10101010";

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let distinct = |rng: &mut ChaCha8Rng| {
        let dim = rng.random_range(1..=64);
        // a shuffled evenly spaced grid plus jitter: distinct, gaps >= 0.5 / dim
        let mut v: Vec<f64> = (0..dim)
            .map(|i| (i as f64 + 0.25 + 0.5 * rng.random::<f64>()) / dim as f64)
            .collect();
        v.shuffle(rng);
        v
    };

    let mut monotone_bad = 0;
    for _ in 0..TRIALS {
        let v = distinct(&mut rng);
        let counts: Vec<u32> = (0..=100)
            .map(|p| binarize(&v, q(p as f64)).unwrap().count_ones())
            .collect();
        let ok = counts[0] as usize == v.len()
            && counts[100] >= 1
            && counts.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            monotone_bad += 1;
        }
    }

    let mut affine_bad = 0;
    for _ in 0..TRIALS {
        let v = distinct(&mut rng);
        let a = 10f64.powf(rng.random_range(-2.0..2.0));
        let b = rng.random_range(-100.0..100.0);
        let p = q(rng.random_range(0..=100) as f64);
        let mapped: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        if binarize(&mapped, p).unwrap() != binarize(&v, p).unwrap() {
            affine_bad += 1;
        }
    }

    Outcome::check(
        worked_ok && monotone_bad == 0 && affine_bad == 0,
        format!(
            "worked example t={threshold:.12} bits={bits}; monotonicity failures {monotone_bad}/{TRIALS}; affine failures {affine_bad}/{TRIALS}"
        ),
    )
}

fn synthetic_split() -> (EmbeddingSet, EmbeddingSet) {
    let data = generate_synthetic(&SynthParams {
        num_classes: 4,
        per_class: 60,
        dim: 8,
        separation: 6.0,
        noise: 0.2,
        seed: 42,
    })
    .unwrap();
    data.split_holdout(10)
}

fn end_to_end_synthetic() -> Outcome {
    let start = Instant::now();
    let (refs, queries) = synthetic_split();
    let index = HashIndex::build(encode_set(&refs, q(50.0)).unwrap()).unwrap();
    let full = evaluate(&index, &queries, Depth::Full).unwrap();
    let top100 = evaluate(&index, &queries, Depth::TopK(100)).unwrap();

    let qs: Vec<_> = (0..=10).map(|i| q(i as f64 * 10.0)).collect();
    let curve = sweep(&refs, &queries, &qs, Depth::Full).unwrap();
    let interior = !curve.argmax.is_empty()
        && curve
            .argmax
            .iter()
            .all(|p| p.value() > 0.0 && p.value() < 100.0);
    let t = start.elapsed();

    let curve_txt: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{}:{:.3}", p.percentile, p.map))
        .collect();
    let argmax: Vec<String> = curve.argmax.iter().map(|p| p.to_string()).collect();
    Outcome::check(
        full.map >= 0.95 && interior && within(t, Duration::from_secs(10)),
        format!(
            "refs {} queries {}: mAP@q50 full={:.4} (>= 0.95), top-100={:.4}; sweep [{}] argmax {{{}}}, {t:.2?} (limit 10s)",
            refs.len(),
            queries.len(),
            full.map,
            top100.map,
            curve_txt.join(" "),
            argmax.join(","),
        ),
    )
}

fn degenerate_sweep_endpoint() -> Outcome {
    let (refs, queries) = synthetic_split();
    let codes = encode_set(&refs, q(0.0)).unwrap();
    let all_ones = codes
        .codes()
        .iter()
        .all(|c| c.count_ones() as usize == c.len());
    let index = HashIndex::build(codes).unwrap();
    let engine = evaluate(&index, &queries, Depth::Full).unwrap().map;
    let labels = |s: &EmbeddingSet| s.iter().map(|r| r.label.clone()).collect::<Vec<_>>();
    let expected = oracle_map_fixed_order(&labels(&refs), &labels(&queries), None).unwrap();
    let swept = sweep(&refs, &queries, &[q(0.0)], Depth::Full)
        .unwrap()
        .points[0]
        .map;
    Outcome::check(
        all_ones && (engine - expected).abs() < 1e-12 && swept == engine,
        format!("all codes all-ones: {all_ones}; mAP@q0 engine={engine:.15} oracle(insertion order)={expected:.15}"),
    )
}

fn batch_query_performance() -> Outcome {
    // 2708 references and 404 queries, L = 8, k = 100
    let data = generate_synthetic(&SynthParams {
        num_classes: 4,
        per_class: 677 + 101,
        dim: 8,
        separation: 2.0,
        noise: 0.5,
        seed: 7,
    })
    .unwrap();
    let (refs, queries) = data.split_holdout(101);
    let index = HashIndex::build(encode_set(&refs, q(50.0)).unwrap()).unwrap();
    let qcodes = encode_set(&queries, q(50.0)).unwrap();
    assert_eq!((index.len(), qcodes.len()), (2708, 404));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (batch, scan) = pool.install(|| {
        let mut batch = Vec::new();
        let mut scan = Vec::new();
        for _ in 0..7 {
            let t = Instant::now();
            let results = index.batch_query(&qcodes, 100).unwrap();
            batch.push(t.elapsed());
            assert_eq!(results.len(), 404);

            let t = Instant::now();
            let mut checksum = 0u64;
            for code in qcodes.codes() {
                checksum += index
                    .distances(code)
                    .unwrap()
                    .iter()
                    .map(|&d| d as u64)
                    .sum::<u64>();
            }
            scan.push(t.elapsed());
            std::hint::black_box(checksum);
        }
        (batch, scan)
    });
    let median = |mut v: Vec<Duration>| {
        v.sort();
        v[v.len() / 2]
    };
    let batch = median(batch);
    let scan = median(scan);
    let comparisons = (index.len() * qcodes.len()) as f64;
    let throughput = comparisons / scan.as_secs_f64();
    Outcome::check(
        batch < Duration::from_millis(100) && throughput >= 10e6,
        format!(
            "404 x 2708 top-100 single-threaded: median {batch:.2?} (limit 100ms); scan throughput {:.1}M comparisons/s (>= 10M)",
            throughput / 1e6
        ),
    )
}

fn persistence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let refs = random_codeset(&mut rng, 300, 72, 5);
    let queries = random_codeset(&mut rng, 50, 72, 5);
    let index = HashIndex::build(refs).unwrap();
    let mut bytes = Vec::new();
    write_index(&index, &mut bytes).unwrap();
    let back = read_index(&bytes[..]).unwrap();

    let same_results = [1, 10, 100, 300, 1000].iter().all(|&k| {
        back.batch_query(&queries, k).unwrap() == index.batch_query(&queries, k).unwrap()
    });

    let mut undetected = 0;
    let positions: Vec<usize> = (0..bytes.len())
        .step_by(7)
        .chain([bytes.len() - 1])
        .collect();
    for &i in &positions {
        let mut bad = bytes.clone();
        bad[i] ^= 1 << (i % 8);
        if read_index(&bad[..]).is_ok() {
            undetected += 1;
        }
    }
    Outcome::check(
        same_results && back.fingerprint() == index.fingerprint() && undetected == 0,
        format!(
            "round trip preserves results: {same_results}; {} single-byte corruptions, {undetected} undetected",
            positions.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("hamming oracle equivalence", hamming_oracle_equivalence),
        ("metric axioms", metric_axioms),
        ("ranking exactness", ranking_exactness),
        ("average precision hand cases", ap_hand_cases),
        ("mAP oracle equivalence", map_oracle_equivalence),
        ("encoder checks", encoder_checks),
        ("end-to-end synthetic pipeline", end_to_end_synthetic),
        ("degenerate sweep endpoint", degenerate_sweep_endpoint),
        ("batch query performance", batch_query_performance),
        ("persistence", persistence),
    ];

    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
