//! Seeded synthetic embedding sets: clustered vectors squashed into (0, 1).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{EmbeddingRecord, EmbeddingSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub num_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    /// Spread of the class centers in pre-logistic space.
    pub separation: f64,
    /// Standard deviation of the per-sample Gaussian noise.
    pub noise: f64,
    pub seed: u64,
}

/// Generates `num_classes * per_class` records, class-major.
///
/// Class `c` gets a center that is a random permutation of `dim` evenly
/// spaced levels spanning `[-separation/2, separation/2]`, so adjacent
/// components of a center differ by `separation / (dim - 1)`. Each sample
/// adds `N(0, noise^2)` to every component and passes the result through the
/// logistic function. Labels are `class0..class{K-1}` and ids are
/// `class{c}-{i}`.
pub fn generate_synthetic(params: &SynthParams) -> Result<EmbeddingSet> {
    let SynthParams {
        num_classes,
        per_class,
        dim,
        separation,
        noise,
        seed,
    } = *params;
    if num_classes == 0 || per_class == 0 || dim == 0 {
        return Err(Error::InvalidArgument(
            "num_classes, per_class and dim must be positive".into(),
        ));
    }
    if !(separation >= 0.0 && separation.is_finite()) || !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidArgument(
            "separation and noise must be finite and non-negative".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<f64> = (0..dim)
        .map(|j| {
            if dim == 1 {
                0.0
            } else {
                separation * (j as f64 / (dim - 1) as f64 - 0.5)
            }
        })
        .collect();
    let centers: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| {
            let mut center = levels.clone();
            center.shuffle(&mut rng);
            center
        })
        .collect();

    let mut records = Vec::with_capacity(num_classes * per_class);
    for (c, center) in centers.iter().enumerate() {
        for i in 0..per_class {
            let vector = center
                .iter()
                .map(|&mu| {
                    let z: f64 = rng.sample(StandardNormal);
                    logistic(mu + noise * z)
                })
                .collect();
            records.push(EmbeddingRecord::new(
                format!("class{c}-{i}"),
                format!("class{c}"),
                vector,
            ));
        }
    }
    EmbeddingSet::new(dim, records, true)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
