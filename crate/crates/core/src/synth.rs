//! Seeded synthetic data: the four-rating toy matrix, low-rank rating
//! corpora and a learnable metadataset.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{RatingDataset, Scale};
use crate::metafeatures::{MetafeatureTable, Provenance};
use crate::metalearn::MetaDataset;
use crate::metatarget::{average_ranks_desc, MetatargetTable};
use crate::{derive_seed, Result};

fn five_star() -> Scale {
    Scale::new(1.0, 5.0).expect("valid scale")
}

/// Three users, three items, seven ratings:
///
/// ```text
///      i1 i2 i3
/// u1    5  3  4
/// u2    4  .  2
/// u3    .  3  5
/// ```
pub fn toy_dataset() -> RatingDataset {
    RatingDataset::from_triples(
        [
            ("u1", "i1", 5.0),
            ("u1", "i2", 3.0),
            ("u1", "i3", 4.0),
            ("u2", "i1", 4.0),
            ("u2", "i3", 2.0),
            ("u3", "i2", 3.0),
            ("u3", "i3", 5.0),
        ],
        Some(five_star()),
    )
    .expect("toy dataset is valid")
}

/// Shape of one generated rating dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowRankSpec {
    pub n_users: usize,
    pub n_items: usize,
    pub n_ratings: usize,
    /// Zipf exponent of item popularity; 0 samples items uniformly.
    pub popularity_skew: f64,
    /// Standard deviation of additive rating noise.
    pub noise: f64,
    /// Round ratings to whole stars.
    pub integer: bool,
}

/// Ratings `mu + b_u + b_i + p_u . q_i + noise` with rank-2 factors, clamped to
/// 1..5. Users are drawn uniformly; a user picks items with weight
/// `popularity(i) * exp(p_u . q_i)`, so observed pairs lean towards liked
/// items. Repeated pairs are redrawn.
pub fn low_rank_dataset(spec: &LowRankSpec, seed: u64) -> RatingDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let bu: Vec<f64> = (0..spec.n_users)
        .map(|_| 0.5 * unit.sample(&mut rng))
        .collect();
    let bi: Vec<f64> = (0..spec.n_items)
        .map(|_| 0.5 * unit.sample(&mut rng))
        .collect();
    let p: Vec<[f64; 2]> = (0..spec.n_users)
        .map(|_| [0.8 * unit.sample(&mut rng), 0.8 * unit.sample(&mut rng)])
        .collect();
    let q: Vec<[f64; 2]> = (0..spec.n_items)
        .map(|_| [0.8 * unit.sample(&mut rng), 0.8 * unit.sample(&mut rng)])
        .collect();
    let affinity = |u: usize, i: usize| p[u][0] * q[i][0] + p[u][1] * q[i][1];
    let pickers: Vec<WeightedIndex<f64>> = (0..spec.n_users)
        .map(|u| {
            let w: Vec<f64> = (0..spec.n_items)
                .map(|i| affinity(u, i).exp() / ((i + 1) as f64).powf(spec.popularity_skew))
                .collect();
            WeightedIndex::new(&w).expect("positive weights")
        })
        .collect();
    let target = spec.n_ratings.min(spec.n_users * spec.n_items);
    let mut seen = std::collections::HashSet::with_capacity(target);
    let mut triples = Vec::with_capacity(target);
    let mut attempts = 0usize;
    while triples.len() < target {
        attempts += 1;
        let u = rng.random_range(0..spec.n_users);
        // Fall back to uniform items once likely pairs are exhausted.
        let i = if attempts < 20 * target {
            pickers[u].sample(&mut rng)
        } else {
            rng.random_range(0..spec.n_items)
        };
        if !seen.insert((u, i)) {
            continue;
        }
        let mut v = 3.5 + bu[u] + bi[i] + affinity(u, i) + spec.noise * unit.sample(&mut rng);
        if spec.integer {
            v = v.round();
        }
        triples.push((format!("u{u}"), format!("i{i}"), v.clamp(1.0, 5.0)));
    }
    RatingDataset::from_triples(triples, Some(five_star())).expect("generated dataset is valid")
}

/// `n` datasets of 200 to 2000 ratings with varied shape, density and
/// popularity skew, named `synth-00`, `synth-01`, ...
pub fn synthetic_corpus(n: usize, seed: u64) -> Vec<(String, RatingDataset)> {
    (0..n)
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, d as u64));
            let n_users = rng.random_range(30..=90);
            let n_items = rng.random_range(20..=60);
            let max = (n_users * n_items * 6 / 10).clamp(200, 2000);
            let spec = LowRankSpec {
                n_users,
                n_items,
                n_ratings: rng.random_range(200..=max),
                popularity_skew: rng.random_range(0.0..1.2),
                noise: rng.random_range(0.2..0.8),
                integer: true,
            };
            let ds = low_rank_dataset(&spec, rng.random());
            (format!("synth-{d:02}"), ds)
        })
        .collect()
}

/// Number of algorithms labelled in [`learnable_metadataset`].
pub const META_ALGORITHMS: usize = 4;

/// `n` meta-examples whose ranking of four algorithms is a function of two
/// informative features `f1`, `f2` plus score noise; `n_noise` further
/// features are pure noise.
///
/// Algorithm scores are `f1`, `f2`, `1 - f1` and `1 - f2` plus Gaussian noise
/// of standard deviation `noise`; higher scores rank first.
pub fn learnable_metadataset(
    n: usize,
    n_noise: usize,
    noise: f64,
    seed: u64,
) -> Result<MetaDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = Normal::new(0.0, noise.max(0.0)).expect("valid normal");
    let mut names = vec!["f1".to_string(), "f2".to_string()];
    names.extend((1..=n_noise).map(|j| format!("noise{j}")));
    let mut features = MetafeatureTable::new(Provenance::CM, names);
    let mut ranks = Vec::with_capacity(n);
    for d in 0..n {
        let f1: f64 = rng.random();
        let f2: f64 = rng.random();
        let mut row = vec![f1, f2];
        row.extend((0..n_noise).map(|_| rng.random::<f64>()));
        features.push(format!("meta-{d:02}"), row)?;
        let scores: Vec<f64> = [f1, f2, 1.0 - f1, 1.0 - f2]
            .iter()
            .map(|s| s + eps.sample(&mut rng))
            .collect();
        ranks.push(average_ranks_desc(&scores));
    }
    let targets = MetatargetTable {
        name: "synthetic".into(),
        algorithms: (1..=META_ALGORITHMS).map(|a| format!("A{a}")).collect(),
        datasets: features.datasets.clone(),
        ranks,
    };
    MetaDataset::new(features, targets)
}
