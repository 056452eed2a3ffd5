//! Rating-prediction and item-recommendation baselearners.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Algorithm, BaselearnerConfig, Task};
use crate::dataset::{RatingDataset, Scale};
use crate::{Error, Result};

const INIT_SD: f64 = 0.1;

pub trait RatingPredictor {
    fn predict(&self, user: usize, item: usize) -> f64;
}

pub trait ItemScorer {
    fn score(&self, user: usize, item: usize) -> f64;
}

#[derive(Debug, Clone)]
pub struct RatingModel {
    pub algorithm: Algorithm,
    scale: Scale,
    mu: f64,
    user_bias: Vec<f64>,
    item_bias: Vec<f64>,
    user_known: Vec<bool>,
    item_known: Vec<bool>,
    k: usize,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl RatingModel {
    pub fn global_mean(&self) -> f64 {
        self.mu
    }

    pub fn user_bias(&self, user: usize) -> f64 {
        self.user_bias.get(user).copied().unwrap_or(0.0)
    }

    pub fn item_bias(&self, item: usize) -> f64 {
        self.item_bias.get(item).copied().unwrap_or(0.0)
    }

    fn known(&self, user: usize, item: usize) -> (bool, bool) {
        (
            self.user_known.get(user).copied().unwrap_or(false),
            self.item_known.get(item).copied().unwrap_or(false),
        )
    }

    fn dot(&self, user: usize, item: usize) -> f64 {
        let k = self.k;
        self.p[user * k..(user + 1) * k]
            .iter()
            .zip(&self.q[item * k..(item + 1) * k])
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl RatingPredictor for RatingModel {
    fn predict(&self, user: usize, item: usize) -> f64 {
        let (uk, ik) = self.known(user, item);
        let bias = |model: &RatingModel| {
            model.mu
                + if uk { model.user_bias[user] } else { 0.0 }
                + if ik { model.item_bias[item] } else { 0.0 }
        };
        let raw = match self.algorithm {
            Algorithm::GlobalAverage => self.mu,
            Algorithm::UserItemBaseline => bias(self),
            Algorithm::Mf if uk && ik => self.dot(user, item),
            Algorithm::Mf => self.mu,
            Algorithm::BiasedMf if uk && ik => bias(self) + self.dot(user, item),
            _ => bias(self),
        };
        self.scale.clamp(raw)
    }
}

#[derive(Debug, Clone)]
pub struct ItemRecModel {
    pub algorithm: Algorithm,
    popularity: Vec<f64>,
    item_bias: Vec<f64>,
    user_known: Vec<bool>,
    k: usize,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl ItemRecModel {
    /// Items ordered by descending score for `user`; ties by item index.
    pub fn ranking(&self, user: usize) -> Vec<usize> {
        let mut items: Vec<usize> = (0..self.popularity.len()).collect();
        items.sort_by(|&a, &b| {
            self.score(user, b)
                .total_cmp(&self.score(user, a))
                .then(a.cmp(&b))
        });
        items
    }
}

impl ItemScorer for ItemRecModel {
    fn score(&self, user: usize, item: usize) -> f64 {
        match self.algorithm {
            Algorithm::MostPopular => self.popularity.get(item).copied().unwrap_or(0.0),
            _ => {
                let b = self.item_bias.get(item).copied().unwrap_or(0.0);
                if !self.user_known.get(user).copied().unwrap_or(false)
                    || item >= self.popularity.len()
                {
                    return b;
                }
                let k = self.k;
                b + self.p[user * k..(user + 1) * k]
                    .iter()
                    .zip(&self.q[item * k..(item + 1) * k])
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum TrainedModel {
    Rating(RatingModel),
    ItemRec(ItemRecModel),
}

impl TrainedModel {
    pub fn task(&self) -> Task {
        match self {
            TrainedModel::Rating(_) => Task::RatingPrediction,
            TrainedModel::ItemRec(_) => Task::ItemRecommendation,
        }
    }
}

/// Trains whichever model `cfg` selects.
pub fn train(cfg: &BaselearnerConfig, train: &RatingDataset) -> Result<TrainedModel> {
    match cfg.task() {
        Task::RatingPrediction => train_rating_model(cfg, train).map(TrainedModel::Rating),
        Task::ItemRecommendation => train_itemrec_model(cfg, train).map(TrainedModel::ItemRec),
    }
}

fn check_training(cfg: &BaselearnerConfig, train: &RatingDataset, task: Task) -> Result<()> {
    if cfg.task() != task {
        return Err(Error::Usage(format!(
            "{} is not a {task:?} algorithm",
            cfg.algorithm
        )));
    }
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Training(format!(
            "{}: empty training set",
            cfg.algorithm
        )));
    }
    Ok(())
}

fn normal_init(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let dist = Normal::new(0.0, INIT_SD).expect("valid normal");
    (0..n).map(|_| dist.sample(rng)).collect()
}

fn known_flags(train: &RatingDataset) -> (Vec<bool>, Vec<bool>) {
    let mut uk = vec![false; train.n_users()];
    let mut ik = vec![false; train.n_items()];
    for r in train.ratings() {
        uk[r.user] = true;
        ik[r.item] = true;
    }
    (uk, ik)
}

pub fn train_rating_model(cfg: &BaselearnerConfig, train: &RatingDataset) -> Result<RatingModel> {
    check_training(cfg, train, Task::RatingPrediction)?;
    let (nu, ni) = (train.n_users(), train.n_items());
    let (user_known, item_known) = known_flags(train);
    let mut model = RatingModel {
        algorithm: cfg.algorithm,
        scale: train.scale(),
        mu: train.mean_rating(),
        user_bias: vec![0.0; nu],
        item_bias: vec![0.0; ni],
        user_known,
        item_known,
        k: 0,
        p: Vec::new(),
        q: Vec::new(),
    };
    match cfg.algorithm {
        Algorithm::GlobalAverage => {}
        Algorithm::UserItemBaseline => fit_baseline_biases(&mut model, train, cfg.regularization),
        Algorithm::Mf | Algorithm::BiasedMf => {
            sgd_factors(&mut model, train, cfg, cfg.algorithm == Algorithm::BiasedMf)
        }
        _ => unreachable!("task checked"),
    }
    Ok(model)
}

/// Ridge-damped closed-form biases: item biases first, then user biases on the
/// item-debiased residuals.
fn fit_baseline_biases(model: &mut RatingModel, train: &RatingDataset, lambda: f64) {
    let mu = model.mu;
    let mut sum = vec![0.0; train.n_items()];
    let mut cnt = vec![0.0; train.n_items()];
    for r in train.ratings() {
        sum[r.item] += r.value - mu;
        cnt[r.item] += 1.0;
    }
    for i in 0..sum.len() {
        if cnt[i] + lambda > 0.0 {
            model.item_bias[i] = sum[i] / (lambda + cnt[i]);
        }
    }
    let mut sum = vec![0.0; train.n_users()];
    let mut cnt = vec![0.0; train.n_users()];
    for r in train.ratings() {
        sum[r.user] += r.value - mu - model.item_bias[r.item];
        cnt[r.user] += 1.0;
    }
    for u in 0..sum.len() {
        if cnt[u] + lambda > 0.0 {
            model.user_bias[u] = sum[u] / (lambda + cnt[u]);
        }
    }
}

fn sgd_factors(
    model: &mut RatingModel,
    train: &RatingDataset,
    cfg: &BaselearnerConfig,
    biased: bool,
) {
    let k = cfg.factors;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    model.k = k;
    model.p = normal_init(&mut rng, train.n_users() * k);
    model.q = normal_init(&mut rng, train.n_items() * k);
    let (lr, reg) = (cfg.learning_rate, cfg.regularization);
    let mut order: Vec<usize> = (0..train.n_ratings()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let r = train.ratings()[idx];
            let (u, i) = (r.user, r.item);
            let mut pred = model.dot(u, i);
            if biased {
                pred += model.mu + model.user_bias[u] + model.item_bias[i];
            }
            let e = r.value - pred;
            if biased {
                model.user_bias[u] += lr * (e - reg * model.user_bias[u]);
                model.item_bias[i] += lr * (e - reg * model.item_bias[i]);
            }
            for f in 0..k {
                let pu = model.p[u * k + f];
                let qi = model.q[i * k + f];
                model.p[u * k + f] += lr * (e * qi - reg * pu);
                model.q[i * k + f] += lr * (e * pu - reg * qi);
            }
        }
    }
}

/// Per-user sorted positive items.
fn positives(train: &RatingDataset) -> Vec<Vec<usize>> {
    let mut pos = vec![Vec::new(); train.n_users()];
    for r in train.ratings() {
        pos[r.user].push(r.item);
    }
    for p in pos.iter_mut() {
        p.sort_unstable();
        p.dedup();
    }
    pos
}

pub fn train_itemrec_model(cfg: &BaselearnerConfig, train: &RatingDataset) -> Result<ItemRecModel> {
    check_training(cfg, train, Task::ItemRecommendation)?;
    let (nu, ni) = (train.n_users(), train.n_items());
    let mut popularity = vec![0.0; ni];
    for r in train.ratings() {
        popularity[r.item] += 1.0;
    }
    let (user_known, _) = known_flags(train);
    let mut model = ItemRecModel {
        algorithm: cfg.algorithm,
        popularity,
        item_bias: vec![0.0; ni],
        user_known,
        k: 0,
        p: Vec::new(),
        q: Vec::new(),
    };
    if cfg.algorithm == Algorithm::MostPopular {
        return Ok(model);
    }
    let k = cfg.factors;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    model.k = k;
    model.p = normal_init(&mut rng, nu * k);
    model.q = normal_init(&mut rng, ni * k);
    let pos = positives(train);
    let sampler = TripleSampler::new(train, &pos, cfg.algorithm == Algorithm::WbprMf);
    for _ in 0..cfg.epochs {
        for _ in 0..train.n_ratings() {
            if let Some((u, i, j)) = sampler.sample(&mut rng) {
                bpr_step(&mut model, u, i, j, cfg.learning_rate, cfg.regularization);
            }
        }
    }
    Ok(model)
}

fn bpr_step(m: &mut ItemRecModel, u: usize, i: usize, j: usize, lr: f64, reg: f64) {
    let k = m.k;
    let x = m.score(u, i) - m.score(u, j);
    // d/dx ln sigma(x) = sigma(-x)
    let z = 1.0 / (1.0 + x.exp());
    m.item_bias[i] += lr * (z - reg * m.item_bias[i]);
    m.item_bias[j] += lr * (-z - reg * m.item_bias[j]);
    for f in 0..k {
        let pu = m.p[u * k + f];
        let qi = m.q[i * k + f];
        let qj = m.q[j * k + f];
        m.p[u * k + f] += lr * (z * (qi - qj) - reg * pu);
        m.q[i * k + f] += lr * (z * pu - reg * qi);
        m.q[j * k + f] += lr * (-z * pu - reg * qj);
    }
}

/// Draws `(user, positive, negative)` triples.
///
/// Uniform mode picks a user uniformly, then one of their positives, then a
/// uniform non-positive item. Weighted mode picks a rating uniformly, so users
/// are drawn proportional to activity, and draws negatives proportional to
/// item popularity.
struct TripleSampler<'a> {
    train: &'a RatingDataset,
    pos: &'a [Vec<usize>],
    users: Vec<usize>,
    weighted: bool,
}

impl<'a> TripleSampler<'a> {
    fn new(train: &'a RatingDataset, pos: &'a [Vec<usize>], weighted: bool) -> Self {
        let ni = train.n_items();
        let users = (0..pos.len())
            .filter(|&u| !pos[u].is_empty() && pos[u].len() < ni)
            .collect();
        TripleSampler {
            train,
            pos,
            users,
            weighted,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<(usize, usize, usize)> {
        if self.users.is_empty() {
            return None;
        }
        let ni = self.train.n_items();
        let ratings = self.train.ratings();
        let (u, i) = if self.weighted {
            let r = ratings[rng.random_range(0..ratings.len())];
            (r.user, r.item)
        } else {
            let u = self.users[rng.random_range(0..self.users.len())];
            (u, self.pos[u][rng.random_range(0..self.pos[u].len())])
        };
        let pu = &self.pos[u];
        if pu.len() >= ni {
            return None;
        }
        if self.weighted {
            for _ in 0..32 {
                let j = ratings[rng.random_range(0..ratings.len())].item;
                if pu.binary_search(&j).is_err() {
                    return Some((u, i, j));
                }
            }
        }
        loop {
            let j = rng.random_range(0..ni);
            if pu.binary_search(&j).is_err() {
                return Some((u, i, j));
            }
        }
    }
}

/// `n` BPR triples drawn uniformly from `train`, for loss monitoring.
pub fn bpr_triples(train: &RatingDataset, n: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    let pos = positives(train);
    let sampler = TripleSampler::new(train, &pos, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).filter_map(|_| sampler.sample(&mut rng)).collect()
}

/// Mean `-ln sigma(s(u,i) - s(u,j))` over `triples`.
pub fn bpr_loss<S: ItemScorer>(model: &S, triples: &[(usize, usize, usize)]) -> f64 {
    if triples.is_empty() {
        return 0.0;
    }
    triples
        .iter()
        .map(|&(u, i, j)| {
            let x = model.score(u, i) - model.score(u, j);
            // -ln sigma(x) = ln(1 + e^{-x}), computed stably
            if x > 0.0 {
                (-x).exp().ln_1p()
            } else {
                -x + x.exp().ln_1p()
            }
        })
        .sum::<f64>()
        / triples.len() as f64
}
