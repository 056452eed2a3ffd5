//! Error measures for rating prediction and ranking measures for item
//! recommendation.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::models::{ItemScorer, RatingPredictor, TrainedModel};
use super::{Measure, Task};
use crate::dataset::{RatingDataset, Scale};
use crate::{derive_seed, Error, Result};

/// Ranking cutoff of NDCG.
pub const NDCG_CUTOFF: usize = 10;
/// Negatives per user above which a seeded sample is drawn.
pub const MAX_NEGATIVES: usize = 100;

fn check_measures(task: Task, measures: &[Measure]) -> Result<()> {
    if let Some(m) = measures.iter().find(|m| m.task() != task) {
        return Err(Error::Usage(format!(
            "measure {} does not apply to {task:?}",
            m.as_str()
        )));
    }
    Ok(())
}

/// Evaluates a trained model on `test`; `train` supplies the items already
/// seen by each user, which are excluded from ranking candidates.
pub fn evaluate(
    model: &TrainedModel,
    train: &RatingDataset,
    test: &RatingDataset,
    measures: &[Measure],
    seed: u64,
) -> Result<Vec<f64>> {
    check_measures(model.task(), measures)?;
    match model {
        TrainedModel::Rating(m) => evaluate_rating(m, test, test.scale(), measures),
        TrainedModel::ItemRec(m) => evaluate_ranking(m, train, test, measures, seed),
    }
}

pub fn evaluate_rating<P: RatingPredictor>(
    model: &P,
    test: &RatingDataset,
    scale: Scale,
    measures: &[Measure],
) -> Result<Vec<f64>> {
    check_measures(Task::RatingPrediction, measures)?;
    if test.is_empty() {
        return Err(Error::EvaluationUndefined("empty test set".into()));
    }
    let (mut se, mut ae) = (0.0, 0.0);
    for r in test.ratings() {
        let e = model.predict(r.user, r.item) - r.value;
        se += e * e;
        ae += e.abs();
    }
    let n = test.n_ratings() as f64;
    Ok(measures
        .iter()
        .map(|m| match m {
            Measure::Rmse => (se / n).sqrt(),
            _ => ae / n / scale.width(),
        })
        .collect())
}

/// Macro-averaged AUC and NDCG@10 over users with at least one test positive
/// and one candidate negative. Every test rating counts as a positive.
pub fn evaluate_ranking<S: ItemScorer>(
    scorer: &S,
    known: &RatingDataset,
    test: &RatingDataset,
    measures: &[Measure],
    seed: u64,
) -> Result<Vec<f64>> {
    check_measures(Task::ItemRecommendation, measures)?;
    let n_items = test.n_items().max(known.n_items());
    let n_users = test.n_users().max(known.n_users());
    let mut seen: Vec<HashSet<usize>> = vec![HashSet::new(); n_users];
    for r in known.ratings() {
        seen[r.user].insert(r.item);
    }
    let mut pos: Vec<Vec<usize>> = vec![Vec::new(); n_users];
    for r in test.ratings() {
        if !seen[r.user].contains(&r.item) {
            pos[r.user].push(r.item);
        }
    }

    let (mut auc_sum, mut ndcg_sum, mut users) = (0.0, 0.0, 0usize);
    for u in 0..n_users {
        if pos[u].is_empty() {
            continue;
        }
        pos[u].sort_unstable();
        pos[u].dedup();
        let positives = &pos[u];
        let mut negatives: Vec<usize> = (0..n_items)
            .filter(|i| !seen[u].contains(i) && positives.binary_search(i).is_err())
            .collect();
        if negatives.is_empty() {
            continue;
        }
        if negatives.len() > MAX_NEGATIVES {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u as u64));
            let mut picked = index::sample(&mut rng, negatives.len(), MAX_NEGATIVES).into_vec();
            picked.sort_unstable();
            negatives = picked.into_iter().map(|k| negatives[k]).collect();
        }
        let pos_scores: Vec<f64> = positives.iter().map(|&i| scorer.score(u, i)).collect();
        let neg_scores: Vec<f64> = negatives.iter().map(|&i| scorer.score(u, i)).collect();
        auc_sum += auc(&pos_scores, &neg_scores);
        ndcg_sum += ndcg(positives, &pos_scores, &negatives, &neg_scores);
        users += 1;
    }
    if users == 0 {
        return Err(Error::EvaluationUndefined(
            "no user has both a test positive and a candidate negative".into(),
        ));
    }
    let n = users as f64;
    Ok(measures
        .iter()
        .map(|m| match m {
            Measure::Auc => auc_sum / n,
            _ => ndcg_sum / n,
        })
        .collect())
}

/// Fraction of correctly ordered (positive, negative) pairs; ties count half.
fn auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut sorted = neg.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut correct = 0.0;
    for &p in pos {
        let below = sorted.partition_point(|&x| x < p);
        let not_above = sorted.partition_point(|&x| x <= p);
        correct += below as f64 + 0.5 * (not_above - below) as f64;
    }
    correct / (pos.len() * neg.len()) as f64
}

/// Binary-relevance NDCG at [`NDCG_CUTOFF`]; equal scores are ordered by item
/// index.
fn ndcg(pos: &[usize], pos_scores: &[f64], neg: &[usize], neg_scores: &[f64]) -> f64 {
    let mut cand: Vec<(f64, usize, bool)> = pos
        .iter()
        .zip(pos_scores)
        .map(|(&i, &s)| (s, i, true))
        .chain(neg.iter().zip(neg_scores).map(|(&i, &s)| (s, i, false)))
        .collect();
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let gain = |rank: usize| 1.0 / ((rank + 2) as f64).log2();
    let dcg: f64 = cand
        .iter()
        .take(NDCG_CUTOFF)
        .enumerate()
        .filter(|(_, c)| c.2)
        .map(|(r, _)| gain(r))
        .sum();
    let idcg: f64 = (0..pos.len().min(NDCG_CUTOFF)).map(gain).sum();
    dcg / idcg
}

/// Random holdout over rating indices; both sides keep the full id space.
pub fn holdout_split(
    ds: &RatingDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(RatingDataset, RatingDataset)> {
    let n = ds.n_ratings();
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Usage(format!(
            "holdout fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if n < 2 {
        return Err(Error::InfeasibleSplit(format!(
            "holdout needs at least 2 ratings, got {n}"
        )));
    }
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = order.split_at(n_test);
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}
