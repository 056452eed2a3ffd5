//! Leave-one-out evaluation with inner leave-one-out grid search.

use rayon::prelude::*;

use super::models::{fit, Hyperparams, LearnerKind, MIN_TRAINING};
use super::tau::kendall_tau;
use super::MetaDataset;
use crate::metatarget::Ranking;
use crate::{derive_seed, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoocvResult {
    pub kind: LearnerKind,
    pub datasets: Vec<String>,
    /// Kendall tau of each held-out prediction against its true ranking.
    pub scores: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of `scores`.
    pub sd: f64,
    pub chosen: Vec<Hyperparams>,
    pub predictions: Vec<Ranking>,
}

/// Tau of a prediction against the truth; fully tied sides score 0.
fn score(pred: &Ranking, truth: &Ranking) -> Result<f64> {
    Ok(kendall_tau(&pred.ranks, &truth.ranks)?.value)
}

/// Mean held-out tau of `hyper` by leave-one-out over `train`. Falls back to
/// the training-set score when a held-out split would leave fewer than
/// [`MIN_TRAINING`] datasets.
fn inner_score(
    kind: LearnerKind,
    train: &MetaDataset,
    hyper: &Hyperparams,
    seed: u64,
) -> Result<f64> {
    let n = train.len();
    if n - 1 < MIN_TRAINING {
        let model = fit(kind, train, hyper, seed)?;
        let mut total = 0.0;
        for i in 0..n {
            total += score(
                &model.predict_row(&train.features.rows[i])?,
                &train.target(i),
            )?;
        }
        return Ok(total / n as f64);
    }
    let mut total = 0.0;
    for i in 0..n {
        let model = fit(kind, &train.without(i), hyper, derive_seed(seed, i as u64))?;
        total += score(
            &model.predict_row(&train.features.rows[i])?,
            &train.target(i),
        )?;
    }
    Ok(total / n as f64)
}

/// Grid point with the best inner score; ties keep the earliest.
fn select(
    kind: LearnerKind,
    train: &MetaDataset,
    grid: &[Hyperparams],
    seed: u64,
) -> Result<Hyperparams> {
    if grid.len() == 1 {
        return Ok(grid[0].clone());
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (g, hyper) in grid.iter().enumerate() {
        let s = inner_score(kind, train, hyper, seed)?;
        if s > best.0 {
            best = (s, g);
        }
    }
    Ok(grid[best.1].clone())
}

pub fn loocv(
    meta: &MetaDataset,
    kind: LearnerKind,
    grid: &[Hyperparams],
    seed: u64,
) -> Result<LoocvResult> {
    if grid.is_empty() {
        return Err(Error::Usage(format!(
            "empty hyperparameter grid for {kind}"
        )));
    }
    for h in grid {
        h.validate(kind)?;
    }
    let n = meta.len();
    if n < MIN_TRAINING + 1 {
        return Err(Error::InsufficientData(format!(
            "leave-one-out needs at least {} datasets, got {n}",
            MIN_TRAINING + 1
        )));
    }
    let folds: Vec<(f64, Hyperparams, Ranking)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let fold_seed = derive_seed(seed, i as u64);
            let train = meta.without(i);
            let hyper = select(kind, &train, grid, derive_seed(fold_seed, 1))?;
            let model = fit(kind, &train, &hyper, fold_seed)?;
            let pred = model.predict_row(&meta.features.rows[i])?;
            Ok((score(&pred, &meta.target(i))?, hyper, pred))
        })
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = folds.iter().map(|f| f.0).collect();
    let mean = scores.iter().sum::<f64>() / n as f64;
    let sd = (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let (chosen, predictions) = folds.into_iter().map(|f| (f.1, f.2)).unzip();
    Ok(LoocvResult {
        kind,
        datasets: meta.features.datasets.clone(),
        scores,
        mean,
        sd,
        chosen,
        predictions,
    })
}
