//! Subsampling landmarkers (SL): baselearner performance on a small sample.

use super::{MetafeatureVector, Provenance};
use crate::baselevel::{
    evaluate, holdout_split, train, Algorithm, BaselearnerConfig, Measure, Task,
};
use crate::dataset::RatingDataset;
use crate::{derive_seed, Error, Result};

/// Minimum sample size for a holdout landmarker.
pub const MIN_SAMPLE_RATINGS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkerConfig {
    /// Fraction of ratings kept in the sample.
    pub rate: f64,
    /// Test fraction of the holdout on the sample.
    pub holdout: f64,
    pub seed: u64,
    pub learners: Vec<(BaselearnerConfig, Vec<Measure>)>,
}

impl Default for LandmarkerConfig {
    /// Every baselearner with its task's measures: 14 landmarkers.
    fn default() -> Self {
        let learners = [Task::ItemRecommendation, Task::RatingPrediction]
            .into_iter()
            .flat_map(|t| {
                t.algorithms()
                    .into_iter()
                    .map(move |a: Algorithm| (BaselearnerConfig::new(a), t.default_measures()))
            })
            .collect();
        LandmarkerConfig {
            rate: 0.1,
            holdout: 0.2,
            seed: 1,
            learners,
        }
    }
}

impl LandmarkerConfig {
    /// `Algorithm.Measure` names in extraction order.
    pub fn schema(&self) -> Vec<String> {
        self.learners
            .iter()
            .flat_map(|(c, ms)| {
                ms.iter()
                    .map(move |m| format!("{}.{}", c.algorithm, m.as_str()))
            })
            .collect()
    }
}

pub fn extract_landmarkers(
    dataset_id: &str,
    ds: &RatingDataset,
    cfg: &LandmarkerConfig,
) -> Result<MetafeatureVector> {
    if cfg.learners.is_empty() {
        return Err(Error::Usage("no landmarker baselearners configured".into()));
    }
    let infeasible = |msg: String| Error::LandmarkerInfeasible {
        dataset: dataset_id.to_string(),
        msg,
    };
    let sample = match ds.sample_ratings(cfg.rate, cfg.seed) {
        Ok(s) => s,
        Err(Error::EmptySample) => return Err(infeasible("sample contains no ratings".into())),
        Err(e) => return Err(e),
    };
    if sample.n_ratings() < MIN_SAMPLE_RATINGS {
        return Err(infeasible(format!(
            "sample has {} ratings, at least {MIN_SAMPLE_RATINGS} needed",
            sample.n_ratings()
        )));
    }
    let (train_set, test_set) = holdout_split(&sample, cfg.holdout, derive_seed(cfg.seed, 1))?;
    let mut values = Vec::new();
    for (learner, measures) in &cfg.learners {
        let model = train(learner, &train_set).map_err(|e| infeasible(e.to_string()))?;
        let v = evaluate(
            &model,
            &train_set,
            &test_set,
            measures,
            derive_seed(cfg.seed, 2),
        )
        .map_err(|e| match e {
            Error::Usage(_) => e,
            other => infeasible(format!("{}: {other}", learner.algorithm)),
        })?;
        values.extend(v);
    }
    MetafeatureVector::new(cfg.schema(), values, Provenance::SL)
}
