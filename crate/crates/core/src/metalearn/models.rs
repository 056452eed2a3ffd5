//! Label-ranking metalearners: average ranking, nearest neighbours, ranking
//! tree and ranking forest.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{GrowConfig, RankTree};
use super::MetaDataset;
use crate::metafeatures::MetafeatureVector;
use crate::metatarget::{average_ranks_desc, Ranking};
use crate::{derive_seed, Error, Result};

/// Minimum number of training datasets for any metalearner.
pub const MIN_TRAINING: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "AVG")]
    Avg,
    #[serde(rename = "KNN")]
    Knn,
    #[serde(rename = "RT")]
    Rt,
    #[serde(rename = "RF")]
    Rf,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Avg,
        LearnerKind::Knn,
        LearnerKind::Rt,
        LearnerKind::Rf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LearnerKind::Avg => "AVG",
            LearnerKind::Knn => "KNN",
            LearnerKind::Rt => "RT",
            LearnerKind::Rf => "RF",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown metalearner `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// Neighbours of KNN.
    pub k: usize,
    /// Maximum split depth of RT and RF trees.
    pub max_depth: usize,
    /// Trees in RF.
    pub trees: usize,
    /// Candidate features per RF split; `None` means `⌈√p⌉`.
    pub max_features: Option<usize>,
    /// Whether RF trees train on bootstrap samples.
    pub bootstrap: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            k: 5,
            max_depth: 8,
            trees: 100,
            max_features: None,
            bootstrap: true,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self, kind: LearnerKind) -> Result<()> {
        let bad = match kind {
            LearnerKind::Avg => false,
            LearnerKind::Knn => self.k == 0,
            LearnerKind::Rt => self.max_depth == 0,
            LearnerKind::Rf => {
                self.max_depth == 0 || self.trees == 0 || self.max_features == Some(0)
            }
        };
        if bad {
            return Err(Error::Usage(format!(
                "invalid {kind} hyperparameters: {self:?}"
            )));
        }
        Ok(())
    }

    /// Short `key=value` form of the parameters `kind` uses.
    pub fn describe(&self, kind: LearnerKind) -> String {
        match kind {
            LearnerKind::Avg => String::new(),
            LearnerKind::Knn => format!("k={}", self.k),
            LearnerKind::Rt => format!("max_depth={}", self.max_depth),
            LearnerKind::Rf => format!("trees={} max_depth={}", self.trees, self.max_depth),
        }
    }
}

/// Default search grid per metalearner.
pub fn default_grid(kind: LearnerKind) -> Vec<Hyperparams> {
    let d = Hyperparams::default();
    match kind {
        LearnerKind::Avg => vec![d],
        LearnerKind::Knn => (1..=10).map(|k| Hyperparams { k, ..d.clone() }).collect(),
        LearnerKind::Rt | LearnerKind::Rf => [2, 4, 8]
            .into_iter()
            .map(|max_depth| Hyperparams {
                max_depth,
                ..d.clone()
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum State {
    Avg(Vec<f64>),
    Knn {
        mean: Vec<f64>,
        sd: Vec<f64>,
        rows: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
    },
    Trees(Vec<RankTree>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelRankingModel {
    pub kind: LearnerKind,
    pub hyper: Hyperparams,
    pub seed: u64,
    pub feature_names: Vec<String>,
    pub algorithms: Vec<String>,
    state: State,
}

pub fn fit(
    kind: LearnerKind,
    meta: &MetaDataset,
    hyper: &Hyperparams,
    seed: u64,
) -> Result<LabelRankingModel> {
    hyper.validate(kind)?;
    let n = meta.len();
    if n < MIN_TRAINING {
        return Err(Error::InsufficientData(format!(
            "{kind} needs at least {MIN_TRAINING} training datasets, got {n}"
        )));
    }
    let rows = &meta.features.rows;
    let targets = &meta.targets.ranks;
    let state = match kind {
        LearnerKind::Avg => State::Avg(mean_of(targets)),
        LearnerKind::Knn => {
            let p = meta.features.n_cols();
            let mut mean = vec![0.0; p];
            let mut sd = vec![0.0; p];
            for j in 0..p {
                let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                let m = col.iter().sum::<f64>() / n as f64;
                let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                mean[j] = m;
                sd[j] = var.sqrt();
            }
            let z: Vec<Vec<f64>> = rows.iter().map(|r| standardise(r, &mean, &sd)).collect();
            State::Knn {
                mean,
                sd,
                rows: z,
                targets: targets.clone(),
            }
        }
        LearnerKind::Rt => {
            let cfg = GrowConfig {
                max_depth: hyper.max_depth,
                max_features: None,
            };
            let members: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            State::Trees(vec![RankTree::grow(
                rows, targets, &members, &cfg, &mut rng,
            )])
        }
        LearnerKind::Rf => {
            let p = meta.features.n_cols();
            let mtry = hyper
                .max_features
                .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
                .max(1);
            let cfg = GrowConfig {
                max_depth: hyper.max_depth,
                max_features: Some(mtry),
            };
            let trees = (0..hyper.trees)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
                    let members: Vec<usize> = if hyper.bootstrap {
                        (0..n).map(|_| rng.random_range(0..n)).collect()
                    } else {
                        (0..n).collect()
                    };
                    RankTree::grow(rows, targets, &members, &cfg, &mut rng)
                })
                .collect();
            State::Trees(trees)
        }
    };
    Ok(LabelRankingModel {
        kind,
        hyper: hyper.clone(),
        seed,
        feature_names: meta.features.names.clone(),
        algorithms: meta.algorithms().to_vec(),
        state,
    })
}

fn mean_of<I>(vectors: I) -> Vec<f64>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut acc: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for v in vectors {
        let v = v.as_ref();
        if acc.is_empty() {
            acc = vec![0.0; v.len()];
        }
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
        n += 1;
    }
    acc.iter_mut().for_each(|a| *a /= n.max(1) as f64);
    acc
}

fn standardise(row: &[f64], mean: &[f64], sd: &[f64]) -> Vec<f64> {
    row.iter()
        .zip(mean.iter().zip(sd))
        .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
        .collect()
}

impl LabelRankingModel {
    /// Mean rank vector behind a prediction; lower is better.
    pub fn predict_scores(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.feature_names.len() {
            return Err(Error::Usage(format!(
                "expected {} features, got {}",
                self.feature_names.len(),
                row.len()
            )));
        }
        Ok(match &self.state {
            State::Avg(mean) => mean.clone(),
            State::Knn {
                mean,
                sd,
                rows,
                targets,
            } => {
                let z = standardise(row, mean, sd);
                let mut dist: Vec<(f64, usize)> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        (
                            r.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
                            i,
                        )
                    })
                    .collect();
                dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let k = self.hyper.k.min(rows.len());
                mean_of(dist[..k].iter().map(|&(_, i)| &targets[i]))
            }
            State::Trees(trees) => mean_of(trees.iter().map(|t| t.leaf_mean(row))),
        })
    }

    /// Predicted ranking for a raw feature row in training schema order.
    pub fn predict_row(&self, row: &[f64]) -> Result<Ranking> {
        let scores = self.predict_scores(row)?;
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        Ok(Ranking {
            algorithms: self.algorithms.clone(),
            ranks: average_ranks_desc(&neg),
        })
    }

    /// Predicted ranking; the vector's names must equal the training schema.
    pub fn predict(&self, features: &MetafeatureVector) -> Result<Ranking> {
        if features.names != self.feature_names {
            return Err(Error::Usage(
                "metafeature schema differs from training schema".into(),
            ));
        }
        self.predict_row(&features.values)
    }

    pub fn trees(&self) -> &[RankTree] {
        match &self.state {
            State::Trees(t) => t,
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metafeatures::{MetafeatureTable, Provenance};
    use crate::metatarget::MetatargetTable;

    fn meta(rows: Vec<Vec<f64>>, ranks: Vec<Vec<f64>>) -> MetaDataset {
        let p = rows[0].len();
        let k = ranks[0].len();
        let mut f =
            MetafeatureTable::new(Provenance::RM, (0..p).map(|j| format!("f{j}")).collect());
        for (i, r) in rows.into_iter().enumerate() {
            f.push(format!("d{i}"), r).unwrap();
        }
        let t = MetatargetTable {
            name: "m".into(),
            algorithms: (0..k).map(|a| format!("a{a}")).collect(),
            datasets: f.datasets.clone(),
            ranks,
        };
        MetaDataset::new(f, t).unwrap()
    }

    #[test]
    fn average_ranking() {
        let m = meta(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![
                vec![1.0, 2.0, 3.0],
                vec![2.0, 1.0, 3.0],
                vec![1.0, 2.0, 3.0],
                vec![2.0, 1.0, 3.0],
            ],
        );
        let model = fit(LearnerKind::Avg, &m, &Hyperparams::default(), 0).unwrap();
        assert_eq!(model.predict_scores(&[9.0]).unwrap(), vec![1.5, 1.5, 3.0]);
        assert_eq!(
            model.predict_row(&[9.0]).unwrap().ranks,
            vec![1.5, 1.5, 3.0]
        );
    }

    #[test]
    fn knn_exact_match_and_full_neighbourhood() {
        let ranks = vec![
            vec![1.0, 2.0, 3.0],
            vec![3.0, 2.0, 1.0],
            vec![2.0, 1.0, 3.0],
            vec![1.0, 3.0, 2.0],
        ];
        let m = meta(
            vec![
                vec![0.0, 5.0],
                vec![1.0, 3.0],
                vec![2.0, 2.0],
                vec![4.0, 0.0],
            ],
            ranks.clone(),
        );
        let k1 = fit(
            LearnerKind::Knn,
            &m,
            &Hyperparams {
                k: 1,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        assert_eq!(k1.predict_row(&[1.0, 3.0]).unwrap().ranks, ranks[1]);
        let all = fit(
            LearnerKind::Knn,
            &m,
            &Hyperparams {
                k: 4,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let avg = fit(LearnerKind::Avg, &m, &Hyperparams::default(), 0).unwrap();
        assert_eq!(
            all.predict_row(&[7.0, 7.0]).unwrap(),
            avg.predict_row(&[7.0, 7.0]).unwrap()
        );
    }

    #[test]
    fn degenerate_forest_matches_tree() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64, (i * 3 % 7) as f64])
            .collect();
        let ranks: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                if i % 3 == 0 {
                    vec![1.0, 2.0]
                } else {
                    vec![2.0, 1.0]
                }
            })
            .collect();
        let m = meta(rows, ranks);
        let rt = fit(LearnerKind::Rt, &m, &Hyperparams::default(), 3).unwrap();
        let rf = fit(
            LearnerKind::Rf,
            &m,
            &Hyperparams {
                trees: 1,
                bootstrap: false,
                max_features: Some(2),
                ..Default::default()
            },
            3,
        )
        .unwrap();
        assert_eq!(rt.trees(), rf.trees());
    }

    #[test]
    fn too_few_datasets() {
        let m = meta(
            vec![vec![0.0], vec![1.0]],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        );
        assert!(matches!(
            fit(LearnerKind::Avg, &m, &Hyperparams::default(), 0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn schema_mismatch_is_usage_error() {
        let m = meta(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![vec![1.0, 2.0]; 3],
        );
        let model = fit(LearnerKind::Avg, &m, &Hyperparams::default(), 0).unwrap();
        let v = MetafeatureVector::new(vec!["other".into()], vec![1.0], Provenance::RM).unwrap();
        assert!(matches!(model.predict(&v), Err(Error::Usage(_))));
    }
}
