//! Metalevel learning: feature selection, label-ranking metalearners, LOOCV
//! evaluation, feature importance, baselevel impact and critical-difference
//! statistics.

mod cfs;
mod impact;
mod importance;
mod loocv;
mod models;
mod stats;
mod tau;
mod tree;

use crate::metafeatures::MetafeatureTable;
use crate::metatarget::{MetatargetTable, Ranking};
use crate::{Error, Result};

pub use cfs::cfs;
pub use impact::{baselevel_impact, oracle_impact};
pub use importance::{feature_importance, write_importance_csv, FeatureImportance};
pub use loocv::{loocv, LoocvResult};
pub use models::{default_grid, fit, Hyperparams, LabelRankingModel, LearnerKind};
pub use stats::{critical_difference, friedman_nemenyi, nemenyi_q, write_cd_csv, CdResult};
pub use tau::{kendall_tau, TauB};
pub use tree::RankTree;

/// Features and ranking labels over the same datasets, rows aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaDataset {
    pub features: MetafeatureTable,
    pub targets: MetatargetTable,
}

impl MetaDataset {
    /// Aligns `targets` to the row order of `features`; both must cover the
    /// same datasets.
    pub fn new(features: MetafeatureTable, targets: MetatargetTable) -> Result<Self> {
        if features.n_rows() != targets.datasets.len() {
            return Err(Error::Alignment(format!(
                "{} feature rows but {} metatargets",
                features.n_rows(),
                targets.datasets.len()
            )));
        }
        let targets = targets.reorder(&features.datasets)?;
        Ok(MetaDataset { features, targets })
    }

    pub fn len(&self) -> usize {
        self.features.n_rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn algorithms(&self) -> &[String] {
        &self.targets.algorithms
    }

    pub fn target(&self, row: usize) -> Ranking {
        self.targets.ranking(row)
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> MetaDataset {
        let mut features = self.features.clone();
        features.datasets = indices
            .iter()
            .map(|&i| self.features.datasets[i].clone())
            .collect();
        features.rows = indices
            .iter()
            .map(|&i| self.features.rows[i].clone())
            .collect();
        let mut targets = self.targets.clone();
        targets.datasets = features.datasets.clone();
        targets.ranks = indices
            .iter()
            .map(|&i| self.targets.ranks[i].clone())
            .collect();
        MetaDataset { features, targets }
    }

    /// All rows except `row`.
    pub fn without(&self, row: usize) -> MetaDataset {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != row).collect();
        self.subset(&keep)
    }
}
