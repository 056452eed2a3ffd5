//! Forest feature importance by average minimum split level.

use std::io::Write;

use super::models::{LabelRankingModel, LearnerKind};
use crate::{format_sig, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    pub feature: String,
    /// Mean over trees of the feature's minimum split level (root = 1).
    pub level: f64,
    /// 1-based position in ascending `level` order.
    pub rank: usize,
}

/// Importance of every feature of an RF model, most important first.
///
/// In each tree a feature scores the smallest level at which it splits, or the
/// tree's depth plus one when it never splits. Ties keep schema order.
pub fn feature_importance(model: &LabelRankingModel) -> Result<Vec<FeatureImportance>> {
    if model.kind != LearnerKind::Rf {
        return Err(Error::Usage(format!(
            "feature importance needs an RF model, got {}",
            model.kind
        )));
    }
    let p = model.feature_names.len();
    let trees = model.trees();
    let mut total = vec![0.0; p];
    for t in trees {
        let unused = (t.depth() + 1) as f64;
        for (acc, lvl) in total.iter_mut().zip(t.min_split_levels(p)) {
            *acc += lvl.map_or(unused, |l| l as f64);
        }
    }
    let n = trees.len().max(1) as f64;
    let mut out: Vec<(usize, f64)> = total.into_iter().map(|s| s / n).enumerate().collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(r, (j, level))| FeatureImportance {
            feature: model.feature_names[j].clone(),
            level,
            rank: r + 1,
        })
        .collect())
}

/// Writes `rank,feature,level` for the first `top` entries (all when `None`).
pub fn write_importance_csv<W: Write>(
    writer: W,
    rows: &[FeatureImportance],
    top: Option<usize>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rank", "feature", "level"])?;
    for r in rows.iter().take(top.unwrap_or(rows.len())) {
        w.write_record([
            r.rank.to_string(),
            r.feature.clone(),
            format_sig(r.level, 6),
        ])?;
    }
    w.flush()?;
    Ok(())
}
