//! Correlation-based feature selection as a greedy pairwise filter.

use crate::metafeatures::MetafeatureTable;
use crate::{Error, Result};

/// Names of the columns kept by the filter.
///
/// Constant columns are dropped. The remaining columns are scanned in schema
/// order; a column is kept iff its absolute Pearson correlation with every
/// already-kept column is at most `threshold`.
pub fn cfs(table: &MetafeatureTable, threshold: f64) -> Result<Vec<String>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Usage(format!(
            "selection threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let n = table.n_rows();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "feature selection needs at least 2 rows, got {n}"
        )));
    }
    let mut kept: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    for j in 0..table.n_cols() {
        let col = table.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            continue;
        }
        let mean = col.iter().sum::<f64>() / n as f64;
        let centred: Vec<f64> = col.iter().map(|v| v - mean).collect();
        let norm = centred.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            continue;
        }
        let redundant = kept.iter().any(|(_, other, other_norm)| {
            let dot: f64 = centred.iter().zip(other).map(|(a, b)| a * b).sum();
            let r = (dot / (norm * other_norm)).clamp(-1.0, 1.0);
            r.abs() > threshold
        });
        if !redundant {
            kept.push((j, centred, norm));
        }
    }
    Ok(kept
        .into_iter()
        .map(|(j, _, _)| table.names[j].clone())
        .collect())
}
