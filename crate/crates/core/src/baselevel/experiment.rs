//! k-fold cross-validation over a corpus of datasets.

use rayon::prelude::*;

use super::{evaluate, train, BaselearnerConfig, Measure, PerformanceTable};
use crate::dataset::RatingDataset;
use crate::{derive_seed, Error, Result};

/// Fold-averaged measures of one algorithm on one dataset.
///
/// Folds run in parallel; each fold trains with a seed derived from `seed`,
/// the configured seed and the fold index, so results do not depend on
/// scheduling.
pub fn run_cell(
    dataset_id: &str,
    ds: &RatingDataset,
    cfg: &BaselearnerConfig,
    measures: &[Measure],
    k: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let fail = |fold: Option<usize>, e: Error| {
        let at = fold.map(|f| format!(", fold {f}")).unwrap_or_default();
        Error::Experiment(format!("{dataset_id}, {}{at}: {e}", cfg.algorithm))
    };
    let plan = ds.kfold_split(k, seed).map_err(|e| fail(None, e))?;
    let per_fold: Vec<Vec<f64>> = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(fi, fold)| {
            let train_set = ds.subset(&fold.train);
            let test_set = ds.subset(&fold.test);
            let fold_cfg = cfg
                .clone()
                .with_seed(derive_seed(derive_seed(seed, cfg.seed), fi as u64));
            let model = train(&fold_cfg, &train_set).map_err(|e| fail(Some(fi), e))?;
            let values = evaluate(
                &model,
                &train_set,
                &test_set,
                measures,
                derive_seed(seed, (fi as u64) | (1 << 32)),
            )
            .map_err(|e| fail(Some(fi), e))?;
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(fail(Some(fi), Error::InvalidPerformance(v.to_string())));
            }
            Ok(values)
        })
        .collect::<Result<_>>()?;
    let n = per_fold.len() as f64;
    Ok((0..measures.len())
        .map(|m| per_fold.iter().map(|f| f[m]).sum::<f64>() / n)
        .collect())
}

/// Runs every algorithm on every dataset with k-fold CV and collects a
/// complete [`PerformanceTable`]. Any failed cell aborts the experiment; all
/// failures are listed in the error.
pub fn run_experiment(
    corpus: &[(String, RatingDataset)],
    algs: &[BaselearnerConfig],
    measures: &[Measure],
    k: usize,
    seed: u64,
) -> Result<PerformanceTable> {
    if corpus.is_empty() {
        return Err(Error::Usage("empty corpus".into()));
    }
    let Some(first) = algs.first() else {
        return Err(Error::Usage("no algorithms configured".into()));
    };
    if measures.is_empty() {
        return Err(Error::Usage("no measures configured".into()));
    }
    let task = first.task();
    for a in algs {
        if a.task() != task {
            return Err(Error::Usage(format!(
                "{} and {} belong to different tasks",
                first.algorithm, a.algorithm
            )));
        }
        a.validate()?;
    }
    if let Some(m) = measures.iter().find(|m| m.task() != task) {
        return Err(Error::Usage(format!(
            "measure {} does not apply to {task:?}",
            m.as_str()
        )));
    }
    let names: Vec<String> = algs.iter().map(|a| a.algorithm.to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::Usage(format!("algorithm {n} configured twice")));
        }
    }

    let cells: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|d| (0..algs.len()).map(move |a| (d, a)))
        .collect();
    let results: Vec<Result<Vec<f64>>> = cells
        .par_iter()
        .map(|&(d, a)| run_cell(&corpus[d].0, &corpus[d].1, &algs[a], measures, k, seed))
        .collect();

    let mut values = Vec::with_capacity(cells.len() * measures.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(v) => values.extend(v),
            Err(e) => failures.push(e.to_string()),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Experiment(format!(
            "{} failed cell(s): {}",
            failures.len(),
            failures.join("; ")
        )));
    }
    PerformanceTable::new(
        corpus.iter().map(|(id, _)| id.clone()).collect(),
        names,
        measures.iter().map(Measure::spec).collect(),
        values,
    )
}
