//! Baselevel impact: performance reached by following a predicted ranking.

use crate::baselevel::PerformanceTable;
use crate::metatarget::Ranking;
use crate::{Error, Result};

/// Mean over datasets of the best true performance among the top-`t`
/// predicted algorithms, for `t = 1..=|A|`.
///
/// Algorithms are taken in predicted rank order with ties broken by the
/// performance table's algorithm order. The curve is non-decreasing in the
/// measure's orientation.
pub fn baselevel_impact(
    predicted: &[(String, Ranking)],
    truth: &PerformanceTable,
    measure: &str,
) -> Result<Vec<f64>> {
    let m = truth
        .measure_index(measure)
        .ok_or_else(|| Error::Alignment(format!("measure `{measure}` not in performance table")))?;
    let orientation = truth.measures[m].orientation;
    if predicted.is_empty() {
        return Err(Error::Alignment("no predictions".into()));
    }
    let k = truth.algorithms.len();
    let mut curve = vec![0.0; k];
    for (dataset, ranking) in predicted {
        let d = truth.dataset_index(dataset).ok_or_else(|| {
            Error::Alignment(format!("dataset `{dataset}` not in performance table"))
        })?;
        if ranking.algorithms.len() != k {
            return Err(Error::Alignment(format!(
                "ranking for `{dataset}` covers {} algorithms, table has {k}",
                ranking.algorithms.len()
            )));
        }
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(k);
        for (a, alg) in truth.algorithms.iter().enumerate() {
            let r = ranking.rank_of(alg).ok_or_else(|| {
                Error::Alignment(format!(
                    "algorithm `{alg}` missing from ranking of `{dataset}`"
                ))
            })?;
            order.push((r, a));
        }
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut best = f64::NAN;
        for (t, &(_, a)) in order.iter().enumerate() {
            let v = truth.value(d, a, m);
            if best.is_nan() || orientation.better(v, best) {
                best = v;
            }
            curve[t] += best;
        }
    }
    let n = predicted.len() as f64;
    Ok(curve.into_iter().map(|c| c / n).collect())
}

/// The curve obtained from the true rankings of `measure`.
pub fn oracle_impact(truth: &PerformanceTable, measure: &str) -> Result<Vec<f64>> {
    let targets = crate::metatarget::individual_metatargets(truth, measure)?;
    let predicted: Vec<(String, Ranking)> = (0..targets.datasets.len())
        .map(|d| (targets.datasets[d].clone(), targets.ranking(d)))
        .collect();
    baselevel_impact(&predicted, truth, measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselevel::{Measure, MeasureSpec};

    fn table(values: Vec<f64>, m: MeasureSpec) -> PerformanceTable {
        PerformanceTable::new(
            vec!["d".into()],
            (0..values.len()).map(|a| format!("a{a}")).collect(),
            vec![m],
            values,
        )
        .unwrap()
    }

    #[test]
    fn hand_traced_curve() {
        let t = table(vec![0.9, 0.7, 0.5], Measure::Ndcg.spec());
        let pred = Ranking {
            algorithms: t.algorithms.clone(),
            ranks: vec![2.0, 1.0, 3.0],
        };
        let c = baselevel_impact(&[("d".into(), pred)], &t, "NDCG").unwrap();
        assert_eq!(c, vec![0.7, 0.9, 0.9]);
        assert_eq!(oracle_impact(&t, "NDCG").unwrap(), vec![0.9; 3]);
    }

    #[test]
    fn lower_better_takes_running_minimum() {
        let t = table(vec![1.0, 0.8, 1.2], Measure::Rmse.spec());
        let pred = Ranking {
            algorithms: t.algorithms.clone(),
            ranks: vec![1.0, 3.0, 2.0],
        };
        let c = baselevel_impact(&[("d".into(), pred)], &t, "RMSE").unwrap();
        assert_eq!(c, vec![1.0, 1.0, 0.8]);
    }

    #[test]
    fn missing_algorithm_is_alignment_error() {
        let t = table(vec![0.9, 0.7], Measure::Auc.spec());
        let pred = Ranking {
            algorithms: vec!["a0".into(), "zz".into()],
            ranks: vec![1.0, 2.0],
        };
        assert!(matches!(
            baselevel_impact(&[("d".into(), pred)], &t, "AUC"),
            Err(Error::Alignment(_))
        ));
    }
}
