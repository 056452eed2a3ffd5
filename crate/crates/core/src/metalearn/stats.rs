//! Friedman test and Nemenyi critical difference.

use std::io::Write;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::metatarget::average_ranks_desc;
use crate::{format_sig, Error, Result};

/// Studentized range quantiles divided by √2 for k = 2..=10.
const Q_05: [f64; 9] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
];
const Q_10: [f64; 9] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
];

pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::Usage(format!(
            "no Nemenyi quantiles for alpha = {alpha}"
        )));
    };
    if !(2..=10).contains(&k) {
        return Err(Error::Usage(format!(
            "Nemenyi quantiles cover 2..=10 learners, got {k}"
        )));
    }
    Ok(table[k - 2])
}

/// `q_alpha * sqrt(k (k + 1) / (6 N))`.
pub fn critical_difference(alpha: f64, k: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InsufficientData("no datasets".into()));
    }
    Ok(nemenyi_q(alpha, k)? * ((k * (k + 1)) as f64 / (6.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdResult {
    pub learners: Vec<String>,
    /// Mean rank per learner; rank 1 is the highest score.
    pub avg_ranks: Vec<f64>,
    pub chi2: f64,
    pub p_value: f64,
    pub significant: bool,
    pub alpha: f64,
    pub cd: f64,
    pub n_datasets: usize,
}

/// `scores[learner][dataset]`, higher is better.
pub fn friedman_nemenyi(learners: &[String], scores: &[Vec<f64>], alpha: f64) -> Result<CdResult> {
    let k = learners.len();
    if k < 2 || scores.len() != k {
        return Err(Error::InsufficientData(format!(
            "need at least 2 learners with scores, got {k} names and {} score rows",
            scores.len()
        )));
    }
    let n = scores[0].len();
    if n < 2 || scores.iter().any(|s| s.len() != n) {
        return Err(Error::InsufficientData(
            "need at least 2 datasets and equal-length score rows".into(),
        ));
    }
    if scores.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::Validation("NaN score".into()));
    }
    let mut sums = vec![0.0; k];
    for d in 0..n {
        let col: Vec<f64> = scores.iter().map(|s| s[d]).collect();
        for (acc, r) in sums.iter_mut().zip(average_ranks_desc(&col)) {
            *acc += r;
        }
    }
    let avg_ranks: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let kf = k as f64;
    let chi2 = (12.0 * n as f64 / (kf * (kf + 1.0))
        * (avg_ranks.iter().map(|r| r * r).sum::<f64>() - kf * (kf + 1.0).powi(2) / 4.0))
        .max(0.0);
    let p_value = if chi2 > 0.0 {
        let dist = ChiSquared::new(kf - 1.0).map_err(|e| Error::Validation(e.to_string()))?;
        dist.sf(chi2)
    } else {
        1.0
    };
    Ok(CdResult {
        learners: learners.to_vec(),
        avg_ranks,
        chi2,
        p_value,
        significant: p_value < alpha,
        alpha,
        cd: critical_difference(alpha, k, n)?,
        n_datasets: n,
    })
}

/// Writes `learner,avg_rank`.
pub fn write_cd_csv<W: Write>(writer: W, res: &CdResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["learner", "avg_rank"])?;
    for (l, r) in res.learners.iter().zip(&res.avg_ranks) {
        w.write_record([l.clone(), format_sig(*r, 10)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cd_for_four_learners_on_38_datasets() {
        let cd = critical_difference(0.05, 4, 38).unwrap();
        assert!((cd - 0.761).abs() < 1e-3, "{cd}");
    }

    #[test]
    fn identical_learners_are_not_significant() {
        let names = vec!["a".to_string(), "b".to_string()];
        let s = vec![0.1, 0.5, 0.9];
        let r = friedman_nemenyi(&names, &[s.clone(), s], 0.05).unwrap();
        assert_eq!(r.avg_ranks, vec![1.5, 1.5]);
        assert!(!r.significant);
    }

    #[test]
    fn dominant_learner_ranks_first() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let scores = vec![
            vec![0.9; 20],
            (0..20).map(|i| 0.1 * (i % 5) as f64).collect(),
            vec![0.0; 20],
        ];
        let r = friedman_nemenyi(&names, &scores, 0.05).unwrap();
        assert_eq!(r.avg_ranks[0], 1.0);
        assert!(r.significant);
    }
}
