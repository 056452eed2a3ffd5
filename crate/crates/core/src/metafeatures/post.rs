//! Statistical post-functions that collapse a vector of values to one scalar.

use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostFunction {
    Max,
    Min,
    Mean,
    Sd,
    Variance,
    Median,
    Mode,
    Entropy,
    Gini,
    Skewness,
    Kurtosis,
    Sum,
    Count,
}

impl PostFunction {
    /// The ten post-functions of the rating-matrix metafeatures.
    pub const RATING_MATRIX: [PostFunction; 10] = [
        PostFunction::Max,
        PostFunction::Min,
        PostFunction::Mean,
        PostFunction::Sd,
        PostFunction::Median,
        PostFunction::Mode,
        PostFunction::Entropy,
        PostFunction::Gini,
        PostFunction::Skewness,
        PostFunction::Kurtosis,
    ];

    /// The four post-functions of the graph metafeatures.
    pub const GRAPH: [PostFunction; 4] = [
        PostFunction::Mean,
        PostFunction::Variance,
        PostFunction::Skewness,
        PostFunction::Entropy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PostFunction::Max => "max",
            PostFunction::Min => "min",
            PostFunction::Mean => "mean",
            PostFunction::Sd => "sd",
            PostFunction::Variance => "variance",
            PostFunction::Median => "median",
            PostFunction::Mode => "mode",
            PostFunction::Entropy => "entropy",
            PostFunction::Gini => "gini",
            PostFunction::Skewness => "skewness",
            PostFunction::Kurtosis => "kurtosis",
            PostFunction::Sum => "sum",
            PostFunction::Count => "count",
        }
    }

    pub fn apply(&self, values: &[f64]) -> f64 {
        post_function(values, *self)
    }
}

impl FromStr for PostFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "max" => PostFunction::Max,
            "min" => PostFunction::Min,
            "mean" => PostFunction::Mean,
            "sd" => PostFunction::Sd,
            "variance" => PostFunction::Variance,
            "median" => PostFunction::Median,
            "mode" => PostFunction::Mode,
            "entropy" => PostFunction::Entropy,
            "gini" => PostFunction::Gini,
            "skewness" => PostFunction::Skewness,
            "kurtosis" => PostFunction::Kurtosis,
            "sum" => PostFunction::Sum,
            "count" => PostFunction::Count,
            other => return Err(Error::Usage(format!("unknown post-function `{other}`"))),
        })
    }
}

/// Applies `pf` to `values`. Empty input yields `0` for every post-function.
pub fn post_function(values: &[f64], pf: PostFunction) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    match pf {
        PostFunction::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        PostFunction::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        PostFunction::Mean => mean(values),
        PostFunction::Sum => values.iter().sum(),
        PostFunction::Count => nf,
        PostFunction::Variance => sample_variance(values),
        PostFunction::Sd => sample_variance(values).sqrt(),
        PostFunction::Median => {
            let s = sorted(values);
            if n % 2 == 1 {
                s[n / 2]
            } else {
                (s[n / 2 - 1] + s[n / 2]) / 2.0
            }
        }
        PostFunction::Mode => {
            let s = sorted(values);
            let (mut best, mut best_run) = (s[0], 0usize);
            let mut i = 0;
            while i < n {
                let mut j = i;
                while j < n && s[j] == s[i] {
                    j += 1;
                }
                // Strictly greater keeps the smallest value on ties.
                if j - i > best_run {
                    best = s[i];
                    best_run = j - i;
                }
                i = j;
            }
            best
        }
        PostFunction::Entropy => histogram_entropy(values),
        PostFunction::Gini => gini(values),
        PostFunction::Skewness => {
            let (m2, m3, _) = central_moments(values);
            if m2 <= 0.0 {
                0.0
            } else {
                m3 / m2.powf(1.5)
            }
        }
        PostFunction::Kurtosis => {
            let (m2, _, m4) = central_moments(values);
            if m2 <= 0.0 {
                0.0
            } else {
                m4 / (m2 * m2) - 3.0
            }
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= (data_scale(values) * 1e-12).powi(2) {
        0.0
    } else {
        var
    }
}

fn data_scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0)
}

/// Biased central moments `(m2, m3, m4)`. Moments below a relative epsilon of
/// the data scale are treated as zero so constant input gives exact zeros.
fn central_moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let m = mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    if m2 <= (data_scale(values) * 1e-12).powi(2) {
        (0.0, 0.0, 0.0)
    } else {
        (m2, m3, m4)
    }
}

/// Shannon entropy (nats) of an equal-width histogram with `⌈log2(n) + 1⌉` bins.
fn histogram_entropy(values: &[f64]) -> f64 {
    let n = values.len();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return 0.0;
    }
    let bins = ((n as f64).log2() + 1.0).ceil().max(1.0) as usize;
    let width = hi - lo;
    let mut counts = vec![0usize; bins];
    for v in values {
        let b = (((v - lo) / width) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let nf = n as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / nf;
            -p * p.ln()
        })
        .sum()
}

/// Gini coefficient after shifting values to be nonnegative.
fn gini(values: &[f64]) -> f64 {
    let mut s = sorted(values);
    let lo = s[0];
    if lo == s[s.len() - 1] {
        return 0.0;
    }
    if lo < 0.0 {
        s.iter_mut().for_each(|v| *v -= lo);
    }
    let total: f64 = s.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let n = s.len() as f64;
    let weighted: f64 = s
        .iter()
        .enumerate()
        .map(|(i, v)| (i as f64 + 1.0) * v)
        .sum();
    (2.0 * weighted / (n * total) - (n + 1.0) / n).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(v: &[f64], f: PostFunction) -> f64 {
        post_function(v, f)
    }

    #[test]
    fn basic_values() {
        assert_eq!(pf(&[1.0, 2.0, 3.0], PostFunction::Mean), 2.0);
        assert_eq!(pf(&[1.0, 2.0, 3.0], PostFunction::Skewness), 0.0);
        assert_eq!(pf(&[4.0; 5], PostFunction::Entropy), 0.0);
        assert_eq!(pf(&[2.0; 5], PostFunction::Gini), 0.0);
        assert!((pf(&[1.0, 2.0, 3.0, 4.0], PostFunction::Variance) - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(pf(&[3.0, 1.0, 2.0, 10.0], PostFunction::Median), 2.5);
        assert_eq!(pf(&[3.0, 1.0, 3.0, 1.0, 2.0], PostFunction::Mode), 1.0);
        assert_eq!(pf(&[5.0, 1.0], PostFunction::Max), 5.0);
        assert_eq!(pf(&[5.0, 1.0], PostFunction::Count), 2.0);
    }

    #[test]
    fn empty_is_zero() {
        for f in PostFunction::RATING_MATRIX {
            assert_eq!(pf(&[], f), 0.0);
        }
        assert_eq!(pf(&[], PostFunction::Sum), 0.0);
    }

    #[test]
    fn constant_shape_statistics_are_zero() {
        let c = [0.1; 7];
        assert_eq!(pf(&c, PostFunction::Skewness), 0.0);
        assert_eq!(pf(&c, PostFunction::Kurtosis), 0.0);
        assert_eq!(pf(&c, PostFunction::Sd), 0.0);
    }

    #[test]
    fn reference_moments() {
        // [1, 2, 3, 10]: mean 4, deviations (-3,-2,-1,6).
        // m2 = 50/4, m3 = (-27-8-1+216)/4 = 45, m4 = (81+16+1+1296)/4 = 348.5
        let v = [1.0, 2.0, 3.0, 10.0];
        let m2: f64 = 12.5;
        assert!((pf(&v, PostFunction::Skewness) - 45.0 / m2.powf(1.5)).abs() < 1e-12);
        assert!((pf(&v, PostFunction::Kurtosis) - (348.5 / (m2 * m2) - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn gini_and_entropy_reference() {
        // Gini of [0, 0, 0, 1] = mean |xi - xj| / (2 mean) = (6/16) / (2/4) = 0.75
        assert!((pf(&[0.0, 0.0, 0.0, 1.0], PostFunction::Gini) - 0.75).abs() < 1e-12);
        // 4 values -> 3 bins over [0, 3]: edges 0,1,2,3 -> counts (1,1,2).
        let e = pf(&[0.0, 1.0, 2.0, 3.0], PostFunction::Entropy);
        let expect = -(0.25f64 * 0.25f64.ln() * 2.0 + 0.5 * 0.5f64.ln());
        assert!((e - expect).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for f in PostFunction::RATING_MATRIX.iter().chain(&[
            PostFunction::Sum,
            PostFunction::Count,
            PostFunction::Variance,
        ]) {
            assert_eq!(f.as_str().parse::<PostFunction>().unwrap(), *f);
        }
        assert!("average".parse::<PostFunction>().is_err());
    }
}
