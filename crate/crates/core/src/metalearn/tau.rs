//! Kendall tau-b in O(n log n) (Knight's algorithm).

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauB {
    pub value: f64,
    /// Set when either side is entirely tied; `value` is then 0.
    pub degenerate: bool,
}

pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<TauB> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::Alignment(format!(
            "rank vectors of length {n} and {}",
            b.len()
        )));
    }
    if n < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "tau needs at least 2 items, got {n}"
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Validation("NaN in rank vector".into()));
    }
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let n0 = (n * (n - 1) / 2) as f64;
    let tied_pairs = |runs: &mut dyn Iterator<Item = usize>| -> f64 {
        runs.map(|t| (t * (t.saturating_sub(1)) / 2) as f64).sum()
    };
    let n1 = tied_pairs(&mut runs(&pairs, |x, y| x.0 == y.0));
    let n3 = tied_pairs(&mut runs(&pairs, |x, y| x == y));

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys) as f64;
    let n2 = tied_pairs(&mut runs(&ys, |x, y| x == y));

    let denom = ((n0 - n1) * (n0 - n2)).sqrt();
    if !(denom > 0.0) {
        return Ok(TauB {
            value: 0.0,
            degenerate: true,
        });
    }
    let s = n0 - n1 - n2 + n3 - 2.0 * swaps;
    Ok(TauB {
        value: (s / denom).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// Lengths of maximal runs of consecutive equal elements.
fn runs<'a, T>(v: &'a [T], eq: impl Fn(&T, &T) -> bool + 'a) -> impl Iterator<Item = usize> + 'a {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= v.len() {
            return None;
        }
        let start = i;
        while i + 1 < v.len() && eq(&v[i + 1], &v[start]) {
            i += 1;
        }
        i += 1;
        Some(i - start)
    })
}

/// Sorts `v` ascending and returns the number of strictly inverted pairs.
fn merge_count(v: &mut [f64]) -> usize {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid]) + merge_count(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += mid - i;
            merged.push(v[j]);
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    swaps
}
