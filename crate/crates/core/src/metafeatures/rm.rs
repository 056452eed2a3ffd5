//! Rating-matrix (RM) metafeatures.

use super::{post_function, MetafeatureVector, PostFunction, Provenance};
use crate::dataset::RatingDataset;
use crate::{Error, Result};

const OBJECT_FUNCTIONS: [&str; 3] = ["count", "mean", "sum"];

/// The 73 RM names: `{U,I}.{count,mean,sum}.{pf}`, `R.ratings.{pf}`, then
/// `nusers`, `nitems`, `nratings`.
pub fn rm_schema() -> Vec<String> {
    let mut names = Vec::with_capacity(73);
    for object in ["U", "I"] {
        for f in OBJECT_FUNCTIONS {
            for pf in PostFunction::RATING_MATRIX {
                names.push(format!("{object}.{f}.{}", pf.as_str()));
            }
        }
    }
    for pf in PostFunction::RATING_MATRIX {
        names.push(format!("R.ratings.{}", pf.as_str()));
    }
    names.extend(["nusers", "nitems", "nratings"].map(String::from));
    names
}

/// Per-row (`by_user`) or per-column rating lists, skipping empty ones.
fn groups(ds: &RatingDataset, by_user: bool) -> Vec<Vec<f64>> {
    let n = if by_user { ds.n_users() } else { ds.n_items() };
    let mut out = vec![Vec::new(); n];
    for r in ds.ratings() {
        out[if by_user { r.user } else { r.item }].push(r.value);
    }
    out.retain(|g| !g.is_empty());
    out
}

pub fn extract_rm(ds: &RatingDataset) -> Result<MetafeatureVector> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut values = Vec::with_capacity(73);
    for by_user in [true, false] {
        let g = groups(ds, by_user);
        let count: Vec<f64> = g.iter().map(|v| v.len() as f64).collect();
        let sum: Vec<f64> = g.iter().map(|v| v.iter().sum()).collect();
        let mean: Vec<f64> = sum.iter().zip(&count).map(|(s, c)| s / c).collect();
        for per_object in [&count, &mean, &sum] {
            for pf in PostFunction::RATING_MATRIX {
                values.push(post_function(per_object, pf));
            }
        }
    }
    let ratings: Vec<f64> = ds.ratings().iter().map(|r| r.value).collect();
    for pf in PostFunction::RATING_MATRIX {
        values.push(post_function(&ratings, pf));
    }
    let (nu, ni, nr) = ds.stats();
    values.extend([nu as f64, ni as f64, nr as f64]);
    MetafeatureVector::new(rm_schema(), values, Provenance::RM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Format, RatingDataset};

    fn toy() -> RatingDataset {
        RatingDataset::parse(
            "u1,i1,5\nu1,i2,3\nu1,i3,4\nu2,i1,4\nu2,i3,2\nu3,i2,3\nu3,i3,5\n".as_bytes(),
            Format::CsvTriples,
            None,
        )
        .unwrap()
    }

    #[test]
    fn schema_has_73_unique_names() {
        let s = rm_schema();
        assert_eq!(s.len(), 73);
        assert!(s.contains(&"I.count.gini".to_string()));
        assert!(s.contains(&"R.ratings.kurtosis".to_string()));
        let set: std::collections::HashSet<_> = s.iter().collect();
        assert_eq!(set.len(), 73);
    }

    #[test]
    fn toy_values() {
        let v = extract_rm(&toy()).unwrap();
        assert_eq!(v.len(), 73);
        assert_eq!(v.get("I.count.max"), Some(3.0));
        assert_eq!(v.get("I.count.min"), Some(2.0));
        assert_eq!(v.get("U.sum.max"), Some(12.0));
        assert_eq!(v.get("nusers"), Some(3.0));
        assert_eq!(v.get("nratings"), Some(7.0));
        assert!((v.get("R.ratings.mean").unwrap() - 26.0 / 7.0).abs() < 1e-12);
    }
}
