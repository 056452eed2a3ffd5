//! The `object.function.postfunction` metafeature framework and its
//! extractors.
//!
//! Recursive metafeatures nest the inner level in brackets, e.g.
//! `G.[pairs.similarity.variance].skewness` applies `variance` to every row of
//! the pairwise similarity matrix over all nodes, then `skewness` to the
//! resulting per-node values.

mod graph_features;
mod landmarkers;
mod post;
mod rm;

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metalearn::cfs;
use crate::{format_sig, Error, Result};

pub use graph_features::{extract_graph, graph_schema, GraphExtractionConfig, GRAPH_LEVEL_COUNTS};
pub use landmarkers::{extract_landmarkers, LandmarkerConfig};
pub use post::{post_function, PostFunction};
pub use rm::{extract_rm, rm_schema};

/// Which meta-approach produced a metafeature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// Rating-matrix statistics.
    RM,
    /// Subsampling landmarkers.
    SL,
    /// Graph metafeatures.
    GR,
    /// Comprehensive: feature-selected union of the others.
    CM,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::RM => "RM",
            Provenance::SL => "SL",
            Provenance::GR => "GR",
            Provenance::CM => "CM",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RM" => Ok(Provenance::RM),
            "SL" => Ok(Provenance::SL),
            "GR" => Ok(Provenance::GR),
            "CM" => Ok(Provenance::CM),
            _ => Err(Error::Usage(format!("unknown metafeature set `{s}`"))),
        }
    }
}

/// Named metafeature values of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MetafeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl MetafeatureVector {
    /// Builds a vector, replacing non-finite values by `0`.
    pub fn new(names: Vec<String>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::Usage(format!(
                "{} names for {} values",
                names.len(),
                values.len()
            )));
        }
        check_unique(&names)?;
        let values = values
            .into_iter()
            .map(|v| if v.is_finite() { v } else { 0.0 })
            .collect();
        Ok(MetafeatureVector {
            names,
            values,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate metafeature name `{n}`"
            )));
        }
    }
    Ok(())
}

/// Datasets × metafeatures matrix with one shared name schema.
#[derive(Debug, Clone, PartialEq)]
pub struct MetafeatureTable {
    pub provenance: Provenance,
    pub names: Vec<String>,
    pub datasets: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl MetafeatureTable {
    pub fn new(provenance: Provenance, names: Vec<String>) -> Self {
        MetafeatureTable {
            provenance,
            names,
            datasets: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Stacks per-dataset vectors; all must share the same schema.
    pub fn from_vectors(rows: Vec<(String, MetafeatureVector)>) -> Result<Self> {
        let mut iter = rows.into_iter();
        let (first_id, first) = iter
            .next()
            .ok_or_else(|| Error::InsufficientData("no metafeature rows".into()))?;
        let mut table = MetafeatureTable::new(first.provenance, first.names.clone());
        table.push(first_id, first.values)?;
        for (id, v) in iter {
            if v.names != table.names {
                return Err(Error::Alignment(format!(
                    "dataset `{id}` has a different metafeature schema"
                )));
            }
            table.push(id, v.values)?;
        }
        Ok(table)
    }

    pub fn push(&mut self, dataset: String, values: Vec<f64>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::Alignment(format!(
                "dataset `{dataset}` has {} values for {} metafeatures",
                values.len(),
                self.names.len()
            )));
        }
        if self.datasets.contains(&dataset) {
            return Err(Error::Validation(format!("duplicate dataset `{dataset}`")));
        }
        self.datasets.push(dataset);
        self.rows.push(values);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row_of(&self, dataset: &str) -> Option<&[f64]> {
        self.datasets
            .iter()
            .position(|d| d == dataset)
            .map(|i| self.rows[i].as_slice())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn vector(&self, row: usize) -> MetafeatureVector {
        MetafeatureVector {
            names: self.names.clone(),
            values: self.rows[row].clone(),
            provenance: self.provenance,
        }
    }

    /// Restricts the table to the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<MetafeatureTable> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::Usage(format!("unknown metafeature `{n}`")))
            })
            .collect::<Result<_>>()?;
        Ok(MetafeatureTable {
            provenance: self.provenance,
            names: names.to_vec(),
            datasets: self.datasets.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }

    /// Reorders rows to `order`; the dataset sets must coincide.
    pub fn reorder(&self, order: &[String]) -> Result<MetafeatureTable> {
        if order.len() != self.datasets.len() {
            return Err(Error::Alignment(format!(
                "expected {} datasets, found {}",
                order.len(),
                self.datasets.len()
            )));
        }
        let rows = order
            .iter()
            .map(|d| {
                self.row_of(d)
                    .map(<[f64]>::to_vec)
                    .ok_or_else(|| Error::Alignment(format!("dataset `{d}` missing")))
            })
            .collect::<Result<_>>()?;
        Ok(MetafeatureTable {
            provenance: self.provenance,
            names: self.names.clone(),
            datasets: order.to_vec(),
            rows,
        })
    }

    /// Writes `dataset,<names...>` with values at 10 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["dataset".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (d, row) in self.datasets.iter().zip(&self.rows) {
            let mut rec = vec![d.clone()];
            rec.extend(row.iter().map(|&v| format_sig(v, 10)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, provenance: Provenance) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("dataset") {
            return Err(Error::parse(1, "first column must be `dataset`"));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        check_unique(&names)?;
        let mut table = MetafeatureTable::new(provenance, names);
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let values = rec
                .iter()
                .skip(1)
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(line, format!("invalid value `{s}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let dataset = rec.get(0).unwrap_or_default().to_string();
            if dataset.is_empty() {
                return Err(Error::parse(line, "empty dataset id"));
            }
            table
                .push(dataset, values)
                .map_err(|e| Error::parse(line, e.to_string()))?;
        }
        Ok(table)
    }
}

/// Column-wise concatenation of several tables (rows aligned to the first
/// table's dataset order) followed by correlation feature selection.
pub fn comprehensive(tables: &[MetafeatureTable], threshold: f64) -> Result<MetafeatureTable> {
    let merged = concat(tables)?;
    let keep = cfs(&merged, threshold)?;
    let mut out = merged.select(&keep)?;
    out.provenance = Provenance::CM;
    Ok(out)
}

/// Concatenates tables column-wise without selection.
pub fn concat(tables: &[MetafeatureTable]) -> Result<MetafeatureTable> {
    let first = tables
        .first()
        .ok_or_else(|| Error::Usage("no metafeature tables to combine".into()))?;
    let order = first.datasets.clone();
    let mut names = Vec::new();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); order.len()];
    for t in tables {
        let t = t.reorder(&order)?;
        names.extend(t.names.iter().cloned());
        for (acc, r) in rows.iter_mut().zip(t.rows) {
            acc.extend(r);
        }
    }
    check_unique(&names)?;
    Ok(MetafeatureTable {
        provenance: Provenance::CM,
        names,
        datasets: order,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(p: Provenance, names: &[&str], rows: &[(&str, Vec<f64>)]) -> MetafeatureTable {
        let mut t = MetafeatureTable::new(p, names.iter().map(|s| s.to_string()).collect());
        for (d, r) in rows {
            t.push(d.to_string(), r.clone()).unwrap();
        }
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = table(
            Provenance::GR,
            &["G.order", "G.[pairs.similarity.variance].skewness"],
            &[("a", vec![6.0, 1.0 / 3.0]), ("b", vec![2.0, -0.5])],
        );
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "dataset,G.order,G.[pairs.similarity.variance].skewness\na,6,0.3333333333\n"
        ));
        let back = MetafeatureTable::read_csv(buf.as_slice(), Provenance::GR).unwrap();
        assert_eq!(back.names, t.names);
        assert_eq!(back.rows[1], vec![2.0, -0.5]);
    }

    #[test]
    fn read_rejects_bad_input() {
        assert!(MetafeatureTable::read_csv("x,a\nd,1\n".as_bytes(), Provenance::RM).is_err());
        assert!(
            MetafeatureTable::read_csv("dataset,a\nd,zz\n".as_bytes(), Provenance::RM).is_err()
        );
        assert!(
            MetafeatureTable::read_csv("dataset,a,a\nd,1,2\n".as_bytes(), Provenance::RM).is_err()
        );
        assert!(
            MetafeatureTable::read_csv("dataset,a\nd,1\nd,2\n".as_bytes(), Provenance::RM).is_err()
        );
        assert!(
            MetafeatureTable::read_csv("dataset,a\nd,1,2\n".as_bytes(), Provenance::RM).is_err()
        );
    }

    #[test]
    fn vector_sanitises_non_finite() {
        let v = MetafeatureVector::new(vec!["a".into()], vec![f64::NAN], Provenance::RM).unwrap();
        assert_eq!(v.values, vec![0.0]);
        assert!(MetafeatureVector::new(
            vec!["a".into(), "a".into()],
            vec![1.0, 2.0],
            Provenance::RM
        )
        .is_err());
    }

    #[test]
    fn concat_widths_add_up() {
        let a = table(
            Provenance::RM,
            &["x", "y"],
            &[("d1", vec![1.0, 2.0]), ("d2", vec![3.0, 1.0])],
        );
        let b = table(
            Provenance::GR,
            &["z"],
            &[("d2", vec![5.0]), ("d1", vec![4.0])],
        );
        let c = concat(&[a, b]).unwrap();
        assert_eq!(c.n_cols(), 3);
        assert_eq!(c.rows[0], vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn comprehensive_drops_duplicated_column() {
        let rm = table(
            Provenance::RM,
            &["R.ratings.mean", "copy_of_gr"],
            &[
                ("d1", vec![1.0, 10.0]),
                ("d2", vec![5.0, 20.0]),
                ("d3", vec![2.0, 40.0]),
                ("d4", vec![3.0, 5.0]),
            ],
        );
        let gr = table(
            Provenance::GR,
            &["G.order"],
            &[
                ("d1", vec![10.0]),
                ("d2", vec![20.0]),
                ("d3", vec![40.0]),
                ("d4", vec![5.0]),
            ],
        );
        let cm = comprehensive(&[rm, gr], 0.7).unwrap();
        assert_eq!(cm.provenance, Provenance::CM);
        let survivors = cm
            .names
            .iter()
            .filter(|n| *n == "copy_of_gr" || *n == "G.order")
            .count();
        assert_eq!(survivors, 1);
    }

    #[test]
    fn comprehensive_alignment_error() {
        let a = table(
            Provenance::RM,
            &["x"],
            &[("d1", vec![1.0]), ("d2", vec![2.0])],
        );
        let b = table(
            Provenance::GR,
            &["z"],
            &[("d1", vec![1.0]), ("d3", vec![2.0])],
        );
        assert!(matches!(
            comprehensive(&[a, b], 0.7),
            Err(Error::Alignment(_))
        ));
    }
}
