//! Metatargets: single-measure rankings, Pareto-frontier multicriteria
//! rankings and their alignment.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::baselevel::{MeasureSpec, Orientation, PerformanceTable};
use crate::metalearn::kendall_tau;
use crate::{Error, Result};

/// Rank per algorithm; 1 is best and ties may share a rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub algorithms: Vec<String>,
    pub ranks: Vec<f64>,
}

impl Ranking {
    pub fn rank_of(&self, algorithm: &str) -> Option<f64> {
        self.algorithms
            .iter()
            .position(|a| a == algorithm)
            .map(|i| self.ranks[i])
    }
}

/// Oriented performance points of every algorithm on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInterestSpace {
    pub dataset: String,
    pub algorithms: Vec<String>,
    pub measures: Vec<MeasureSpec>,
    /// Raw performance, `points[algorithm][measure]`.
    pub points: Vec<Vec<f64>>,
}

impl DatasetInterestSpace {
    pub fn from_table(
        table: &PerformanceTable,
        dataset: &str,
        measures: &[String],
    ) -> Result<Self> {
        let d = table.dataset_index(dataset).ok_or_else(|| {
            Error::Alignment(format!("dataset `{dataset}` not in performance table"))
        })?;
        let idx: Vec<usize> = measures
            .iter()
            .map(|m| {
                table.measure_index(m).ok_or_else(|| {
                    Error::Alignment(format!("measure `{m}` not in performance table"))
                })
            })
            .collect::<Result<_>>()?;
        Ok(DatasetInterestSpace {
            dataset: dataset.to_string(),
            algorithms: table.algorithms.clone(),
            measures: idx.iter().map(|&m| table.measures[m].clone()).collect(),
            points: (0..table.algorithms.len())
                .map(|a| idx.iter().map(|&m| table.value(d, a, m)).collect())
                .collect(),
        })
    }

    /// Points mapped so that larger is better on every coordinate.
    pub fn oriented(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&self.measures)
                    .map(|(v, m)| m.orientation.orient(*v))
                    .collect()
            })
            .collect()
    }
}

/// Best-first ranking of one measure; exact ties get their average position.
pub fn individual_ranking(
    algorithms: &[String],
    perfs: &[f64],
    orientation: Orientation,
) -> Result<Ranking> {
    if perfs.is_empty() || perfs.len() != algorithms.len() {
        return Err(Error::Alignment(format!(
            "{} algorithms but {} performance values",
            algorithms.len(),
            perfs.len()
        )));
    }
    if let Some(i) = perfs.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidPerformance(format!(
            "NaN for {}",
            algorithms[i]
        )));
    }
    let oriented: Vec<f64> = perfs.iter().map(|&v| orientation.orient(v)).collect();
    Ok(Ranking {
        algorithms: algorithms.to_vec(),
        ranks: average_ranks_desc(&oriented),
    })
}

/// Fractional ranks with the largest value at rank 1.
pub fn average_ranks_desc(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// `a` dominates `b`: at least as good everywhere, strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Frontier index of every oriented point (larger is better).
///
/// Points are visited in descending coordinate-sum order, ties broken by
/// descending lexicographic order; this is a linear extension of dominance,
/// so every dominator of a point is visited before it. A point's frontier is
/// one more than the deepest frontier among its dominators, which equals the
/// layer at which iterated skyline peeling removes it.
pub fn frontiers_of(points: &[Vec<f64>]) -> Vec<usize> {
    let sums: Vec<f64> = points.iter().map(|p| p.iter().sum()).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        sums[b].total_cmp(&sums[a]).then_with(|| {
            points[b]
                .iter()
                .zip(&points[a])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut frontier = vec![0usize; points.len()];
    for (pos, &p) in order.iter().enumerate() {
        let depth = order[..pos]
            .iter()
            .filter(|&&q| dominates(&points[q], &points[p]))
            .map(|&q| frontier[q])
            .max()
            .unwrap_or(0);
        frontier[p] = depth + 1;
    }
    frontier
}

pub fn skyline_frontiers(space: &DatasetInterestSpace) -> Vec<usize> {
    frontiers_of(&space.oriented())
}

/// Frontier indices over `measures` used as ranks.
pub fn multicriteria_ranking(
    table: &PerformanceTable,
    dataset: &str,
    measures: &[String],
) -> Result<Ranking> {
    let space = DatasetInterestSpace::from_table(table, dataset, measures)?;
    if measures.is_empty() {
        return Err(Error::Usage(
            "multicriteria ranking needs at least one measure".into(),
        ));
    }
    if let Some(a) = space
        .points
        .iter()
        .position(|p| p.iter().any(|v| v.is_nan()))
    {
        return Err(Error::InvalidPerformance(format!(
            "NaN for {}",
            space.algorithms[a]
        )));
    }
    Ok(Ranking {
        algorithms: space.algorithms.clone(),
        ranks: skyline_frontiers(&space)
            .into_iter()
            .map(|f| f as f64)
            .collect(),
    })
}

/// Kendall tau-b between two rankings of the same algorithm set.
pub fn alignment(individual: &Ranking, multicriteria: &Ranking) -> Result<f64> {
    let n = individual.algorithms.len();
    if n < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "alignment needs at least 2 algorithms, got {n}"
        )));
    }
    if multicriteria.algorithms.len() != n {
        return Err(Error::Alignment(
            "rankings cover different algorithm sets".into(),
        ));
    }
    let other: Vec<f64> = individual
        .algorithms
        .iter()
        .map(|a| {
            multicriteria
                .rank_of(a)
                .ok_or_else(|| Error::Alignment(format!("algorithm `{a}` missing from ranking")))
        })
        .collect::<Result<_>>()?;
    Ok(kendall_tau(&individual.ranks, &other)?.value)
}

/// One ranking per dataset over a shared algorithm list.
#[derive(Debug, Clone, PartialEq)]
pub struct MetatargetTable {
    /// A measure name, or `multicriteria`.
    pub name: String,
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    /// `ranks[dataset][algorithm]`.
    pub ranks: Vec<Vec<f64>>,
}

pub const MULTICRITERIA: &str = "multicriteria";

impl MetatargetTable {
    pub fn ranking(&self, d: usize) -> Ranking {
        Ranking {
            algorithms: self.algorithms.clone(),
            ranks: self.ranks[d].clone(),
        }
    }

    pub fn row_of(&self, dataset: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d == dataset)
    }

    /// Rows reordered to `datasets`.
    pub fn reorder(&self, datasets: &[String]) -> Result<MetatargetTable> {
        let ranks = datasets
            .iter()
            .map(|d| {
                self.row_of(d)
                    .map(|r| self.ranks[r].clone())
                    .ok_or_else(|| Error::Alignment(format!("dataset `{d}` has no metatarget")))
            })
            .collect::<Result<_>>()?;
        Ok(MetatargetTable {
            name: self.name.clone(),
            algorithms: self.algorithms.clone(),
            datasets: datasets.to_vec(),
            ranks,
        })
    }

    /// Writes `dataset,algorithm,rank`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["dataset", "algorithm", "rank"])?;
        for (d, row) in self.datasets.iter().zip(&self.ranks) {
            for (a, r) in self.algorithms.iter().zip(row) {
                w.write_record([d.as_str(), a.as_str(), &format!("{r}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `dataset,algorithm,rank`; every dataset must rank the same
    /// algorithms, each rank within `[1, |A|]`.
    pub fn read_csv<R: Read>(reader: R, name: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().from_reader(reader);
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["dataset", "algorithm", "rank"] {
            return Err(Error::parse(1, "expected header `dataset,algorithm,rank`"));
        }
        let mut datasets: Vec<String> = Vec::new();
        let mut algorithms: Vec<String> = Vec::new();
        let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() != 3 || rec[0].is_empty() || rec[1].is_empty() {
                return Err(Error::parse(line, "expected `dataset,algorithm,rank`"));
            }
            let rank: f64 = rec[2]
                .parse()
                .ok()
                .filter(|r: &f64| r.is_finite())
                .ok_or_else(|| Error::parse(line, format!("invalid rank `{}`", &rec[2])))?;
            let d = position_or_push(&mut datasets, &rec[0]);
            let a = position_or_push(&mut algorithms, &rec[1]);
            if cells.insert((d, a), rank).is_some() {
                return Err(Error::parse(line, "duplicate (dataset, algorithm)"));
            }
        }
        let n = algorithms.len() as f64;
        let mut ranks = Vec::with_capacity(datasets.len());
        for (d, ds) in datasets.iter().enumerate() {
            let mut row = Vec::with_capacity(algorithms.len());
            for (a, alg) in algorithms.iter().enumerate() {
                let r = *cells.get(&(d, a)).ok_or_else(|| {
                    Error::Validation(format!("dataset `{ds}` has no rank for `{alg}`"))
                })?;
                if !(1.0..=n).contains(&r) {
                    return Err(Error::Validation(format!(
                        "rank {r} of `{alg}` on `{ds}` outside [1, {n}]"
                    )));
                }
                row.push(r);
            }
            ranks.push(row);
        }
        Ok(MetatargetTable {
            name: name.to_string(),
            algorithms,
            datasets,
            ranks,
        })
    }
}

fn position_or_push(list: &mut Vec<String>, key: &str) -> usize {
    list.iter().position(|x| x == key).unwrap_or_else(|| {
        list.push(key.to_string());
        list.len() - 1
    })
}

pub fn individual_metatargets(table: &PerformanceTable, measure: &str) -> Result<MetatargetTable> {
    let m = table
        .measure_index(measure)
        .ok_or_else(|| Error::Alignment(format!("measure `{measure}` not in performance table")))?;
    let orientation = table.measures[m].orientation;
    let ranks = (0..table.datasets.len())
        .map(|d| {
            individual_ranking(&table.algorithms, &table.column(d, m), orientation).map(|r| r.ranks)
        })
        .collect::<Result<_>>()?;
    Ok(MetatargetTable {
        name: measure.to_string(),
        algorithms: table.algorithms.clone(),
        datasets: table.datasets.clone(),
        ranks,
    })
}

pub fn multicriteria_metatargets(
    table: &PerformanceTable,
    measures: &[String],
) -> Result<MetatargetTable> {
    let ranks = table
        .datasets
        .iter()
        .map(|d| multicriteria_ranking(table, d, measures).map(|r| r.ranks))
        .collect::<Result<_>>()?;
    Ok(MetatargetTable {
        name: MULTICRITERIA.to_string(),
        algorithms: table.algorithms.clone(),
        datasets: table.datasets.clone(),
        ranks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRow {
    pub dataset: String,
    pub measure: String,
    pub correlation: f64,
}

/// Correlation of every individual metatarget with the multicriteria one built
/// from all of `measures`, per dataset.
pub fn alignment_report(
    table: &PerformanceTable,
    measures: &[String],
) -> Result<Vec<AlignmentRow>> {
    let multi = multicriteria_metatargets(table, measures)?;
    let individual: Vec<MetatargetTable> = measures
        .iter()
        .map(|m| individual_metatargets(table, m))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (d, ds) in table.datasets.iter().enumerate() {
        for ind in &individual {
            rows.push(AlignmentRow {
                dataset: ds.clone(),
                measure: ind.name.clone(),
                correlation: alignment(&ind.ranking(d), &multi.ranking(d))?,
            });
        }
    }
    Ok(rows)
}

/// Writes `dataset,measure,correlation`.
pub fn write_alignment_csv<W: Write>(writer: W, rows: &[AlignmentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dataset", "measure", "correlation"])?;
    for r in rows {
        w.write_record([
            r.dataset.as_str(),
            r.measure.as_str(),
            &format!("{}", r.correlation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Datasets with any correlation below `threshold`, one row per dataset:
/// `dataset,M1,..,Mk,corr(M1, Multicriteria),..`.
pub fn write_flagged_csv<W: Write>(
    writer: W,
    rows: &[AlignmentRow],
    threshold: f64,
) -> Result<usize> {
    let mut datasets: Vec<String> = Vec::new();
    let mut by_dataset: HashMap<String, Vec<&AlignmentRow>> = HashMap::new();
    for r in rows {
        if !by_dataset.contains_key(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
        by_dataset.entry(r.dataset.clone()).or_default().push(r);
    }
    let k = by_dataset.values().map(Vec::len).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["Dataset".to_string()];
    header.extend((1..=k).map(|i| format!("M{i}")));
    header.extend((1..=k).map(|i| format!("corr(M{i}, Multicriteria)")));
    w.write_record(&header)?;
    let mut flagged = 0;
    for d in &datasets {
        let group = &by_dataset[d];
        if !group.iter().any(|r| r.correlation < threshold) {
            continue;
        }
        let mut rec = vec![d.clone()];
        rec.extend(group.iter().map(|r| r.measure.clone()));
        rec.extend(std::iter::repeat_n(String::new(), k - group.len()));
        rec.extend(group.iter().map(|r| format!("{:.3}", r.correlation)));
        rec.extend(std::iter::repeat_n(String::new(), k - group.len()));
        w.write_record(&rec)?;
        flagged += 1;
    }
    w.flush()?;
    Ok(flagged)
}
