//! Collaborative-filtering baselearners, evaluation measures and the
//! cross-validation harness that fills [`PerformanceTable`]s.

mod eval;
mod experiment;
mod models;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use eval::{evaluate, evaluate_ranking, evaluate_rating, holdout_split};
pub use experiment::{run_cell, run_experiment};
pub use models::{
    bpr_loss, bpr_triples, train, train_itemrec_model, train_rating_model, ItemRecModel,
    ItemScorer, RatingModel, RatingPredictor, TrainedModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    ItemRecommendation,
    RatingPrediction,
}

impl Task {
    pub fn default_measures(&self) -> Vec<Measure> {
        match self {
            Task::ItemRecommendation => vec![Measure::Ndcg, Measure::Auc],
            Task::RatingPrediction => vec![Measure::Rmse, Measure::Nmae],
        }
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        match self {
            Task::ItemRecommendation => {
                vec![Algorithm::MostPopular, Algorithm::BprMf, Algorithm::WbprMf]
            }
            Task::RatingPrediction => vec![
                Algorithm::GlobalAverage,
                Algorithm::UserItemBaseline,
                Algorithm::Mf,
                Algorithm::BiasedMf,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    GlobalAverage,
    UserItemBaseline,
    #[serde(rename = "MF")]
    Mf,
    #[serde(rename = "BiasedMF")]
    BiasedMf,
    MostPopular,
    #[serde(rename = "BPRMF")]
    BprMf,
    #[serde(rename = "WBPRMF")]
    WbprMf,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::GlobalAverage,
        Algorithm::UserItemBaseline,
        Algorithm::Mf,
        Algorithm::BiasedMf,
        Algorithm::MostPopular,
        Algorithm::BprMf,
        Algorithm::WbprMf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::GlobalAverage => "GlobalAverage",
            Algorithm::UserItemBaseline => "UserItemBaseline",
            Algorithm::Mf => "MF",
            Algorithm::BiasedMf => "BiasedMF",
            Algorithm::MostPopular => "MostPopular",
            Algorithm::BprMf => "BPRMF",
            Algorithm::WbprMf => "WBPRMF",
        }
    }

    pub fn task(&self) -> Task {
        match self {
            Algorithm::MostPopular | Algorithm::BprMf | Algorithm::WbprMf => {
                Task::ItemRecommendation
            }
            _ => Task::RatingPrediction,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::HigherBetter => "higher-better",
            Orientation::LowerBetter => "lower-better",
        }
    }

    /// Maps a raw value so that larger is always better.
    pub fn orient(&self, v: f64) -> f64 {
        match self {
            Orientation::HigherBetter => v,
            Orientation::LowerBetter => -v,
        }
    }

    /// Whether `a` is strictly better than `b`.
    pub fn better(&self, a: f64, b: f64) -> bool {
        self.orient(a) > self.orient(b)
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "higher-better" => Ok(Orientation::HigherBetter),
            "lower-better" => Ok(Orientation::LowerBetter),
            _ => Err(Error::Usage(format!("unknown orientation `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "NDCG")]
    Ndcg,
    #[serde(rename = "AUC")]
    Auc,
    #[serde(rename = "RMSE")]
    Rmse,
    #[serde(rename = "NMAE")]
    Nmae,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Ndcg => "NDCG",
            Measure::Auc => "AUC",
            Measure::Rmse => "RMSE",
            Measure::Nmae => "NMAE",
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            Measure::Ndcg | Measure::Auc => Orientation::HigherBetter,
            Measure::Rmse | Measure::Nmae => Orientation::LowerBetter,
        }
    }

    pub fn task(&self) -> Task {
        match self {
            Measure::Ndcg | Measure::Auc => Task::ItemRecommendation,
            Measure::Rmse | Measure::Nmae => Task::RatingPrediction,
        }
    }

    pub fn spec(&self) -> MeasureSpec {
        MeasureSpec {
            name: self.as_str().to_string(),
            orientation: self.orientation(),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NDCG" => Ok(Measure::Ndcg),
            "AUC" => Ok(Measure::Auc),
            "RMSE" => Ok(Measure::Rmse),
            "NMAE" => Ok(Measure::Nmae),
            _ => Err(Error::Usage(format!("unknown measure `{s}`"))),
        }
    }
}

/// A named measure with its orientation, as stored in performance tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasureSpec {
    pub name: String,
    pub orientation: Orientation,
}

/// Hyperparameters of one baselearner run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawBaselearnerConfig")]
pub struct BaselearnerConfig {
    pub algorithm: Algorithm,
    pub factors: usize,
    pub learning_rate: f64,
    /// Ridge damping λ for `UserItemBaseline`, L2 weight for factor models.
    pub regularization: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl BaselearnerConfig {
    /// Default hyperparameters for `algorithm`.
    pub fn new(algorithm: Algorithm) -> Self {
        let (factors, learning_rate, regularization, epochs) = match algorithm {
            Algorithm::GlobalAverage | Algorithm::MostPopular => (0, 0.0, 0.0, 0),
            Algorithm::UserItemBaseline => (0, 0.0, 10.0, 0),
            Algorithm::Mf | Algorithm::BiasedMf => (10, 0.01, 0.05, 30),
            Algorithm::BprMf | Algorithm::WbprMf => (10, 0.05, 0.0025, 30),
        };
        BaselearnerConfig {
            algorithm,
            factors,
            learning_rate,
            regularization,
            epochs,
            seed: 1,
        }
    }

    pub fn task(&self) -> Task {
        self.algorithm.task()
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let factor_model = matches!(
            self.algorithm,
            Algorithm::Mf | Algorithm::BiasedMf | Algorithm::BprMf | Algorithm::WbprMf
        );
        if factor_model && (self.factors == 0 || !(self.learning_rate > 0.0)) {
            return Err(Error::Usage(format!(
                "{} needs positive factors and learning rate",
                self.algorithm
            )));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::Usage(format!(
                "{} regularization must be a nonnegative number",
                self.algorithm
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaselearnerConfig {
    algorithm: Algorithm,
    factors: Option<usize>,
    learning_rate: Option<f64>,
    regularization: Option<f64>,
    epochs: Option<usize>,
    seed: Option<u64>,
}

impl From<RawBaselearnerConfig> for BaselearnerConfig {
    fn from(raw: RawBaselearnerConfig) -> Self {
        let d = BaselearnerConfig::new(raw.algorithm);
        BaselearnerConfig {
            algorithm: raw.algorithm,
            factors: raw.factors.unwrap_or(d.factors),
            learning_rate: raw.learning_rate.unwrap_or(d.learning_rate),
            regularization: raw.regularization.unwrap_or(d.regularization),
            epochs: raw.epochs.unwrap_or(d.epochs),
            seed: raw.seed.unwrap_or(d.seed),
        }
    }
}

/// Performance `p[dataset][algorithm][measure]` over a complete grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceTable {
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    pub measures: Vec<MeasureSpec>,
    values: Vec<f64>,
}

impl PerformanceTable {
    /// Builds a table from a dense `[dataset][algorithm][measure]` array.
    pub fn new(
        datasets: Vec<String>,
        algorithms: Vec<String>,
        measures: Vec<MeasureSpec>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let expected = datasets.len() * algorithms.len() * measures.len();
        if values.len() != expected {
            return Err(Error::Alignment(format!(
                "performance table expects {expected} values, got {}",
                values.len()
            )));
        }
        Ok(PerformanceTable {
            datasets,
            algorithms,
            measures,
            values,
        })
    }

    /// Builds a table from long-form cells; every grid cell must be present
    /// exactly once.
    pub fn from_cells(cells: &[(String, String, MeasureSpec, f64)]) -> Result<Self> {
        let mut datasets: Vec<String> = Vec::new();
        let mut algorithms: Vec<String> = Vec::new();
        let mut measures: Vec<MeasureSpec> = Vec::new();
        let mut map: HashMap<(usize, usize, usize), f64> = HashMap::new();
        for (d, a, m, v) in cells {
            let di = index_of(&mut datasets, d);
            let ai = index_of(&mut algorithms, a);
            let mi = match measures.iter().position(|x| x.name == m.name) {
                Some(i) if measures[i].orientation != m.orientation => {
                    return Err(Error::Validation(format!(
                        "measure `{}` declared with conflicting orientations",
                        m.name
                    )))
                }
                Some(i) => i,
                None => {
                    measures.push(m.clone());
                    measures.len() - 1
                }
            };
            if map.insert((di, ai, mi), *v).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate performance cell ({d}, {a}, {})",
                    m.name
                )));
            }
        }
        let mut missing = Vec::new();
        let mut values = Vec::with_capacity(datasets.len() * algorithms.len() * measures.len());
        for (di, d) in datasets.iter().enumerate() {
            for (ai, a) in algorithms.iter().enumerate() {
                for (mi, m) in measures.iter().enumerate() {
                    match map.get(&(di, ai, mi)) {
                        Some(&v) => values.push(v),
                        None => {
                            missing.push(format!("({d}, {a}, {})", m.name));
                            values.push(f64::NAN);
                        }
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Alignment(format!(
                "incomplete performance table, missing cells: {}",
                missing.join(", ")
            )));
        }
        PerformanceTable::new(datasets, algorithms, measures, values)
    }

    fn offset(&self, d: usize, a: usize, m: usize) -> usize {
        (d * self.algorithms.len() + a) * self.measures.len() + m
    }

    pub fn value(&self, d: usize, a: usize, m: usize) -> f64 {
        self.values[self.offset(d, a, m)]
    }

    pub fn dataset_index(&self, id: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d == id)
    }

    pub fn measure_index(&self, name: &str) -> Option<usize> {
        self.measures.iter().position(|m| m.name == name)
    }

    /// Performance of every algorithm on dataset `d` for measure `m`.
    pub fn column(&self, d: usize, m: usize) -> Vec<f64> {
        (0..self.algorithms.len())
            .map(|a| self.value(d, a, m))
            .collect()
    }

    /// Long-form cells in dataset, algorithm, measure order.
    pub fn cells(&self) -> Vec<(String, String, MeasureSpec, f64)> {
        let mut out = Vec::with_capacity(self.values.len());
        for (di, d) in self.datasets.iter().enumerate() {
            for (ai, a) in self.algorithms.iter().enumerate() {
                for (mi, m) in self.measures.iter().enumerate() {
                    out.push((d.clone(), a.clone(), m.clone(), self.value(di, ai, mi)));
                }
            }
        }
        out
    }

    /// Writes `dataset,algorithm,measure,value,orientation`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_cells_csv(writer, &self.cells())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        PerformanceTable::from_cells(&read_cells_csv(reader)?)
    }
}

fn index_of(list: &mut Vec<String>, key: &str) -> usize {
    match list.iter().position(|x| x == key) {
        Some(i) => i,
        None => {
            list.push(key.to_string());
            list.len() - 1
        }
    }
}

pub const PERFORMANCE_HEADER: [&str; 5] =
    ["dataset", "algorithm", "measure", "value", "orientation"];

/// Writes long-form performance cells with a header.
pub fn write_cells_csv<W: Write>(
    writer: W,
    cells: &[(String, String, MeasureSpec, f64)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PERFORMANCE_HEADER)?;
    for (d, a, m, v) in cells {
        w.write_record([
            d.as_str(),
            a.as_str(),
            m.name.as_str(),
            &format!("{v}"),
            m.orientation.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads long-form performance cells; does not require a complete grid.
pub fn read_cells_csv<R: Read>(reader: R) -> Result<Vec<(String, String, MeasureSpec, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != PERFORMANCE_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header `{}`", PERFORMANCE_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 5 {
            return Err(Error::parse(line, "expected 5 fields"));
        }
        let value: f64 = rec[3]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(line, format!("invalid value `{}`", &rec[3])))?;
        let orientation: Orientation = rec[4]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid orientation `{}`", &rec[4])))?;
        if rec[0].is_empty() || rec[1].is_empty() || rec[2].is_empty() {
            return Err(Error::parse(line, "empty identifier"));
        }
        if !seen.insert((rec[0].to_string(), rec[1].to_string(), rec[2].to_string())) {
            return Err(Error::parse(line, "duplicate performance cell"));
        }
        out.push((
            rec[0].to_string(),
            rec[1].to_string(),
            MeasureSpec {
                name: rec[2].to_string(),
                orientation,
            },
            value,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_flags() {
        assert_eq!(Measure::Ndcg.orientation(), Orientation::HigherBetter);
        assert_eq!(Measure::Auc.orientation(), Orientation::HigherBetter);
        assert_eq!(Measure::Rmse.orientation(), Orientation::LowerBetter);
        assert_eq!(Measure::Nmae.orientation(), Orientation::LowerBetter);
    }

    #[test]
    fn config_defaults_from_json() {
        let c: BaselearnerConfig =
            serde_json::from_str(r#"{"algorithm":"BiasedMF","epochs":5}"#).unwrap();
        assert_eq!(c.factors, 10);
        assert_eq!(c.learning_rate, 0.01);
        assert_eq!(c.epochs, 5);
        let u: BaselearnerConfig =
            serde_json::from_str(r#"{"algorithm":"UserItemBaseline"}"#).unwrap();
        assert_eq!(u.regularization, 10.0);
        assert!(serde_json::from_str::<BaselearnerConfig>(r#"{"algorithm":"SVD"}"#).is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = BaselearnerConfig::new(Algorithm::Mf);
        c.factors = 0;
        assert!(c.validate().is_err());
        let mut c = BaselearnerConfig::new(Algorithm::UserItemBaseline);
        c.regularization = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_round_trip_and_completeness() {
        let text = "dataset,algorithm,measure,value,orientation\n\
                    d1,A,RMSE,0.9,lower-better\nd1,B,RMSE,1.1,lower-better\n";
        let t = PerformanceTable::read_csv(text.as_bytes()).unwrap();
        assert_eq!(t.value(0, 1, 0), 1.1);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            text.replace("                    ", "")
        );

        let incomplete = "dataset,algorithm,measure,value,orientation\n\
                          d1,A,RMSE,0.9,lower-better\nd2,B,RMSE,1.1,lower-better\n";
        let err = PerformanceTable::read_csv(incomplete.as_bytes()).unwrap_err();
        assert!(
            matches!(&err, Error::Alignment(m) if m.contains("(d1, B, RMSE)")),
            "{err}"
        );
    }

    #[test]
    fn csv_rejects_malformed() {
        for bad in [
            "dataset,algorithm,measure,value\nd,A,M,1\n",
            "dataset,algorithm,measure,value,orientation\nd,A,M,x,lower-better\n",
            "dataset,algorithm,measure,value,orientation\nd,A,M,1,sideways\n",
            "dataset,algorithm,measure,value,orientation\nd,A,M,1,lower-better\nd,A,M,2,lower-better\n",
            "dataset,algorithm,measure,value,orientation\nd,A,M,1,lower-better\nd,B,M,2,higher-better\n",
        ] {
            assert!(PerformanceTable::read_csv(bad.as_bytes()).is_err(), "{bad}");
        }
    }
}
