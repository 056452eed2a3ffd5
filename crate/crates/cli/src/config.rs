//! Experiment configuration: one JSON document, paths relative to its file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use cfml_core::baselevel::{BaselearnerConfig, Measure, Task};
use cfml_core::dataset::{Format, RatingDataset, Scale};
use cfml_core::metafeatures::{LandmarkerConfig, Provenance};
use cfml_core::metalearn::{default_grid, Hyperparams, LearnerKind};
use cfml_core::synth::synthetic_corpus;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    /// Dataset id used in every output; defaults to the file stem.
    #[serde(default)]
    pub id: Option<String>,
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub scale: Option<Scale>,
}

fn default_format() -> Format {
    Format::CsvTriples
}

/// Generated datasets named `synth-00`, `synth-01`, ...
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCorpus {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandmarkerSettings {
    pub rate: f64,
    pub holdout: f64,
}

impl Default for LandmarkerSettings {
    fn default() -> Self {
        let d = LandmarkerConfig::default();
        LandmarkerSettings {
            rate: d.rate,
            holdout: d.holdout,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetalearnerSpec {
    pub kind: LearnerKind,
    /// Hyperparameter grid searched by inner LOOCV; the built-in grid when absent.
    #[serde(default)]
    pub grid: Option<Vec<Hyperparams>>,
}

impl MetalearnerSpec {
    pub fn grid(&self) -> Vec<Hyperparams> {
        self.grid.clone().unwrap_or_else(|| default_grid(self.kind))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub corpus: Vec<CorpusEntry>,
    #[serde(default)]
    pub synthetic: Option<SyntheticCorpus>,
    pub task: Task,
    pub baselearners: Vec<BaselearnerConfig>,
    /// Defaults to the task's measures.
    #[serde(default)]
    pub measures: Vec<Measure>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_sets")]
    pub metafeatures: Vec<Provenance>,
    #[serde(default = "default_cfs")]
    pub cfs_threshold: f64,
    #[serde(default)]
    pub landmarkers: LandmarkerSettings,
    #[serde(default = "default_metalearners")]
    pub metalearners: Vec<MetalearnerSpec>,
    /// Metafeature sets fed to the metalearners.
    #[serde(default = "default_meta_sets")]
    pub meta_features: Vec<Provenance>,
    /// Measure whose individual ranking is the metatarget; multicriteria when absent.
    #[serde(default)]
    pub metatarget: Option<Measure>,
    /// Measure of the baselevel-impact curves; the first measure when absent.
    #[serde(default)]
    pub impact_measure: Option<Measure>,
    #[serde(default = "default_top")]
    pub importance_top: usize,
    #[serde(default = "default_alignment")]
    pub alignment_threshold: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub svg: bool,
}

fn default_folds() -> usize {
    5
}
fn default_sets() -> Vec<Provenance> {
    vec![
        Provenance::RM,
        Provenance::SL,
        Provenance::GR,
        Provenance::CM,
    ]
}
fn default_cfs() -> f64 {
    0.7
}
fn default_metalearners() -> Vec<MetalearnerSpec> {
    LearnerKind::ALL
        .iter()
        .map(|&kind| MetalearnerSpec { kind, grid: None })
        .collect()
}
fn default_meta_sets() -> Vec<Provenance> {
    vec![Provenance::CM]
}
fn default_top() -> usize {
    10
}
fn default_alignment() -> f64 {
    0.8
}
fn default_alpha() -> f64 {
    0.05
}
fn default_seed() -> u64 {
    1
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// File name of a metafeature set's table.
pub fn set_file(set: Provenance) -> String {
    format!("{}.csv", set.as_str().to_ascii_lowercase())
}

impl ExperimentConfig {
    /// Reads and validates `path`; relative paths inside are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for entry in &mut cfg.corpus {
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        cfg.normalise();
        Ok(cfg)
    }

    /// Fills defaults that depend on other fields.
    pub fn normalise(&mut self) {
        if self.measures.is_empty() {
            self.measures = self.task.default_measures();
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.corpus.is_empty() && self.synthetic.is_none_or(|s| s.count == 0) {
            return bad("corpus is empty".into());
        }
        let mut ids = HashSet::new();
        for (id, entry) in self.corpus_ids().iter().zip(self.corpus_entries()) {
            if let Some(e) = entry {
                if !e.path.is_file() {
                    return bad(format!("dataset file {} does not exist", e.path.display()));
                }
            }
            if !ids.insert(id.clone()) {
                return bad(format!("dataset id `{id}` appears twice"));
            }
        }
        if self.baselearners.is_empty() {
            return bad("no baselearners configured".into());
        }
        let mut algs = HashSet::new();
        for b in &self.baselearners {
            if b.task() != self.task {
                return bad(format!(
                    "baselearner {} does not solve {:?}",
                    b.algorithm, self.task
                ));
            }
            if !algs.insert(b.algorithm) {
                return bad(format!("baselearner {} configured twice", b.algorithm));
            }
            b.validate()?;
        }
        for m in self
            .measures
            .iter()
            .chain(&self.metatarget)
            .chain(&self.impact_measure)
        {
            if m.task() != self.task {
                return bad(format!(
                    "measure {} does not apply to {:?}",
                    m.as_str(),
                    self.task
                ));
            }
            if !self.measures.contains(m) {
                return bad(format!(
                    "measure {} is not among the configured measures",
                    m.as_str()
                ));
            }
        }
        if self.folds < 2 {
            return bad("folds must be at least 2".into());
        }
        if !(self.cfs_threshold > 0.0 && self.cfs_threshold <= 1.0) {
            return bad(format!(
                "cfs_threshold must lie in (0, 1], got {}",
                self.cfs_threshold
            ));
        }
        let l = &self.landmarkers;
        if !(l.rate > 0.0 && l.rate <= 1.0) || !(l.holdout > 0.0 && l.holdout < 1.0) {
            return bad("landmarker rate must lie in (0, 1] and holdout in (0, 1)".into());
        }
        if !(self.alpha == 0.05 || self.alpha == 0.10) {
            return bad(format!("alpha must be 0.05 or 0.10, got {}", self.alpha));
        }
        if self.metalearners.is_empty() {
            return bad("no metalearners configured".into());
        }
        for spec in &self.metalearners {
            let grid = spec.grid();
            if grid.is_empty() {
                return bad(format!("empty grid for {}", spec.kind));
            }
            for h in &grid {
                h.validate(spec.kind)?;
            }
        }
        if self.meta_features.is_empty() {
            return bad("meta_features is empty".into());
        }
        Ok(())
    }

    fn corpus_entries(&self) -> Vec<Option<&CorpusEntry>> {
        let synth = self.synthetic.map_or(0, |s| s.count);
        self.corpus
            .iter()
            .map(Some)
            .chain((0..synth).map(|_| None))
            .collect()
    }

    /// Dataset ids in corpus order: file entries first, then synthetic ones.
    pub fn corpus_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .corpus
            .iter()
            .map(|e| {
                e.id.clone().unwrap_or_else(|| {
                    e.path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default()
                })
            })
            .collect();
        if let Some(s) = self.synthetic {
            ids.extend((0..s.count).map(|d| format!("synth-{d:02}")));
        }
        ids
    }

    /// Input files, for manifests.
    pub fn corpus_files(&self) -> Vec<PathBuf> {
        self.corpus.iter().map(|e| e.path.clone()).collect()
    }

    /// Loads every dataset in corpus order.
    pub fn load_corpus(&self) -> CliResult<Vec<(String, RatingDataset)>> {
        let ids = self.corpus_ids();
        let mut out = Vec::with_capacity(ids.len());
        for (id, e) in ids.iter().zip(&self.corpus) {
            let ds = RatingDataset::load(&e.path, e.format, e.scale).map_err(|err| match err {
                cfml_core::Error::Io(io) => CliError::io(&e.path, io),
                other => CliError::Runtime(format!("{}: {other}", e.path.display())),
            })?;
            out.push((id.clone(), ds));
        }
        if let Some(s) = self.synthetic {
            out.extend(synthetic_corpus(s.count, s.seed));
        }
        Ok(out)
    }

    pub fn landmarker_config(&self, seed: u64) -> LandmarkerConfig {
        LandmarkerConfig {
            rate: self.landmarkers.rate,
            holdout: self.landmarkers.holdout,
            seed,
            ..LandmarkerConfig::default()
        }
    }

    /// Metalearner specs with AVG first, added when missing.
    pub fn metalearners_with_baseline(&self) -> Vec<MetalearnerSpec> {
        let mut specs = Vec::with_capacity(self.metalearners.len() + 1);
        match self
            .metalearners
            .iter()
            .find(|s| s.kind == LearnerKind::Avg)
        {
            Some(avg) => specs.push(avg.clone()),
            None => specs.push(MetalearnerSpec {
                kind: LearnerKind::Avg,
                grid: None,
            }),
        }
        specs.extend(
            self.metalearners
                .iter()
                .filter(|s| s.kind != LearnerKind::Avg)
                .cloned(),
        );
        specs
    }

    pub fn impact_measure(&self) -> Measure {
        self.impact_measure.unwrap_or(self.measures[0])
    }
}
