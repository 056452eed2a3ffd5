//! `meta`: LOOCV of every metalearner on every selected metafeature set, with
//! feature importance, baselevel impact and critical-difference reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cfml_core::metafeatures::{MetafeatureTable, Provenance};
use cfml_core::metalearn::{
    baselevel_impact, feature_importance, fit, friedman_nemenyi, loocv, oracle_impact,
    write_cd_csv, write_importance_csv, Hyperparams, LearnerKind, LoocvResult, MetaDataset,
};
use cfml_core::metatarget::{MetatargetTable, Ranking, MULTICRITERIA};
use cfml_core::{format_sig, Error};
use log::{info, warn};

use super::baselevel::PERFORMANCE_FILE;
use super::metatarget::{individual_file, load_performance, METATARGET_FILE};
use super::{elapsed_ms, report, Context, Stream};
use crate::config::{set_file, MetalearnerSpec};
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, write_with, Manifest};

pub const SCORES_FILE: &str = "scores.csv";
pub const SUMMARY_FILE: &str = "scores_summary.csv";
pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const IMPACT_FILE: &str = "impact.csv";
pub const CD_FILE: &str = "cd.csv";
pub const CD_SIDECAR: &str = "cd.txt";

/// Explicit input paths overriding the defaults under the output directory.
#[derive(Debug, Clone, Default)]
pub struct MetaInputs {
    pub features: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub performance: Option<PathBuf>,
}

/// One LOOCV run of one metalearner on one metafeature set.
struct Run {
    set: Provenance,
    spec: MetalearnerSpec,
    result: LoocvResult,
}

impl Run {
    fn label(&self, many_sets: bool) -> String {
        if many_sets {
            format!("{}.{}", self.set.as_str(), self.result.kind)
        } else {
            self.result.kind.to_string()
        }
    }

    /// Most frequently chosen grid point; ties keep grid order.
    fn typical_hyper(&self) -> Hyperparams {
        let grid = self.spec.grid();
        let count = |h: &Hyperparams| self.result.chosen.iter().filter(|c| *c == h).count();
        let mut best = &grid[0];
        for h in &grid {
            if count(h) > count(best) {
                best = h;
            }
        }
        best.clone()
    }
}

fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::io(path, e))
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(cfml_core::Error::from)?;
    for r in rows {
        w.write_record(r).map_err(cfml_core::Error::from)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn meta(ctx: &Context, inputs: MetaInputs) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let out = ctx.out().to_path_buf();
    let sets = &cfg.meta_features;
    if inputs.features.is_some() && sets.len() != 1 {
        return Err(CliError::Config(
            "--features needs exactly one entry in meta_features".into(),
        ));
    }
    let feature_paths: Vec<PathBuf> = sets
        .iter()
        .map(|s| {
            inputs
                .features
                .clone()
                .unwrap_or_else(|| out.join(set_file(*s)))
        })
        .collect();
    let (target_name, target_file) = match cfg.metatarget {
        Some(m) => (m.as_str().to_string(), individual_file(m.as_str())),
        None => (MULTICRITERIA.to_string(), METATARGET_FILE.to_string()),
    };
    let targets_path = inputs
        .targets
        .clone()
        .unwrap_or_else(|| out.join(target_file));
    let perf_path = inputs
        .performance
        .clone()
        .unwrap_or_else(|| out.join(PERFORMANCE_FILE));
    let specs = cfg.metalearners_with_baseline();

    if ctx.dry_run {
        println!("meta on targets {} ({target_name})", targets_path.display());
        for (s, p) in sets.iter().zip(&feature_paths) {
            for spec in &specs {
                println!(
                    "  {} {} grid of {} from {}",
                    s.as_str(),
                    spec.kind,
                    spec.grid().len(),
                    p.display()
                );
            }
        }
        return Ok(());
    }

    let seed = ctx.seed(Stream::Meta);
    let mut manifest = Manifest::new("meta", cfg.seed, ctx.config_path.as_deref())?;
    manifest.seeds.insert("meta".into(), seed);
    let targets = MetatargetTable::read_csv(open(&targets_path)?, &target_name)?;
    manifest.input(&targets_path)?;

    let mut runs: Vec<Run> = Vec::new();
    let mut metas: Vec<(Provenance, MetaDataset)> = Vec::new();
    for (&set, path) in sets.iter().zip(&feature_paths) {
        let features = MetafeatureTable::read_csv(open(path)?, set)?;
        manifest.input(path)?;
        let meta = MetaDataset::new(features, targets.clone())?;
        for spec in &specs {
            let start = Instant::now();
            let grid = spec.grid();
            let result = ctx.install(|| loocv(&meta, spec.kind, &grid, seed))??;
            manifest
                .timings_ms
                .insert(format!("{}/{}", set.as_str(), spec.kind), elapsed_ms(start));
            info!(
                "{} {}: mean tau {:.3} (sd {:.3})",
                set.as_str(),
                spec.kind,
                result.mean,
                result.sd
            );
            runs.push(Run {
                set,
                spec: spec.clone(),
                result,
            });
        }
        metas.push((set, meta));
    }
    let many = sets.len() > 1;

    // Scores on one dataset order shared by every run.
    let order = runs[0].result.datasets.clone();
    let mut aligned_scores: Vec<Vec<f64>> = Vec::with_capacity(runs.len());
    for run in &runs {
        let scores = order
            .iter()
            .map(|d| {
                run.result
                    .datasets
                    .iter()
                    .position(|x| x == d)
                    .map(|i| run.result.scores[i])
                    .ok_or_else(|| {
                        Error::Alignment(format!("dataset `{d}` missing from {}", run.label(many)))
                    })
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        aligned_scores.push(scores);
    }

    let mut score_rows = Vec::new();
    let mut summary_rows = Vec::new();
    let mut prediction_rows = Vec::new();
    for (run, scores) in runs.iter().zip(&aligned_scores) {
        let (set, learner) = (run.set.as_str().to_string(), run.result.kind.to_string());
        for (d, s) in order.iter().zip(scores) {
            score_rows.push(vec![
                set.clone(),
                learner.clone(),
                d.clone(),
                format!("{s}"),
            ]);
        }
        summary_rows.push(vec![
            set.clone(),
            learner.clone(),
            format!("{}", run.result.mean),
            format!("{}", run.result.sd),
            run.typical_hyper().describe(run.result.kind),
        ]);
        for (d, p) in run.result.datasets.iter().zip(&run.result.predictions) {
            for (a, r) in p.algorithms.iter().zip(&p.ranks) {
                prediction_rows.push(vec![
                    set.clone(),
                    learner.clone(),
                    d.clone(),
                    a.clone(),
                    format!("{r}"),
                ]);
            }
        }
    }
    let mut written: Vec<PathBuf> = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> CliResult<()> {
        let p = out.join(name);
        write_atomic(&p, &bytes)?;
        written.push(p);
        Ok(())
    };
    emit(
        SCORES_FILE,
        csv_bytes(&["approach", "learner", "dataset", "tau"], &score_rows)?,
    )?;
    emit(
        SUMMARY_FILE,
        csv_bytes(
            &["approach", "learner", "mean", "sd", "hyperparameters"],
            &summary_rows,
        )?,
    )?;
    emit(
        PREDICTIONS_FILE,
        csv_bytes(
            &["approach", "learner", "dataset", "algorithm", "rank"],
            &prediction_rows,
        )?,
    )?;

    // Baselevel impact against the true performance.
    if perf_path.exists() {
        let perf = load_performance(&perf_path)?;
        manifest.input(&perf_path)?;
        let measure = cfg.impact_measure().as_str();
        let mut rows = Vec::new();
        let mut push_curve = |approach: &str, learner: &str, curve: Vec<f64>| {
            for (t, v) in curve.into_iter().enumerate() {
                rows.push(vec![
                    approach.to_string(),
                    learner.to_string(),
                    (t + 1).to_string(),
                    format!("{v}"),
                ]);
            }
        };
        for run in &runs {
            let predicted: Vec<(String, Ranking)> = run
                .result
                .datasets
                .iter()
                .cloned()
                .zip(run.result.predictions.iter().cloned())
                .collect();
            let curve = baselevel_impact(&predicted, &perf, measure)?;
            push_curve(run.set.as_str(), &run.result.kind.to_string(), curve);
        }
        push_curve("oracle", "oracle", oracle_impact(&perf, measure)?);
        emit(
            IMPACT_FILE,
            csv_bytes(&["approach", "learner", "threshold", "value"], &rows)?,
        )?;
    } else if inputs.performance.is_some() {
        return Err(CliError::io(
            &perf_path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "performance table not found"),
        ));
    } else {
        warn!(
            "{} not found; skipping baselevel impact",
            perf_path.display()
        );
    }

    // Forest feature importance per metafeature set.
    for (set, meta) in &metas {
        let Some(run) = runs
            .iter()
            .find(|r| r.set == *set && r.result.kind == LearnerKind::Rf)
        else {
            continue;
        };
        let model = ctx.install(|| fit(LearnerKind::Rf, meta, &run.typical_hyper(), seed))??;
        let importance = feature_importance(&model)?;
        let p = out.join(format!(
            "importance_{}.csv",
            set.as_str().to_ascii_lowercase()
        ));
        write_with(&p, |buf| {
            write_importance_csv(buf, &importance, Some(cfg.importance_top))
        })?;
        written.push(p);
    }

    // Friedman test and Nemenyi critical difference over all approaches.
    if runs.len() >= 2 && order.len() >= 2 {
        let labels: Vec<String> = runs.iter().map(|r| r.label(many)).collect();
        let cd = friedman_nemenyi(&labels, &aligned_scores, cfg.alpha)?;
        let p = out.join(CD_FILE);
        write_with(&p, |buf| write_cd_csv(buf, &cd))?;
        written.push(p);
        let sidecar = format!(
            "cd={}\nalpha={}\nk={}\nn={}\nchi2={}\np_value={}\nsignificant={}\n",
            format_sig(cd.cd, 10),
            cd.alpha,
            labels.len(),
            cd.n_datasets,
            format_sig(cd.chi2, 10),
            format_sig(cd.p_value, 10),
            cd.significant
        );
        let p = out.join(CD_SIDECAR);
        write_atomic(&p, sidecar.as_bytes())?;
        written.push(p);
    }

    for p in &written {
        manifest.output(p)?;
    }
    if cfg.svg {
        for p in report::render(&out)? {
            manifest.output(&p)?;
        }
    }
    manifest.write(&out)?;
    Ok(())
}
