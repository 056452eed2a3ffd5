//! `baselevel`: k-fold performance of every baselearner on every dataset.
//!
//! Finished cells are checkpointed to `performance.csv.partial`; `--resume`
//! reloads that file and only runs the missing cells.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use cfml_core::baselevel::{read_cells_csv, run_cell, write_cells_csv, MeasureSpec};
use log::{info, warn};
use rayon::prelude::*;

use super::{elapsed_ms, Context, Stream};
use crate::error::{CliError, CliResult};
use crate::output::{partial_path, write_atomic, write_with, Manifest};

pub const PERFORMANCE_FILE: &str = "performance.csv";

type Cell = (String, String, MeasureSpec, f64);

/// Completed `(dataset, algorithm)` pairs in `cells` that cover every measure.
fn finished_pairs(cells: &[Cell], measures: &[MeasureSpec]) -> HashSet<(String, String)> {
    let mut seen: HashSet<(String, String, String)> = HashSet::new();
    for (d, a, m, _) in cells {
        if measures.contains(m) {
            seen.insert((d.clone(), a.clone(), m.name.clone()));
        }
    }
    let pairs: HashSet<(String, String)> = cells
        .iter()
        .map(|(d, a, _, _)| (d.clone(), a.clone()))
        .collect();
    pairs
        .into_iter()
        .filter(|(d, a)| {
            measures
                .iter()
                .all(|m| seen.contains(&(d.clone(), a.clone(), m.name.clone())))
        })
        .collect()
}

fn load_checkpoint(path: &Path) -> CliResult<Vec<Cell>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(read_cells_csv(f)?)
}

pub fn baselevel(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let ids = cfg.corpus_ids();
    let specs: Vec<MeasureSpec> = cfg.measures.iter().map(|m| m.spec()).collect();
    let final_path = ctx.out().join(PERFORMANCE_FILE);
    let checkpoint = partial_path(&final_path);

    let mut done_cells: Vec<Cell> = Vec::new();
    if ctx.resume {
        let wanted: HashSet<(String, String)> = ids
            .iter()
            .flat_map(|d| {
                cfg.baselearners
                    .iter()
                    .map(move |b| (d.clone(), b.algorithm.to_string()))
            })
            .collect();
        let previous = load_checkpoint(&checkpoint)?;
        let finished = finished_pairs(&previous, &specs);
        done_cells = previous
            .into_iter()
            .filter(|(d, a, m, _)| {
                let key = (d.clone(), a.clone());
                finished.contains(&key) && wanted.contains(&key) && specs.contains(m)
            })
            .collect();
    }
    let finished = finished_pairs(&done_cells, &specs);
    let todo: Vec<(usize, usize)> = (0..ids.len())
        .flat_map(|d| (0..cfg.baselearners.len()).map(move |a| (d, a)))
        .filter(|&(d, a)| {
            !finished.contains(&(ids[d].clone(), cfg.baselearners[a].algorithm.to_string()))
        })
        .collect();

    if ctx.dry_run {
        let names: Vec<&str> = cfg.measures.iter().map(|m| m.as_str()).collect();
        println!(
            "baselevel grid: {} datasets x {} baselearners x {} measures, {}-fold, {} cells to run",
            ids.len(),
            cfg.baselearners.len(),
            cfg.measures.len(),
            cfg.folds,
            todo.len()
        );
        for &(d, a) in &todo {
            println!(
                "  {} {} [{}]",
                ids[d],
                cfg.baselearners[a].algorithm,
                names.join(",")
            );
        }
        return Ok(());
    }
    if !finished.is_empty() {
        info!(
            "resuming: {} of {} cells already finished",
            finished.len(),
            ids.len() * cfg.baselearners.len()
        );
    }

    let corpus = cfg.load_corpus()?;
    let seed = ctx.seed(Stream::Baselevel);
    let progress = Mutex::new(done_cells);
    write_with(&checkpoint, |buf| {
        write_cells_csv(buf, &progress.lock().expect("lock"))
    })?;

    let results: Vec<(String, String, CliResult<u64>)> = ctx.install(|| {
        todo.par_iter()
            .map(|&(d, a)| {
                let (id, ds) = &corpus[d];
                let learner = &cfg.baselearners[a];
                let start = Instant::now();
                let res = run_cell(id, ds, learner, &cfg.measures, cfg.folds, seed)
                    .map_err(CliError::from)
                    .and_then(|values| {
                        let mut cells = progress.lock().expect("lock");
                        for (spec, v) in specs.iter().zip(values) {
                            cells.push((
                                id.clone(),
                                learner.algorithm.to_string(),
                                spec.clone(),
                                v,
                            ));
                        }
                        let mut buf = Vec::new();
                        write_cells_csv(&mut buf, &cells)?;
                        write_atomic(&checkpoint, &buf)
                    })
                    .map(|_| elapsed_ms(start));
                info!(
                    "{id} {}: {}",
                    learner.algorithm,
                    if res.is_ok() { "done" } else { "failed" }
                );
                (id.clone(), learner.algorithm.to_string(), res)
            })
            .collect()
    })?;

    let mut manifest = Manifest::new("baselevel", cfg.seed, ctx.config_path.as_deref())?;
    for p in cfg.corpus_files() {
        manifest.input(&p)?;
    }
    manifest.seeds.insert("baselevel".into(), seed);
    let mut failures = Vec::new();
    for (d, a, res) in results {
        match res {
            Ok(ms) => {
                manifest.timings_ms.insert(format!("{d}/{a}"), ms);
            }
            Err(e) => {
                warn!("{d} {a}: {e}");
                failures.push(e.to_string());
            }
        }
    }
    if !failures.is_empty() {
        manifest.complete = false;
        manifest.output(&checkpoint)?;
        manifest.write(ctx.out())?;
        return Err(CliError::Runtime(format!(
            "{} baselevel cells failed; finished cells kept in {} (rerun with --resume):\n  {}",
            failures.len(),
            checkpoint.display(),
            failures.join("\n  ")
        )));
    }

    // Grid order, independent of completion order.
    let cells = progress.into_inner().expect("lock");
    let mut ordered = Vec::with_capacity(cells.len());
    for id in &ids {
        for b in &cfg.baselearners {
            let alg = b.algorithm.to_string();
            for spec in &specs {
                let cell = cells
                    .iter()
                    .find(|(d, a, m, _)| d == id && *a == alg && m == spec)
                    .ok_or_else(|| {
                        CliError::Runtime(format!("missing cell ({id}, {alg}, {})", spec.name))
                    })?;
                ordered.push(cell.clone());
            }
        }
    }
    write_with(&final_path, |buf| write_cells_csv(buf, &ordered))?;
    fs::remove_file(&checkpoint).map_err(|e| CliError::io(&checkpoint, e))?;
    manifest.output(&final_path)?;
    manifest.write(ctx.out())?;
    Ok(())
}
