//! `metatarget`: multicriteria and per-measure metatargets plus alignment.

use std::fs;
use std::path::{Path, PathBuf};

use cfml_core::baselevel::{read_cells_csv, PerformanceTable};
use cfml_core::metatarget::{
    alignment_report, individual_metatargets, multicriteria_metatargets, write_alignment_csv,
    write_flagged_csv,
};
use cfml_core::Error;
use log::info;

use super::baselevel::PERFORMANCE_FILE;
use super::Context;
use crate::error::{CliError, CliResult};
use crate::output::{write_with, Manifest};

pub const METATARGET_FILE: &str = "metatargets.csv";
pub const ALIGNMENT_FILE: &str = "alignment.csv";
pub const FLAGGED_FILE: &str = "alignment_flagged.csv";

/// File of the individual metatarget of `measure`.
pub fn individual_file(measure: &str) -> String {
    format!("metatargets_{measure}.csv")
}

/// Reads a long-form performance CSV into a complete table.
pub fn load_performance(path: &Path) -> CliResult<PerformanceTable> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(PerformanceTable::from_cells(&read_cells_csv(f)?)?)
}

/// Every configured `(dataset, algorithm, measure)` must be in `table`.
fn check_grid(ctx: &Context, table: &PerformanceTable) -> CliResult<()> {
    let mut missing = Vec::new();
    for d in ctx.cfg.corpus_ids() {
        for b in &ctx.cfg.baselearners {
            for m in &ctx.cfg.measures {
                let alg = b.algorithm.to_string();
                if table.dataset_index(&d).is_none()
                    || !table.algorithms.contains(&alg)
                    || table.measure_index(m.as_str()).is_none()
                {
                    missing.push(format!("({d}, {alg}, {})", m.as_str()));
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Alignment(format!(
            "performance table lacks {} configured cells: {}",
            missing.len(),
            missing.join(", ")
        ))
        .into())
    }
}

pub fn metatarget(ctx: &Context, performance: Option<PathBuf>) -> CliResult<()> {
    let input = performance.unwrap_or_else(|| ctx.out().join(PERFORMANCE_FILE));
    let measures: Vec<String> = ctx
        .cfg
        .measures
        .iter()
        .map(|m| m.as_str().to_string())
        .collect();
    if ctx.dry_run {
        println!(
            "metatarget from {} over [{}]",
            input.display(),
            measures.join(",")
        );
        return Ok(());
    }
    let table = load_performance(&input)?;
    check_grid(ctx, &table)?;
    let mut manifest = Manifest::new("metatarget", ctx.cfg.seed, ctx.config_path.as_deref())?;
    manifest.input(&input)?;

    let out = ctx.out();
    let multi = multicriteria_metatargets(&table, &measures)?;
    let path = out.join(METATARGET_FILE);
    write_with(&path, |buf| multi.write_csv(buf))?;
    manifest.output(&path)?;
    for m in &measures {
        let t = individual_metatargets(&table, m)?;
        let path = out.join(individual_file(m));
        write_with(&path, |buf| t.write_csv(buf))?;
        manifest.output(&path)?;
    }

    let rows = alignment_report(&table, &measures)?;
    let path = out.join(ALIGNMENT_FILE);
    write_with(&path, |buf| write_alignment_csv(buf, &rows))?;
    manifest.output(&path)?;
    let path = out.join(FLAGGED_FILE);
    let mut flagged = 0;
    write_with(&path, |buf| {
        flagged = write_flagged_csv(buf, &rows, ctx.cfg.alignment_threshold)?;
        Ok(())
    })?;
    manifest.output(&path)?;
    info!(
        "{flagged} of {} datasets have a measure aligned below {}",
        table.datasets.len(),
        ctx.cfg.alignment_threshold
    );
    manifest.write(out)?;
    Ok(())
}
