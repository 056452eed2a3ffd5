//! `extract`: one metafeature table per selected set.

use std::fs;
use std::time::Instant;

use cfml_core::dataset::RatingDataset;
use cfml_core::graph::{build_bipartite, PairwiseConfig};
use cfml_core::metafeatures::{
    comprehensive, extract_graph, extract_landmarkers, extract_rm, GraphExtractionConfig,
    MetafeatureTable, MetafeatureVector, Provenance,
};
use log::{info, warn};
use rayon::prelude::*;

use super::{elapsed_ms, Context, Stream};
use crate::config::set_file;
use crate::error::{CliError, CliResult};
use crate::output::{partial_path, write_with, Manifest};

const BASE_SETS: [Provenance; 3] = [Provenance::RM, Provenance::SL, Provenance::GR];

struct Extracted {
    vectors: Vec<(Provenance, MetafeatureVector)>,
    timings: Vec<(Provenance, u64)>,
}

pub fn extract(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let selected = &cfg.metafeatures;
    let needed: Vec<Provenance> = BASE_SETS
        .into_iter()
        .filter(|s| selected.contains(s) || selected.contains(&Provenance::CM))
        .collect();
    let ids = cfg.corpus_ids();
    if ctx.dry_run {
        let sets: Vec<&str> = selected.iter().map(|s| s.as_str()).collect();
        println!("extract {} from {} datasets:", sets.join(","), ids.len());
        for id in &ids {
            println!("  {id}");
        }
        for s in selected {
            println!("  -> {}", ctx.out().join(set_file(*s)).display());
        }
        return Ok(());
    }

    let corpus = cfg.load_corpus()?;
    let landmarkers = cfg.landmarker_config(ctx.seed(Stream::Landmarkers));
    let graph_cfg = GraphExtractionConfig {
        pairwise: PairwiseConfig {
            seed: ctx.seed(Stream::PairSampling),
            ..PairwiseConfig::default()
        },
        community_seed: ctx.seed(Stream::Communities),
    };
    let extract_one = |id: &str, ds: &RatingDataset| -> cfml_core::Result<Extracted> {
        let mut out = Extracted {
            vectors: Vec::new(),
            timings: Vec::new(),
        };
        for &set in &needed {
            let start = Instant::now();
            let v = match set {
                Provenance::RM => extract_rm(ds)?,
                Provenance::SL => extract_landmarkers(id, ds, &landmarkers)?,
                _ => extract_graph(&build_bipartite(ds), &graph_cfg)?,
            };
            out.timings.push((set, elapsed_ms(start)));
            out.vectors.push((set, v));
        }
        info!("extracted {id}");
        Ok(out)
    };
    let results: Vec<(String, cfml_core::Result<Extracted>)> = ctx.install(|| {
        corpus
            .par_iter()
            .map(|(id, ds)| (id.clone(), extract_one(id, ds)))
            .collect()
    })?;

    let mut manifest = Manifest::new("extract", cfg.seed, ctx.config_path.as_deref())?;
    for p in cfg.corpus_files() {
        manifest.input(&p)?;
    }
    manifest
        .seeds
        .insert("landmarkers".into(), landmarkers.seed);
    manifest
        .seeds
        .insert("communities".into(), graph_cfg.community_seed);
    manifest
        .seeds
        .insert("pair_sampling".into(), graph_cfg.pairwise.seed);

    let mut failures = Vec::new();
    let mut rows: Vec<Vec<(String, MetafeatureVector)>> = vec![Vec::new(); needed.len()];
    for (id, res) in results {
        match res {
            Ok(ex) => {
                for (set, ms) in ex.timings {
                    manifest
                        .timings_ms
                        .insert(format!("{id}/{}", set.as_str()), ms);
                }
                for (k, (_, v)) in ex.vectors.into_iter().enumerate() {
                    rows[k].push((id.clone(), v));
                }
            }
            Err(e) => {
                warn!("{id}: {e}");
                failures.push(format!("{id}: {e}"));
            }
        }
    }
    let complete = failures.is_empty();
    manifest.complete = complete;

    let mut tables: Vec<MetafeatureTable> = Vec::new();
    if rows.first().is_some_and(|r| !r.is_empty()) {
        for r in rows {
            tables.push(MetafeatureTable::from_vectors(r)?);
        }
    }
    let mut outputs: Vec<(Provenance, MetafeatureTable)> = Vec::new();
    for (set, table) in needed.iter().zip(&tables) {
        if selected.contains(set) {
            outputs.push((*set, table.clone()));
        }
    }
    if selected.contains(&Provenance::CM) && tables.first().is_some_and(|t| t.n_rows() >= 2) {
        let start = Instant::now();
        outputs.push((Provenance::CM, comprehensive(&tables, cfg.cfs_threshold)?));
        manifest
            .timings_ms
            .insert("CM/selection".into(), elapsed_ms(start));
    }

    for (set, table) in &outputs {
        let final_path = ctx.out().join(set_file(*set));
        let path = if complete {
            final_path.clone()
        } else {
            partial_path(&final_path)
        };
        write_with(&path, |buf| table.write_csv(buf))?;
        manifest.output(&path)?;
        if complete {
            let stale = partial_path(&final_path);
            if stale.exists() {
                fs::remove_file(&stale).map_err(|e| CliError::io(&stale, e))?;
            }
        }
    }
    manifest.write(ctx.out())?;
    if complete {
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "extraction failed for {} of {} datasets; partial outputs kept:\n  {}",
            failures.len(),
            ids.len(),
            failures.join("\n  ")
        )))
    }
}
