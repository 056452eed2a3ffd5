//! `synth`: writes the bundled synthetic corpus and a ready-to-run config.

use std::path::Path;

use cfml_core::baselevel::{Algorithm, BaselearnerConfig, Task};
use cfml_core::dataset::{Format, Scale};
use cfml_core::synth::synthetic_corpus;
use serde_json::json;

use crate::config::CorpusEntry;
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, write_with};

pub fn synth(dir: &Path, count: usize, seed: u64, dry_run: bool) -> CliResult<()> {
    if count == 0 {
        return Err(CliError::Config(
            "synthetic corpus needs at least one dataset".into(),
        ));
    }
    let corpus = synthetic_corpus(count, seed);
    if dry_run {
        for (id, ds) in &corpus {
            let (u, i, r) = ds.stats();
            println!("{id}: {u} users, {i} items, {r} ratings");
        }
        return Ok(());
    }
    let mut entries = Vec::with_capacity(count);
    for (id, ds) in &corpus {
        let rel = Path::new("data").join(format!("{id}.csv"));
        write_with(&dir.join(&rel), |buf| ds.write_csv(buf))?;
        entries.push(CorpusEntry {
            id: Some(id.clone()),
            path: rel,
            format: Format::CsvTriples,
            scale: Some(Scale::new(1.0, 5.0)?),
        });
    }
    let baselearners: Vec<BaselearnerConfig> =
        [Algorithm::MostPopular, Algorithm::BprMf, Algorithm::WbprMf]
            .into_iter()
            .map(BaselearnerConfig::new)
            .collect();
    let config = json!({
        "corpus": entries,
        "task": Task::ItemRecommendation,
        "baselearners": baselearners.iter().map(|b| json!({"algorithm": b.algorithm})).collect::<Vec<_>>(),
        "measures": Task::ItemRecommendation.default_measures(),
        "folds": 5,
        "metafeatures": ["RM", "SL", "GR", "CM"],
        "meta_features": ["CM"],
        "seed": seed,
        "output": "out",
    });
    let mut text =
        serde_json::to_vec_pretty(&config).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push(b'\n');
    write_atomic(&dir.join("config.json"), &text)
}
