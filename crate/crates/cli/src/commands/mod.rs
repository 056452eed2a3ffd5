//! Pipeline stages driven from an [`ExperimentConfig`].

mod baselevel;
mod extract;
mod meta;
mod metatarget;
mod report;
mod synth;

use std::path::{Path, PathBuf};
use std::time::Instant;

use cfml_core::derive_seed;

pub use baselevel::baselevel;
pub use extract::extract;
pub use meta::{meta, MetaInputs};
pub use metatarget::metatarget;
pub use report::report;
pub use synth::synth;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Salts of the per-stage seeds derived from the experiment seed.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Landmarkers = 1,
    Communities = 2,
    PairSampling = 3,
    Baselevel = 4,
    Meta = 5,
}

/// A validated configuration plus the run flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub config_path: Option<PathBuf>,
    pub jobs: usize,
    pub resume: bool,
    pub dry_run: bool,
}

impl Context {
    pub fn out(&self) -> &Path {
        &self.cfg.output
    }

    pub fn seed(&self, stream: Stream) -> u64 {
        derive_seed(self.cfg.seed, stream as u64)
    }

    /// Runs `f` on a worker pool of `--jobs` threads (rayon's default when 0).
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> CliResult<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(f))
    }
}

pub(crate) fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
