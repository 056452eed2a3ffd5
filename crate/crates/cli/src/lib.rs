//! Command-line orchestration of the metalearning pipeline: metafeature
//! extraction, baselevel experiments, metatargets and metalevel evaluation.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Context, MetaInputs};
use config::ExperimentConfig;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "cfml",
    version,
    about = "Algorithm selection for collaborative filtering"
)]
pub struct Cli {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Overrides the configured experiment seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Reuse finished work from an interrupted run.
    #[arg(long, global = true)]
    pub resume: bool,
    /// Print the planned work and write nothing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the configured metafeature sets.
    Extract,
    /// Run every baselearner on every dataset with k-fold cross-validation.
    Baselevel,
    /// Build metatargets and alignment reports from a performance table.
    Metatarget {
        /// Performance CSV; defaults to `<out>/performance.csv`.
        #[arg(long)]
        performance: Option<PathBuf>,
    },
    /// Evaluate the metalearners and write scores, importance, impact and CD.
    Meta {
        /// Metafeature CSV; needs a single entry in `meta_features`.
        #[arg(long)]
        features: Option<PathBuf>,
        /// Metatarget CSV; defaults to the configured metatarget under `<out>`.
        #[arg(long)]
        targets: Option<PathBuf>,
        /// Performance CSV for the impact curves.
        #[arg(long)]
        performance: Option<PathBuf>,
    },
    /// Print the score summary and render SVG charts.
    Report,
    /// Run extract, baselevel, metatarget and meta in order.
    Run,
    /// Write the synthetic corpus and a matching config into `--out`.
    Synth {
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
}

fn context(cli: &Cli) -> CliResult<Context> {
    let path = cli
        .config
        .clone()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    cfg.validate()?;
    Ok(Context {
        cfg,
        config_path: Some(path),
        jobs: cli.jobs,
        resume: cli.resume,
        dry_run: cli.dry_run,
    })
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Command::Synth { count } = cli.command {
        let out = cli
            .out
            .clone()
            .ok_or_else(|| CliError::Config("synth needs --out".into()))?;
        return commands::synth(&out, count, cli.seed.unwrap_or(1), cli.dry_run);
    }
    let ctx = context(&cli)?;
    match cli.command {
        Command::Extract => commands::extract(&ctx),
        Command::Baselevel => commands::baselevel(&ctx),
        Command::Metatarget { performance } => commands::metatarget(&ctx, performance),
        Command::Meta {
            features,
            targets,
            performance,
        } => commands::meta(
            &ctx,
            MetaInputs {
                features,
                targets,
                performance,
            },
        ),
        Command::Report => commands::report(&ctx),
        Command::Run => {
            commands::extract(&ctx)?;
            commands::baselevel(&ctx)?;
            commands::metatarget(&ctx, None)?;
            commands::meta(&ctx, MetaInputs::default())
        }
        Command::Synth { .. } => unreachable!("handled above"),
    }
}
