//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig};
use crate::run::{self, Stage};
use crate::Result;

#[derive(Debug, Parser)]
#[command(
    name = "conceptmine",
    version,
    about = "Discover textual concepts and train concept-bottleneck classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drop null-labelled records.
    Clean(Common),
    /// Extract raw concepts from the cleaned corpus.
    Extract(Common),
    /// Count every raw concept across the corpus.
    Complete(Common),
    /// Cluster raw concepts and drop rare groups.
    Group(Common),
    /// Select groups by mutual information.
    Prune(Common),
    /// Write the lexicon and the concept matrix.
    Vectorize(Common),
    /// Train the bottleneck model and the concept-only classifiers.
    Train(Common),
    /// Score the trained models and write explanation reports.
    Evaluate(Common),
    /// Run every stage and write all reports.
    RunAll(Common),
    /// Repeat pruning and training for several gamma values.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated gamma values.
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use every non-stopword token as a concept.
    #[arg(long)]
    pub word_level: bool,
    /// Keep each raw concept as its own group.
    #[arg(long)]
    pub skip_grouping: bool,
    /// Keep every group.
    #[arg(long)]
    pub skip_pruning: bool,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Common {
    pub fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            out_dir: self.out.clone(),
            word_level: self.word_level,
            skip_grouping: self.skip_grouping,
            skip_pruning: self.skip_pruning,
            gamma: self.gamma,
            seed: self.seed,
        })?;
        Ok(cfg)
    }
}

/// Executes a parsed command and returns a one-line summary.
pub fn execute(cli: &Cli) -> Result<String> {
    let (common, stage) = match &cli.command {
        Command::Clean(c) => (c, Stage::Clean),
        Command::Extract(c) => (c, Stage::Extract),
        Command::Complete(c) => (c, Stage::Complete),
        Command::Group(c) => (c, Stage::Group),
        Command::Prune(c) => (c, Stage::Prune),
        Command::Vectorize(c) => (c, Stage::Vectorize),
        Command::Train(c) => (c, Stage::Train),
        Command::Evaluate(c) => (c, Stage::Evaluate),
        Command::RunAll(c) => {
            let cfg = c.load()?;
            let outcome = run::run_all(&cfg)?;
            let counts: Vec<String> = outcome
                .discovery
                .stage_counts(&cfg)
                .iter()
                .map(|s| format!("{}={}", s.stage, s.count))
                .collect();
            return Ok(format!("{} -> {}", counts.join(" "), cfg.out_dir.display()));
        }
        Command::Sweep { common, gammas } => {
            let cfg = common.load()?;
            let rows = run::sweep(&cfg, gammas)?;
            return Ok(format!(
                "{} gamma values -> {}",
                rows.len(),
                cfg.out_dir.display()
            ));
        }
    };
    let cfg = common.load()?;
    run::run_stage(&cfg, stage)?;
    Ok(format!("{} -> {}", stage.name(), cfg.out_dir.display()))
}
