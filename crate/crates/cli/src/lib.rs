//! Command-line front end for the plume pipeline.
//!
//! A typical run builds a synthetic corpus and both datasets:
//!
//! ```text
//! plumepipe --out run synth
//! plumepipe --out run unortho
//! plumepipe --out run split && plumepipe --out run tile
//! plumepipe --out run mf && plumepipe --out run eval
//! ```

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod error;
pub mod images;
pub mod provenance;
pub mod stages;

pub use config::PipelineConfig;
pub use error::{CliError, CliResult};
pub use stages::{Ctx, StageOutcome};

#[derive(Debug, Parser)]
#[command(name = "plumepipe", version, about = "Build and score orthorectified and unorthorectified methane-plume datasets")]
pub struct Cli {
    /// Pipeline config (JSON); flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Strong-plume threshold in ppm·m.
    #[arg(long = "threshold-ppm-m", global = true)]
    pub threshold_ppm_m: Option<f64>,
    /// Output root.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dataset the downstream stages work on: ortho or unortho.
    #[arg(long, global = true)]
    pub dataset: Option<String>,
    /// Rerun stages that are already up to date.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Input {
    /// Image list to read instead of the stage default.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SplitInput {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub split_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic sensor-plane scenes, GLTs and ortho annotations.
    Synth,
    /// Orthorectify cubes of a raw image list.
    Ortho(Input),
    /// Map ortho annotations back to the sensor plane.
    Unortho(Input),
    /// Keep the configured wavelength ranges and RGB bands.
    Bands(Input),
    /// Tile images into the dataset manifest.
    Tile(SplitInput),
    /// Grid tiles plus jittered re-crops.
    Jitter(SplitInput),
    /// Seeded image-level train/val/test split.
    Split(Input),
    /// Per-band mean and std over the statistics splits.
    Stats(SplitInput),
    /// Standardize cubes with saved band statistics.
    Normalize {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Matched-filter enhancement and threshold masks.
    Mf {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        signature: Option<PathBuf>,
    },
    /// Score prediction masks on manifest tiles.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Improvement arithmetic over a results table.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

impl Cli {
    /// Effective config: file (if any) with flag overrides applied.
    pub fn resolve_config(&self) -> CliResult<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(t) = self.threshold_ppm_m {
            cfg.threshold_ppm_m = t;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(d) = &self.dataset {
            cfg.dataset = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one subcommand inside a worker pool of the configured size.
pub fn run(cli: &Cli) -> CliResult<StageOutcome> {
    let cfg = cli.resolve_config()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let ctx = Ctx::new(cfg, cli.force);
    pool.install(|| dispatch(&ctx, &cli.command))
}

fn dispatch(ctx: &Ctx, command: &Command) -> CliResult<StageOutcome> {
    use stages as s;
    match command {
        Command::Synth => s::synth(ctx),
        Command::Ortho(i) => s::ortho(ctx, i.input.as_deref()),
        Command::Unortho(i) => s::unortho(ctx, i.input.as_deref()),
        Command::Bands(i) => s::bands(ctx, i.input.as_deref()),
        Command::Tile(a) => s::tile(ctx, a.input.input.as_deref(), a.split_file.as_deref()),
        Command::Jitter(a) => s::jitter(ctx, a.input.input.as_deref(), a.split_file.as_deref()),
        Command::Split(i) => s::split(ctx, i.input.as_deref()),
        Command::Stats(a) => s::stats(ctx, a.input.input.as_deref(), a.split_file.as_deref()),
        Command::Normalize { input, stats } => s::normalize(ctx, input.input.as_deref(), stats.as_deref()),
        Command::Mf { input, signature } => s::mf(ctx, input.input.as_deref(), signature.as_deref()),
        Command::Eval { input, predictions, manifest } => {
            s::eval(ctx, input.input.as_deref(), predictions.as_deref(), manifest.as_deref())
        }
        Command::Report { input } => s::report(ctx, input),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_args<I, T>(args: I) -> CliResult<StageOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(&cli)
}
