//! Subcommand implementations. Each stage reads documented inputs, writes
//! its outputs under the output root, and records provenance.

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::CliResult;
use crate::images::ImageList;
use crate::provenance::StageRun;

mod dataset;
mod eval;
mod geometry;
mod mf;
mod synth;

pub use dataset::{bands, jitter, normalize, split, stats, tile};
pub use eval::{eval, report};
pub use geometry::{ortho, unortho};
pub use mf::mf;
pub use synth::synth;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageOutcome {
    pub stage: String,
    pub status: &'static str,
    pub outputs: Vec<PathBuf>,
}

pub struct Ctx {
    pub cfg: PipelineConfig,
    pub root: PathBuf,
    /// Rerun even when the provenance record says the stage is up to date.
    pub force: bool,
}

impl Ctx {
    pub fn new(cfg: PipelineConfig, force: bool) -> Self {
        let root = cfg.out.clone();
        Self { cfg, root, force }
    }

    /// Working directory of the selected dataset.
    pub fn dataset_dir(&self) -> PathBuf {
        self.root.join(&self.cfg.dataset)
    }

    pub fn default_list(&self) -> PathBuf {
        self.dataset_dir().join("images.json")
    }

    pub fn stage_name(&self, base: &str) -> String {
        format!("{base}-{}", self.cfg.dataset)
    }

    pub fn run(
        &self,
        stage: &str,
        inputs: Vec<PathBuf>,
        body: impl FnOnce() -> CliResult<Vec<PathBuf>>,
    ) -> CliResult<StageOutcome> {
        let run = StageRun::begin(&self.root, stage, &self.cfg.hash(), &inputs)?;
        if !self.force && run.up_to_date() {
            info!("{stage}: up to date");
            let record = run.record_path();
            return Ok(StageOutcome { stage: stage.into(), status: "up-to-date", outputs: vec![record] });
        }
        info!("{stage}: running");
        let outputs = body()?;
        run.finish(&outputs)?;
        Ok(StageOutcome { stage: stage.into(), status: "ran", outputs })
    }
}

/// The list file and every file it references, for input hashing.
pub(crate) fn list_inputs(list: &Path) -> CliResult<Vec<PathBuf>> {
    let (l, base) = ImageList::load(list)?;
    let mut v = vec![list.to_path_buf()];
    for e in l.resolved(&base) {
        v.extend(e.files().into_iter().map(Path::to_path_buf));
    }
    Ok(v)
}
