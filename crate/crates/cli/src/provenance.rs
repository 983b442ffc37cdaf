//! Per-run provenance records and the up-to-date check that makes stages
//! resumable.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::images::{read_json, relative_to, write_json};

pub const TOOL: &str = "plumepipe";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Paths are stored relative to the output root so that two runs into
/// different roots produce identical records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub stage: String,
    pub config_hash: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

fn key(path: &Path, root: &Path) -> String {
    relative_to(path, root).to_string_lossy().replace('\\', "/")
}

fn hash_all(paths: &[PathBuf], root: &Path) -> CliResult<BTreeMap<String, String>> {
    paths.iter().map(|p| Ok((key(p, root), hash_file(p)?))).collect()
}

/// Tracks one stage run under `<root>/provenance/<stage>.json`.
pub struct StageRun {
    root: PathBuf,
    stage: String,
    config_hash: String,
    inputs: BTreeMap<String, String>,
}

impl StageRun {
    pub fn begin(root: &Path, stage: &str, config_hash: &str, inputs: &[PathBuf]) -> CliResult<Self> {
        Ok(Self {
            root: root.to_path_buf(),
            stage: stage.to_string(),
            config_hash: config_hash.to_string(),
            inputs: hash_all(inputs, root)?,
        })
    }

    pub fn record_path(&self) -> PathBuf {
        self.root.join("provenance").join(format!("{}.json", self.stage))
    }

    /// True when a previous record matches the config and inputs and every
    /// recorded output still has its recorded hash.
    pub fn up_to_date(&self) -> bool {
        let Ok(prev) = read_json::<Provenance>(&self.record_path()) else {
            return false;
        };
        prev.tool == TOOL
            && prev.version == env!("CARGO_PKG_VERSION")
            && prev.config_hash == self.config_hash
            && prev.inputs == self.inputs
            && !prev.outputs.is_empty()
            && prev.outputs.iter().all(|(k, h)| hash_file(&self.root.join(k)).is_ok_and(|cur| &cur == h))
    }

    pub fn finish(self, outputs: &[PathBuf]) -> CliResult<Provenance> {
        let record = Provenance {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            stage: self.stage.clone(),
            config_hash: self.config_hash.clone(),
            outputs: hash_all(outputs, &self.root)?,
            inputs: self.inputs.clone(),
        };
        write_json(&self.record_path(), &record)?;
        Ok(record)
    }
}
