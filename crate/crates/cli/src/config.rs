//! Pipeline configuration: one JSON document with a section per subcommand.
//!
//! Precedence: command-line flags, then the config file, then built-in
//! defaults. Every field is optional in the file.

use std::path::{Path, PathBuf};

use plumepipe_core::dataset::{JitterSpec, SplitMode, DEFAULT_FRACTIONS, DEFAULT_STRONG_THRESHOLD_PPM_M};
use plumepipe_core::dataset::{DEFAULT_MIN_VALID_FRAC, DEFAULT_TILE_SIZE};
use plumepipe_core::eval::Aggregation;
use plumepipe_core::geometry::CombineRule;
use plumepipe_core::matched_filter::{FilterMode, Grouping, DEFAULT_LOADING, DEFAULT_MASK_THRESHOLD_PPM_M};
use plumepipe_core::raster::{BandSelection, DEFAULT_NORM_EPS};
use plumepipe_core::synth::SceneSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads; logical CPU count when absent. Never affects outputs.
    pub workers: Option<usize>,
    /// Strong-plume threshold for tiles and evaluation strata.
    pub threshold_ppm_m: f64,
    /// `ortho` or `unortho`: which dataset the downstream stages work on.
    pub dataset: String,
    pub synth: SynthConfig,
    pub unortho: UnorthoConfig,
    pub bands: BandSelection,
    pub tile: TileConfig,
    pub jitter: JitterConfig,
    pub split: SplitConfig,
    pub normalize: NormalizeConfig,
    pub mf: MfConfig,
    pub eval: EvalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            seed: 0,
            workers: None,
            threshold_ppm_m: DEFAULT_STRONG_THRESHOLD_PPM_M,
            dataset: "unortho".into(),
            synth: SynthConfig::default(),
            unortho: UnorthoConfig::default(),
            bands: BandSelection::default(),
            tile: TileConfig::default(),
            jitter: JitterConfig::default(),
            split: SplitConfig::default(),
            normalize: NormalizeConfig::default(),
            mf: MfConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub count: usize,
    /// Template for every image; its seed is replaced per image.
    pub scene: SceneSpec,
    /// Used when the template lists no plumes.
    pub plumes_per_image: usize,
    pub peak_ppm_m: (f64, f64),
    pub sigma_px: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            count: 4,
            scene: SceneSpec::default(),
            plumes_per_image: 2,
            peak_ppm_m: (600.0, 2000.0),
            sigma_px: (3.0, 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnorthoConfig {
    /// Chebyshev dilation of the GLT footprint before filling.
    pub margin: usize,
    pub mask_rule: CombineRule,
    pub enhancement_rule: CombineRule,
    /// Treat list cubes as ortho-plane and warp them too (rule below).
    pub resample_cube: bool,
    pub cube_rule: CombineRule,
}

impl Default for UnorthoConfig {
    fn default() -> Self {
        Self {
            margin: 0,
            mask_rule: CombineRule::Union,
            enhancement_rule: CombineRule::Max,
            resample_cube: false,
            cube_rule: CombineRule::First,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TileConfig {
    pub size: usize,
    /// Defaults to `size`.
    pub stride: Option<usize>,
    pub min_valid_frac: f64,
}

impl Default for TileConfig {
    fn default() -> Self {
        Self { size: DEFAULT_TILE_SIZE, stride: None, min_valid_frac: DEFAULT_MIN_VALID_FRAC }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JitterConfig {
    #[serde(flatten)]
    pub spec: JitterSpec,
    /// Splits whose tiles are augmented.
    pub splits: Vec<String>,
}

impl Default for JitterConfig {
    fn default() -> Self {
        Self { spec: JitterSpec::default(), splits: vec!["train".into(), "val".into()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub fractions: (f64, f64, f64),
    pub mode: SplitMode,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { fractions: DEFAULT_FRACTIONS, mode: SplitMode::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeConfig {
    pub eps: f64,
    /// Splits whose images feed the statistics.
    pub stats_splits: Vec<String>,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self { eps: DEFAULT_NORM_EPS, stats_splits: vec!["train".into()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfConfig {
    pub grouping: Grouping,
    pub loading: f64,
    pub mode: FilterMode,
    /// Two-column signature file; the synth signature or built-in methane lines otherwise.
    pub signature: Option<PathBuf>,
    pub mask_threshold_ppm_m: f64,
}

impl Default for MfConfig {
    fn default() -> Self {
        Self {
            grouping: Grouping::default(),
            loading: DEFAULT_LOADING,
            mode: FilterMode::default(),
            signature: None,
            mask_threshold_ppm_m: DEFAULT_MASK_THRESHOLD_PPM_M,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub aggregation: Aggregation,
    /// Split to score, or `all`.
    pub split: String,
    pub model: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { aggregation: Aggregation::default(), split: "test".into(), model: "mag1c".into() }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.dataset != "ortho" && self.dataset != "unortho" {
            return Err(CliError::Config(format!("dataset must be ortho or unortho, got {:?}", self.dataset)));
        }
        if !self.threshold_ppm_m.is_finite() {
            return Err(CliError::Config("threshold_ppm_m must be finite".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        for s in self.jitter.splits.iter().chain(&self.normalize.stats_splits) {
            parse_split_name(s)?;
        }
        if self.eval.split != "all" {
            parse_split_name(&self.eval.split)?;
        }
        Ok(())
    }

    /// SHA-256 of the config with `workers` removed, which cannot change outputs.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("workers");
            map.remove("out");
        }
        crate::provenance::sha256_hex(v.to_string().as_bytes())
    }
}

pub fn parse_split_name(s: &str) -> CliResult<plumepipe_core::dataset::Split> {
    use plumepipe_core::dataset::Split;
    match s {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        "test" => Ok(Split::Test),
        other => Err(CliError::Config(format!("unknown split {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_losslessly() {
        let mut c = PipelineConfig::default();
        c.seed = 7;
        c.tile.stride = Some(64);
        c.synth.scene.rows = 40;
        c.mf.signature = Some("sig.txt".into());
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: PipelineConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c: PipelineConfig = serde_json::from_str(r#"{"seed": 3, "tile": {"size": 64}}"#).unwrap();
        assert_eq!((c.seed, c.tile.size, c.tile.min_valid_frac), (3, 64, 0.8));
        assert_eq!(c.threshold_ppm_m, 900.0);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"sed": 3}"#).is_err());
    }

    #[test]
    fn hash_ignores_workers() {
        let a = PipelineConfig::default();
        let b = PipelineConfig { workers: Some(8), ..a.clone() };
        let c = PipelineConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
