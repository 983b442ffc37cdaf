//! Image lists: JSON documents naming the rasters of each image.
//!
//! Relative paths are resolved against the directory of the list file.
//! In a raw list (written by `synth`) the cube is in the sensor plane and
//! the annotations in the ortho plane; in an aligned list all rasters of an
//! entry share one grid.

use std::path::{Path, PathBuf};

use plumepipe_core::error::FormatError;
use plumepipe_core::io::{load_glt, load_hsc, save_hsc};
use plumepipe_core::{Glt, HyperCube, Mask, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub cube: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glt: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enhancement: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImageList {
    pub images: Vec<ImageEntry>,
}

impl ImageList {
    pub fn load(path: &Path) -> CliResult<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let list: ImageList =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut seen = std::collections::BTreeSet::new();
        for e in &list.images {
            if !seen.insert(&e.id) {
                return Err(CliError::Config(format!("{}: duplicate image id {:?}", path.display(), e.id)));
            }
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((list, base))
    }

    /// Writes the list with every path made relative to the list's directory.
    pub fn save(&self, path: &Path) -> CliResult<()> {
        let base = path.parent().unwrap_or(Path::new(""));
        let rel = |p: &PathBuf| relative_to(p, base);
        let list = ImageList {
            images: self
                .images
                .iter()
                .map(|e| ImageEntry {
                    id: e.id.clone(),
                    cube: rel(&e.cube),
                    glt: e.glt.as_ref().map(rel),
                    mask: e.mask.as_ref().map(rel),
                    enhancement: e.enhancement.as_ref().map(rel),
                })
                .collect(),
        };
        write_json(path, &list)
    }

    /// Entries with every path resolved against `base`.
    pub fn resolved(&self, base: &Path) -> Vec<ImageEntry> {
        let abs = |p: &PathBuf| base.join(p);
        self.images
            .iter()
            .map(|e| ImageEntry {
                id: e.id.clone(),
                cube: abs(&e.cube),
                glt: e.glt.as_ref().map(abs),
                mask: e.mask.as_ref().map(abs),
                enhancement: e.enhancement.as_ref().map(abs),
            })
            .collect()
    }
}

impl ImageEntry {
    pub fn files(&self) -> Vec<&Path> {
        let mut v = vec![self.cube.as_path()];
        v.extend([&self.glt, &self.mask, &self.enhancement].into_iter().flatten().map(PathBuf::as_path));
        v
    }

    pub fn require<'a>(&self, field: &'a Option<PathBuf>, name: &str) -> CliResult<&'a Path> {
        field
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("image {:?} has no {name}", self.id)))
    }
}

pub fn relative_to(path: &Path, base: &Path) -> PathBuf {
    pathdiff::diff_paths(path, base).unwrap_or_else(|| path.to_path_buf())
}

fn with_path(path: &Path, e: FormatError) -> CliError {
    match e {
        FormatError::Io(io) => CliError::io(path, io),
        other => CliError::Core(other.into()),
    }
}

pub fn read_cube<T: Scalar>(path: &Path) -> CliResult<HyperCube<T>> {
    load_hsc(path).map(|(c, _)| c).map_err(|e| with_path(path, e))
}

pub fn write_cube<T: Scalar>(path: &Path, cube: &HyperCube<T>, units: Option<&str>) -> CliResult<()> {
    save_hsc(path, cube, units).map_err(|e| with_path(path, e))
}

pub fn read_mask(path: &Path) -> CliResult<Mask> {
    Ok(Mask::from_cube(&read_cube::<f32>(path)?))
}

pub fn write_mask(path: &Path, mask: &Mask) -> CliResult<()> {
    write_cube(path, &mask.to_cube::<f32>(None), Some("mask"))
}

pub fn read_glt(path: &Path) -> CliResult<Glt> {
    load_glt(path).map_err(|e| match e {
        plumepipe_core::Error::Format(f) => with_path(path, f),
        other => CliError::Core(other),
    })
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> CliResult<D> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
