//! JSON-lines tile manifest and HSC shard files.
//!
//! Each image gets one cube shard and one mask shard: the tiles' crops are
//! concatenated as complete HSC records, and the manifest stores the byte
//! offset and length of every record. Shard paths are relative to the
//! manifest's directory.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::split::Split;
use super::tile::Tile;
use crate::error::FormatError;
use crate::io::encode_hsc;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileRecord {
    pub image_id: String,
    pub origin: [usize; 2],
    pub jitter: [i64; 2],
    pub size: usize,
    pub split: Split,
    pub label: bool,
    pub strong: bool,
    pub max_enhancement_ppm_m: f64,
    pub valid_fraction: f64,
    pub cube_path: String,
    pub cube_offset: u64,
    pub cube_len: u64,
    pub mask_path: String,
    pub mask_offset: u64,
    pub mask_len: u64,
}

impl TileRecord {
    pub fn top_left(&self) -> (usize, usize) {
        (
            (self.origin[0] as i64 + self.jitter[0]) as usize,
            (self.origin[1] as i64 + self.jitter[1]) as usize,
        )
    }
}

/// Writes the shards of one image's tiles under `root/<shard_dir>/` and
/// returns their manifest records in tile order.
pub fn write_tile_shards<T: Scalar>(
    root: &Path,
    shard_dir: &str,
    image_id: &str,
    split: Split,
    tiles: &[&Tile<T>],
) -> Result<Vec<TileRecord>, FormatError> {
    std::fs::create_dir_all(root.join(shard_dir))?;
    let cube_rel = format!("{shard_dir}/{image_id}.cube.hsc");
    let mask_rel = format!("{shard_dir}/{image_id}.mask.hsc");
    let mut cube_w = BufWriter::new(File::create(root.join(&cube_rel))?);
    let mut mask_w = BufWriter::new(File::create(root.join(&mask_rel))?);
    let (mut cube_off, mut mask_off) = (0u64, 0u64);
    let mut records = Vec::with_capacity(tiles.len());
    for t in tiles {
        debug_assert_eq!(t.image_id, image_id);
        let cube_bytes = encode_hsc(&t.cube, None);
        let mask_bytes = encode_hsc(&t.mask.to_cube::<f32>(None), Some("mask"));
        cube_w.write_all(&cube_bytes)?;
        mask_w.write_all(&mask_bytes)?;
        records.push(TileRecord {
            image_id: image_id.to_owned(),
            origin: [t.origin.0, t.origin.1],
            jitter: [t.jitter.0, t.jitter.1],
            size: t.size,
            split,
            label: t.label,
            strong: t.strong,
            max_enhancement_ppm_m: t.max_enhancement_ppm_m,
            valid_fraction: t.valid_fraction,
            cube_path: cube_rel.clone(),
            cube_offset: cube_off,
            cube_len: cube_bytes.len() as u64,
            mask_path: mask_rel.clone(),
            mask_offset: mask_off,
            mask_len: mask_bytes.len() as u64,
        });
        cube_off += cube_bytes.len() as u64;
        mask_off += mask_bytes.len() as u64;
    }
    cube_w.flush()?;
    mask_w.flush()?;
    Ok(records)
}

pub fn write_manifest(path: &Path, records: &[TileRecord]) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<TileRecord>, FormatError> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| FormatError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
