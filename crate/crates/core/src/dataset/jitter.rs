use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::tile::{Tile, TileParams, TileSource};
use crate::error::DatasetError;
use crate::rng::SeededRng;
use crate::scalar::Scalar;

/// Jitter configuration. With an explicit `offsets` list every listed
/// offset is applied to every eligible tile; otherwise `samples_per_tile`
/// offsets are drawn uniformly from `[-max_offset, max_offset]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JitterSpec {
    pub offsets: Vec<(i64, i64)>,
    pub max_offset: i64,
    pub samples_per_tile: usize,
    /// Also jitter tiles without plume pixels.
    pub include_negatives: bool,
}

impl Default for JitterSpec {
    fn default() -> Self {
        Self {
            offsets: Vec::new(),
            max_offset: 32,
            samples_per_tile: 4,
            include_negatives: false,
        }
    }
}

/// Returns the input tiles followed by shifted re-crops of the eligible
/// ones. Shifted crops that leave the image, fail the validity rule, or
/// coincide with an existing tile are dropped. Labels of new tiles are
/// computed from their own crop.
pub fn jitter_tiles<T: Scalar>(
    tiles: &[Tile<T>],
    sources: &[TileSource<T>],
    spec: &JitterSpec,
    params: &TileParams,
    seed: u64,
) -> Result<Vec<Tile<T>>, DatasetError> {
    let half = (params.size / 2) as i64;
    for &(dr, dc) in &spec.offsets {
        if dr.abs() > half || dc.abs() > half {
            return Err(DatasetError::OffsetTooLarge(dr, dc));
        }
    }
    if spec.offsets.is_empty() && spec.max_offset.abs() > half {
        return Err(DatasetError::OffsetTooLarge(spec.max_offset, spec.max_offset));
    }
    let by_id: HashMap<&str, &TileSource<T>> = sources.iter().map(|s| (s.image_id, s)).collect();

    let mut seen: HashSet<(String, (usize, usize))> =
        tiles.iter().map(|t| (t.image_id.clone(), t.top_left())).collect();
    let mut out = tiles.to_vec();
    for (i, tile) in tiles.iter().enumerate() {
        if tile.jitter != (0, 0) || !(tile.label || spec.include_negatives) {
            continue;
        }
        let src = by_id
            .get(tile.image_id.as_str())
            .ok_or_else(|| DatasetError::UnknownImage(tile.image_id.clone()))?;
        let offsets: Vec<(i64, i64)> = if spec.offsets.is_empty() {
            let mut rng = SeededRng::derive(seed, i as u64);
            (0..spec.samples_per_tile)
                .map(|_| {
                    let m = spec.max_offset.abs();
                    (rng.range_i64(-m, m), rng.range_i64(-m, m))
                })
                .collect()
        } else {
            spec.offsets.clone()
        };
        for off in offsets {
            if let Some(j) = src.crop(tile.origin, off, params) {
                if seen.insert((j.image_id.clone(), j.top_left())) {
                    out.push(j);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::tile_raster;
    use crate::raster::{HyperCube, Mask};

    struct Img {
        cube: HyperCube<f32>,
        mask: Mask,
        enh: HyperCube<f32>,
    }

    fn image(rows: usize, cols: usize, plume_px: &[(usize, usize)]) -> Img {
        let n = rows * cols;
        let mut mask = Mask::zeros(rows, cols);
        let mut e = vec![0.0f32; n];
        for &(r, c) in plume_px {
            mask.set(r, c, true);
            e[r * cols + c] = 1000.0;
        }
        Img {
            cube: HyperCube::from_data(rows, cols, vec![1.0], (0..n).map(|v| v as f32).collect()).unwrap(),
            mask,
            enh: HyperCube::single_band(rows, cols, e, vec![true; n]).unwrap(),
        }
    }

    fn source<'a>(id: &'a str, img: &'a Img) -> TileSource<'a, f32> {
        TileSource {
            image_id: id,
            cube: &img.cube,
            mask: &img.mask,
            enhancement: &img.enh,
        }
    }

    fn params() -> TileParams {
        TileParams {
            size: 32,
            stride: 32,
            ..Default::default()
        }
    }

    #[test]
    fn identity_offset_is_noop() {
        let img = image(64, 64, &[(5, 5), (40, 40)]);
        let src = [source("a", &img)];
        let tiles = tile_raster(&src[0], &params()).unwrap();
        let spec = JitterSpec {
            offsets: vec![(0, 0)],
            ..Default::default()
        };
        assert_eq!(jitter_tiles(&tiles, &src, &spec, &params(), 1).unwrap(), tiles);
    }

    #[test]
    fn out_of_bounds_offset_dropped() {
        let img = image(64, 64, &[(5, 5)]);
        let src = [source("a", &img)];
        let tiles = tile_raster(&src[0], &params()).unwrap();
        let spec = JitterSpec {
            offsets: vec![(-16, 0)],
            ..Default::default()
        };
        let out = jitter_tiles(&tiles, &src, &spec, &params(), 1).unwrap();
        assert_eq!(out.len(), tiles.len());
        let spec = JitterSpec {
            offsets: vec![(16, 0)],
            ..Default::default()
        };
        let out = jitter_tiles(&tiles, &src, &spec, &params(), 1).unwrap();
        assert_eq!(out.len(), tiles.len() + 1);
        let j = out.last().unwrap();
        assert_eq!((j.origin, j.jitter, j.top_left()), ((0, 0), (16, 0), (16, 0)));
        // plume pixel (5, 5) is outside the shifted crop
        assert!(!j.label);
        assert_eq!(j.cube.pixel(0, 0)[0], (16 * 64) as f32);
    }

    #[test]
    fn offsets_larger_than_half_tile_rejected() {
        let img = image(64, 64, &[]);
        let src = [source("a", &img)];
        let spec = JitterSpec {
            offsets: vec![(17, 0)],
            ..Default::default()
        };
        assert_eq!(
            jitter_tiles::<f32>(&[], &src, &spec, &params(), 0).unwrap_err(),
            DatasetError::OffsetTooLarge(17, 0)
        );
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let plumes: Vec<(usize, usize)> = (0..10).map(|k| (k * 20 + 10, (k * 37) % 300 + 10)).collect();
        let img = image(256, 320, &plumes);
        let src = [source("a", &img)];
        let tiles = tile_raster(&src[0], &params()).unwrap();
        let spec = JitterSpec {
            max_offset: 16,
            ..Default::default()
        };
        let key = |ts: &[Tile<f32>]| ts.iter().map(|t| (t.top_left(), t.label)).collect::<Vec<_>>();
        let a = jitter_tiles(&tiles, &src, &spec, &params(), 9).unwrap();
        let b = jitter_tiles(&tiles, &src, &spec, &params(), 9).unwrap();
        assert_eq!(key(&a), key(&b));
        assert!(a.len() > tiles.len());
        for t in &a[tiles.len()..] {
            assert_eq!(t.label, t.mask.any());
        }
    }
}
