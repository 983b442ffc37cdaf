use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::raster::{HyperCube, Mask};
use crate::scalar::Scalar;

pub const DEFAULT_TILE_SIZE: usize = 128;
pub const DEFAULT_MIN_VALID_FRAC: f64 = 0.8;
pub const DEFAULT_STRONG_THRESHOLD_PPM_M: f64 = 900.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TileParams {
    pub size: usize,
    pub stride: usize,
    /// A tile is kept only if strictly more than this fraction of its
    /// pixels is valid.
    pub min_valid_frac: f64,
    pub strong_threshold_ppm_m: f64,
}

impl Default for TileParams {
    fn default() -> Self {
        Self {
            size: DEFAULT_TILE_SIZE,
            stride: DEFAULT_TILE_SIZE,
            min_valid_frac: DEFAULT_MIN_VALID_FRAC,
            strong_threshold_ppm_m: DEFAULT_STRONG_THRESHOLD_PPM_M,
        }
    }
}

/// One full-size image to be tiled.
#[derive(Debug, Clone, Copy)]
pub struct TileSource<'a, T> {
    pub image_id: &'a str,
    pub cube: &'a HyperCube<T>,
    pub mask: &'a Mask,
    pub enhancement: &'a HyperCube<T>,
}

impl<T: Scalar> TileSource<'_, T> {
    fn check(&self) -> Result<(), DatasetError> {
        let shape = self.cube.shape();
        if self.mask.shape() != shape || self.enhancement.shape() != shape {
            return Err(DatasetError::ShapeMismatch(format!(
                "{}: cube {:?}, mask {:?}, enhancement {:?}",
                self.image_id,
                shape,
                self.mask.shape(),
                self.enhancement.shape()
            )));
        }
        Ok(())
    }

    /// Crops the tile whose top-left corner is `(row, col)`; `None` when it
    /// falls outside the image or fails the validity rule.
    pub(crate) fn crop(
        &self,
        origin: (usize, usize),
        jitter: (i64, i64),
        params: &TileParams,
    ) -> Option<Tile<T>> {
        let row = origin.0 as i64 + jitter.0;
        let col = origin.1 as i64 + jitter.1;
        let s = params.size;
        if row < 0 || col < 0 || row as usize + s > self.cube.rows() || col as usize + s > self.cube.cols() {
            return None;
        }
        let (row, col) = (row as usize, col as usize);
        let cube = self.cube.crop(row, col, s, s);
        let valid_fraction = cube.valid_count() as f64 / (s * s) as f64;
        if !(cube.valid_count() as f64 > params.min_valid_frac * (s * s) as f64) {
            return None;
        }
        let mask = self.mask.crop(row, col, s, s);
        let enhancement = self.enhancement.crop(row, col, s, s);
        let max_enh = max_enhancement(&mask, &enhancement);
        Some(Tile {
            image_id: self.image_id.to_owned(),
            origin,
            jitter,
            size: s,
            label: tile_label(&mask),
            strong: strong_flag(max_enh, params.strong_threshold_ppm_m),
            max_enhancement_ppm_m: max_enh,
            valid_fraction,
            cube,
            mask,
            enhancement,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tile<T> {
    pub image_id: String,
    /// Grid origin the tile was cut from.
    pub origin: (usize, usize),
    /// Offset applied on top of `origin`; `(0, 0)` for grid tiles.
    pub jitter: (i64, i64),
    pub size: usize,
    pub label: bool,
    pub strong: bool,
    pub max_enhancement_ppm_m: f64,
    pub valid_fraction: f64,
    pub cube: HyperCube<T>,
    pub mask: Mask,
    pub enhancement: HyperCube<T>,
}

impl<T> Tile<T> {
    /// Top-left corner in the parent image.
    pub fn top_left(&self) -> (usize, usize) {
        (
            (self.origin.0 as i64 + self.jitter.0) as usize,
            (self.origin.1 as i64 + self.jitter.1) as usize,
        )
    }
}

/// Tile origins along one axis: multiples of `stride`, with a last origin
/// clamped so the final tile ends on the edge. Empty when `len < size`.
pub fn tile_origins(len: usize, size: usize, stride: usize) -> Vec<usize> {
    if len < size || stride == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (0..).map(|k| k * stride).take_while(|o| o + size <= len).collect();
    let last = len - size;
    if *out.last().unwrap() != last {
        out.push(last);
    }
    out
}

/// Cuts the image into `size x size` tiles, keeping those with more than
/// `min_valid_frac` valid pixels.
pub fn tile_raster<T: Scalar>(src: &TileSource<T>, params: &TileParams) -> Result<Vec<Tile<T>>, DatasetError> {
    src.check()?;
    if params.stride == 0 || params.stride > params.size {
        return Err(DatasetError::BadStride {
            stride: params.stride,
            size: params.size,
        });
    }
    let rows = tile_origins(src.cube.rows(), params.size, params.stride);
    let cols = tile_origins(src.cube.cols(), params.size, params.stride);
    Ok(rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .filter_map(|o| src.crop(o, (0, 0), params))
        .collect())
}

/// True iff at least one pixel is positive.
pub fn tile_label(mask: &Mask) -> bool {
    mask.any()
}

/// Max enhancement over mask-positive pixels, 0 when there are none.
pub fn max_enhancement<T: Scalar>(mask: &Mask, enhancement: &HyperCube<T>) -> f64 {
    mask.data()
        .iter()
        .enumerate()
        .filter(|(i, m)| **m && enhancement.valid_mask()[*i])
        .map(|(i, _)| enhancement.pixel_at(i)[0].f64())
        .fold(0.0, f64::max)
}

/// Inclusive strong-plume rule: `max_enhancement >= threshold`.
pub fn strong_flag(max_enhancement_ppm_m: f64, threshold_ppm_m: f64) -> bool {
    max_enhancement_ppm_m >= threshold_ppm_m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(rows: usize, cols: usize, valid: Vec<bool>) -> (HyperCube<f32>, Mask, HyperCube<f32>) {
        let n = rows * cols;
        let cube = HyperCube::new(rows, cols, vec![1.0], vec![1.0; n], valid).unwrap();
        let mask = Mask::zeros(rows, cols);
        let enh = HyperCube::single_band(rows, cols, vec![0.0; n], vec![true; n]).unwrap();
        (cube, mask, enh)
    }

    fn src<'a>(p: &'a (HyperCube<f32>, Mask, HyperCube<f32>)) -> TileSource<'a, f32> {
        TileSource {
            image_id: "img",
            cube: &p.0,
            mask: &p.1,
            enhancement: &p.2,
        }
    }

    #[test]
    fn exact_tiling() {
        let s = scene(256, 256, vec![true; 256 * 256]);
        let tiles = tile_raster(&src(&s), &TileParams::default()).unwrap();
        let origins: Vec<_> = tiles.iter().map(|t| t.origin).collect();
        assert_eq!(origins, vec![(0, 0), (0, 128), (128, 0), (128, 128)]);
    }

    #[test]
    fn clamped_origins() {
        assert_eq!(tile_origins(300, 128, 128), vec![0, 128, 172]);
        assert_eq!(tile_origins(128, 128, 128), vec![0]);
        assert_eq!(tile_origins(100, 128, 128), Vec::<usize>::new());
        assert_eq!(tile_origins(10, 4, 3), vec![0, 3, 6]);
        let s = scene(300, 300, vec![true; 90000]);
        assert_eq!(tile_raster(&src(&s), &TileParams::default()).unwrap().len(), 9);
    }

    fn with_valid(size: usize, n_valid: usize) -> bool {
        let valid: Vec<bool> = (0..size * size).map(|i| i < n_valid).collect();
        let s = scene(size, size, valid);
        let params = TileParams {
            size,
            stride: size,
            ..Default::default()
        };
        !tile_raster(&src(&s), &params).unwrap().is_empty()
    }

    #[test]
    fn strict_over_eighty_percent() {
        assert!(!with_valid(10, 80)); // 80.0 %
        assert!(with_valid(10, 81));
        assert!(!with_valid(128, 13107)); // 79.998 %
        assert!(with_valid(128, 13108));
        assert!(with_valid(128, 13222)); // 80.7 %
    }

    #[test]
    fn errors() {
        let s = scene(8, 8, vec![true; 64]);
        let bad = TileParams {
            size: 4,
            stride: 5,
            ..Default::default()
        };
        assert_eq!(
            tile_raster(&src(&s), &bad).unwrap_err(),
            DatasetError::BadStride { stride: 5, size: 4 }
        );
        let mask = Mask::zeros(4, 8);
        let t = TileSource {
            mask: &mask,
            ..src(&s)
        };
        assert!(matches!(tile_raster(&t, &bad), Err(DatasetError::ShapeMismatch(_))));
    }

    #[test]
    fn labels_and_strong_flag() {
        let mut m = Mask::zeros(128, 128);
        assert!(!tile_label(&m));
        m.set(77, 3, true);
        assert!(tile_label(&m));
        let mut enh = vec![0.0f32; 128 * 128];
        enh[77 * 128 + 3] = 900.0;
        enh[0] = 5000.0; // outside the mask: ignored
        let enh = HyperCube::single_band(128, 128, enh, vec![true; 128 * 128]).unwrap();
        assert_eq!(max_enhancement(&m, &enh), 900.0);
        assert!(strong_flag(900.0, 900.0));
        assert!(!strong_flag(899.99, 900.0));
        assert_eq!(max_enhancement(&Mask::zeros(128, 128), &enh), 0.0);
    }
}
