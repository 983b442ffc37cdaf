//! Core raster containers: the band-interleaved-by-pixel [`HyperCube`] and
//! the binary [`Mask`], plus band selection and per-band normalization.

mod bands;
mod stats;

pub use bands::{select_bands, BandSelection};
pub use stats::{band_stats, normalize, BandStats, DEFAULT_NORM_EPS};

use crate::error::RasterError;
use crate::scalar::Scalar;

/// A `rows x cols x bands` raster stored band-interleaved-by-pixel.
///
/// Pixels whose `valid` flag is false hold NaN in every band; validity is
/// always read from the mask, never inferred from the values.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube<T> {
    rows: usize,
    cols: usize,
    bands: usize,
    wavelengths_nm: Vec<f64>,
    data: Vec<T>,
    valid: Vec<bool>,
}

pub(crate) fn check_wavelengths(w: &[f64]) -> Result<(), RasterError> {
    if w.iter().any(|x| !x.is_finite()) || w.windows(2).any(|p| p[1] <= p[0]) {
        return Err(RasterError::InvalidWavelengths);
    }
    Ok(())
}

impl<T: Scalar> HyperCube<T> {
    /// Builds a cube, overwriting the bands of every invalid pixel with NaN.
    pub fn new(
        rows: usize,
        cols: usize,
        wavelengths_nm: Vec<f64>,
        mut data: Vec<T>,
        valid: Vec<bool>,
    ) -> Result<Self, RasterError> {
        let bands = wavelengths_nm.len();
        if bands == 0 {
            return Err(RasterError::InvalidShape("cube needs at least one band".into()));
        }
        check_wavelengths(&wavelengths_nm)?;
        if data.len() != rows * cols * bands {
            return Err(RasterError::InvalidShape(format!(
                "data length {} != {rows}x{cols}x{bands}",
                data.len()
            )));
        }
        if valid.len() != rows * cols {
            return Err(RasterError::InvalidShape(format!(
                "mask length {} != {rows}x{cols}",
                valid.len()
            )));
        }
        for (px, ok) in data.chunks_exact_mut(bands).zip(&valid) {
            if !ok {
                px.fill(T::nan());
            }
        }
        Ok(Self {
            rows,
            cols,
            bands,
            wavelengths_nm,
            data,
            valid,
        })
    }

    /// A cube with every pixel valid.
    pub fn from_data(
        rows: usize,
        cols: usize,
        wavelengths_nm: Vec<f64>,
        data: Vec<T>,
    ) -> Result<Self, RasterError> {
        Self::new(rows, cols, wavelengths_nm, data, vec![true; rows * cols])
    }

    /// A cube with every pixel invalid.
    pub fn empty(rows: usize, cols: usize, wavelengths_nm: Vec<f64>) -> Result<Self, RasterError> {
        let n = rows * cols * wavelengths_nm.len();
        Self::new(rows, cols, wavelengths_nm, vec![T::nan(); n], vec![false; rows * cols])
    }

    /// Single-band raster (masks, enhancement maps). The band is tagged 0 nm.
    pub fn single_band(
        rows: usize,
        cols: usize,
        data: Vec<T>,
        valid: Vec<bool>,
    ) -> Result<Self, RasterError> {
        Self::new(rows, cols, vec![0.0], data, valid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn bands(&self) -> usize {
        self.bands
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn pixel_count(&self) -> usize {
        self.rows * self.cols
    }
    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelengths_nm
    }
    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> &[T] {
        self.pixel_at(self.index(row, col))
    }

    /// Bands of the pixel with flat row-major index `idx`.
    #[inline]
    pub fn pixel_at(&self, idx: usize) -> &[T] {
        &self.data[idx * self.bands..(idx + 1) * self.bands]
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[self.index(row, col)]
    }

    /// Writes a pixel and marks it valid.
    pub fn set_pixel_at(&mut self, idx: usize, values: &[T]) {
        debug_assert_eq!(values.len(), self.bands);
        self.data[idx * self.bands..(idx + 1) * self.bands].copy_from_slice(values);
        self.valid[idx] = true;
    }

    pub fn invalidate_at(&mut self, idx: usize) {
        self.data[idx * self.bands..(idx + 1) * self.bands].fill(T::nan());
        self.valid[idx] = false;
    }

    /// Valid pixels in row-major order with their flat index.
    pub fn valid_pixels(&self) -> impl Iterator<Item = (usize, &[T])> + '_ {
        self.data
            .chunks_exact(self.bands)
            .enumerate()
            .filter(move |(i, _)| self.valid[*i])
    }

    /// Copies the `height x width` window at (`row`, `col`). Panics when the
    /// window leaves the raster.
    pub fn crop(&self, row: usize, col: usize, height: usize, width: usize) -> Self {
        assert!(row + height <= self.rows && col + width <= self.cols, "crop out of bounds");
        let mut data = Vec::with_capacity(height * width * self.bands);
        let mut valid = Vec::with_capacity(height * width);
        for r in row..row + height {
            let start = self.index(r, col);
            data.extend_from_slice(&self.data[start * self.bands..(start + width) * self.bands]);
            valid.extend_from_slice(&self.valid[start..start + width]);
        }
        Self {
            rows: height,
            cols: width,
            bands: self.bands,
            wavelengths_nm: self.wavelengths_nm.clone(),
            data,
            valid,
        }
    }

    /// Converts the sample type, keeping layout and validity.
    pub fn cast<U: Scalar>(&self) -> HyperCube<U> {
        HyperCube {
            rows: self.rows,
            cols: self.cols,
            bands: self.bands,
            wavelengths_nm: self.wavelengths_nm.clone(),
            data: self.data.iter().map(|v| U::of(v.f64())).collect(),
            valid: self.valid.clone(),
        }
    }

    /// Consumes the cube into `(data, valid)`.
    pub fn into_parts(self) -> (Vec<T>, Vec<bool>) {
        (self.data, self.valid)
    }
}

/// A binary raster, e.g. a plume annotation or a predicted segmentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, data: Vec<bool>) -> Result<Self, RasterError> {
        if data.len() != rows * cols {
            return Err(RasterError::InvalidShape(format!(
                "mask length {} != {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    /// Positive where the first band is a valid value above 0.5.
    pub fn from_cube<T: Scalar>(cube: &HyperCube<T>) -> Self {
        let half = T::of(0.5);
        let data = (0..cube.pixel_count())
            .map(|i| cube.valid[i] && cube.pixel_at(i)[0] > half)
            .collect();
        Self {
            rows: cube.rows,
            cols: cube.cols,
            data,
        }
    }

    /// Encodes as a single-band 0/1 raster with the given validity (all valid if `None`).
    pub fn to_cube<T: Scalar>(&self, valid: Option<&[bool]>) -> HyperCube<T> {
        let data = self
            .data
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect();
        let valid = valid.map_or_else(|| vec![true; self.data.len()], <[bool]>::to_vec);
        HyperCube::single_band(self.rows, self.cols, data, valid).expect("mask shape is consistent")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn data(&self) -> &[bool] {
        &self.data
    }
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.cols + col]
    }
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.cols + col] = value;
    }
    pub fn count(&self) -> usize {
        self.data.iter().filter(|v| **v).count()
    }
    pub fn any(&self) -> bool {
        self.data.iter().any(|v| *v)
    }

    pub fn crop(&self, row: usize, col: usize, height: usize, width: usize) -> Self {
        assert!(row + height <= self.rows && col + width <= self.cols, "crop out of bounds");
        let mut data = Vec::with_capacity(height * width);
        for r in row..row + height {
            let start = r * self.cols + col;
            data.extend_from_slice(&self.data[start..start + width]);
        }
        Self {
            rows: height,
            cols: width,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_pixels_hold_fill() {
        let cube = HyperCube::<f32>::new(1, 2, vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0], vec![true, false])
            .unwrap();
        assert_eq!(cube.pixel(0, 0), &[1.0, 2.0]);
        assert!(cube.pixel(0, 1).iter().all(|v| v.is_nan()));
    }

    #[test]
    fn rejects_bad_wavelengths_and_shapes() {
        assert_eq!(
            HyperCube::<f32>::from_data(1, 1, vec![2.0, 1.0], vec![0.0, 0.0]).unwrap_err(),
            RasterError::InvalidWavelengths
        );
        assert!(matches!(
            HyperCube::<f32>::from_data(2, 1, vec![1.0], vec![0.0]),
            Err(RasterError::InvalidShape(_))
        ));
    }

    #[test]
    fn crop_copies_window() {
        let data: Vec<f64> = (0..12).map(f64::from).collect();
        let cube = HyperCube::from_data(3, 4, vec![5.0], data).unwrap();
        let c = cube.crop(1, 1, 2, 2);
        assert_eq!(c.data(), &[5.0, 6.0, 9.0, 10.0]);
        let m = Mask::from_cube(&cube).crop(0, 0, 1, 2);
        assert_eq!(m.data(), &[false, true]);
    }

    #[test]
    fn mask_cube_round_trip() {
        let m = Mask::new(2, 2, vec![true, false, false, true]).unwrap();
        assert_eq!(Mask::from_cube(&m.to_cube::<f32>(None)), m);
    }
}
