use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fill::nn_fill;
use super::glt::Glt;
use crate::error::GeometryError;
use crate::raster::{HyperCube, Mask};
use crate::scalar::Scalar;

/// How colliding contributions are merged when several ortho pixels map to
/// the same source pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineRule {
    /// The first writer in row-major ortho order wins (continuous values).
    First,
    /// Logical OR of non-zero values, written as 0/1 (binary masks).
    Union,
    /// Per-band maximum (enhancement maps).
    Max,
}

/// Result of back-sampling: values exist only where `set_mask` is true.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRaster<T> {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub wavelengths_nm: Vec<f64>,
    pub values: Vec<T>,
    pub set_mask: Vec<bool>,
}

impl<T: Scalar> SparseRaster<T> {
    pub fn set_count(&self) -> usize {
        self.set_mask.iter().filter(|v| **v).count()
    }

    /// Unset pixels become invalid (fill) pixels of the cube.
    pub fn into_cube(self) -> HyperCube<T> {
        HyperCube::new(self.rows, self.cols, self.wavelengths_nm, self.values, self.set_mask)
            .expect("sparse raster shape is consistent")
    }
}

impl<T: Scalar> From<&HyperCube<T>> for SparseRaster<T> {
    fn from(cube: &HyperCube<T>) -> Self {
        Self {
            rows: cube.rows(),
            cols: cube.cols(),
            bands: cube.bands(),
            wavelengths_nm: cube.wavelengths_nm().to_vec(),
            values: cube.data().to_vec(),
            set_mask: cube.valid_mask().to_vec(),
        }
    }
}

/// Applies the lookup: `out[y, x] = src[glt[y, x]]`. Unmapped ortho pixels and
/// pixels mapped onto invalid source pixels are invalid.
pub fn orthorectify<T: Scalar>(src: &HyperCube<T>, glt: &Glt) -> Result<HyperCube<T>, GeometryError> {
    if src.shape() != glt.src_shape() {
        return Err(GeometryError::ShapeMismatch(format!(
            "source raster is {:?}, GLT source plane is {:?}",
            src.shape(),
            glt.src_shape()
        )));
    }
    let (rows, cols) = glt.ortho_shape();
    let bands = src.bands();
    let mut data = vec![T::nan(); rows * cols * bands];
    let mut valid = vec![false; rows * cols];
    if cols > 0 {
        data.par_chunks_mut(cols * bands)
            .zip(valid.par_chunks_mut(cols))
            .enumerate()
            .for_each(|(y, (drow, vrow))| {
                for x in 0..cols {
                    if let Some(p) = glt.entry(y, x) {
                        let (l, s) = (p.line as usize, p.sample as usize);
                        if src.is_valid(l, s) {
                            drow[x * bands..(x + 1) * bands].copy_from_slice(src.pixel(l, s));
                            vrow[x] = true;
                        }
                    }
                }
            });
    }
    Ok(HyperCube::new(rows, cols, src.wavelengths_nm().to_vec(), data, valid)
        .expect("ortho raster shape is consistent"))
}

pub fn orthorectify_mask(src: &Mask, glt: &Glt) -> Result<Mask, GeometryError> {
    let ortho = orthorectify(&src.to_cube::<f32>(None), glt)?;
    Ok(Mask::from_cube(&ortho))
}

/// Scatters valid ortho pixels to their source positions, merging
/// collisions with `combine`.
pub fn back_sample<T: Scalar>(
    ortho: &HyperCube<T>,
    glt: &Glt,
    combine: CombineRule,
) -> Result<SparseRaster<T>, GeometryError> {
    if ortho.shape() != glt.ortho_shape() {
        return Err(GeometryError::ShapeMismatch(format!(
            "ortho raster is {:?}, GLT ortho grid is {:?}",
            ortho.shape(),
            glt.ortho_shape()
        )));
    }
    let (rows, cols) = glt.src_shape();
    let bands = ortho.bands();
    let mut values = vec![T::nan(); rows * cols * bands];
    let mut set_mask = vec![false; rows * cols];

    // row-major ortho order defines "first" for collisions
    for (i, entry) in glt.entries().iter().enumerate() {
        let Some(p) = entry else { continue };
        if !ortho.valid_mask()[i] {
            continue;
        }
        let v = ortho.pixel_at(i);
        let j = p.line as usize * cols + p.sample as usize;
        let dst = &mut values[j * bands..(j + 1) * bands];
        let fresh = !std::mem::replace(&mut set_mask[j], true);
        match combine {
            CombineRule::First => {
                if fresh {
                    dst.copy_from_slice(v);
                }
            }
            CombineRule::Union => {
                for (d, s) in dst.iter_mut().zip(v) {
                    let on = (!fresh && *d == T::one()) || (*s != T::zero() && !s.is_nan());
                    *d = if on { T::one() } else { T::zero() };
                }
            }
            CombineRule::Max => {
                for (d, s) in dst.iter_mut().zip(v) {
                    if fresh || *s > *d {
                        *d = *s;
                    }
                }
            }
        }
    }
    Ok(SparseRaster {
        rows,
        cols,
        bands,
        wavelengths_nm: ortho.wavelengths_nm().to_vec(),
        values,
        set_mask,
    })
}

/// Approximate inverse orthorectification: back-sample, then fill every
/// unwritten pixel of the GLT footprint (dilated by `margin`) from its
/// nearest written neighbor.
pub fn unorthorectify<T: Scalar>(
    ortho: &HyperCube<T>,
    glt: &Glt,
    combine: CombineRule,
    margin: usize,
) -> Result<HyperCube<T>, GeometryError> {
    let sparse = back_sample(ortho, glt, combine)?;
    let region = glt.footprint(margin);
    nn_fill(&sparse, &region)
}

/// Mask convenience wrapper using [`CombineRule::Union`].
pub fn unorthorectify_mask(ortho: &Mask, glt: &Glt, margin: usize) -> Result<Mask, GeometryError> {
    let cube = unorthorectify(&ortho.to_cube::<f32>(None), glt, CombineRule::Union, margin)?;
    Ok(Mask::from_cube(&cube))
}
