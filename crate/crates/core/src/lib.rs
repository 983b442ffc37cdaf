//! Hyperspectral methane-plume pipeline: GLT orthorectification and its
//! inverse, tiling and splits for ML datasets, a matched-filter baseline,
//! segmentation/classification metrics, and a synthetic-scene generator.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod io;
pub mod matched_filter;
pub mod raster;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{CombineRule, Glt};
pub use raster::{HyperCube, Mask};
pub use rng::SeededRng;
pub use scalar::Scalar;

/// Cube stored at the on-disk precision.
pub type Cube = HyperCube<f32>;
/// Cube used for statistics and filtering in double precision.
pub type Cube64 = HyperCube<f64>;
pub type Scene32 = synth::Scene<f32>;
pub type Scene64 = synth::Scene<f64>;
pub type Tile32 = dataset::Tile<f32>;
pub type ColumnStats64 = matched_filter::ColumnStats<f64>;
