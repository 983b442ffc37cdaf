//! Orthorectification through geometric lookup tables and its approximate
//! inverse.
//!
//! A [`Glt`] records, for every pixel of the map-aligned (ortho) grid, the
//! sensor-plane pixel it was taken from. [`orthorectify`] applies that
//! lookup directly. [`unorthorectify`] goes the other way: ortho values are
//! scattered back to the pixels they came from ([`back_sample`]) and the
//! holes left inside the sensed swath are filled from the nearest written
//! pixel ([`nn_fill`]).

mod fill;
mod glt;
mod warp;

pub use fill::nn_fill;
pub use glt::{Glt, SrcPixel};
pub use warp::{
    back_sample, orthorectify, orthorectify_mask, unorthorectify, unorthorectify_mask,
    CombineRule, SparseRaster,
};
