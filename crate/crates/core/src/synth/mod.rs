//! Synthetic scenes with known ground truth: pushbroom-style distortion
//! lookup tables, Gaussian methane plumes, and background radiance drawn
//! from a known Gaussian.
//!
//! Everything is driven by [`SeededRng`](crate::rng::SeededRng), so a
//! `SceneSpec` plus seed always yields the same bytes.

mod glt;
mod scene;

pub use glt::{gen_bijective_glt, gen_glt, Distortion};
pub use scene::{gen_scene, Injection, Plume, Scene, SceneSpec};
