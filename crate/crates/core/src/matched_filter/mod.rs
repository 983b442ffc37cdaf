//! Linear matched filter for methane enhancement.
//!
//! Background mean and covariance are estimated per image column (or over
//! the whole scene), loaded on the diagonal, and factorized once per group.
//! Each pixel is scored against a unit-absorption target signature; the
//! score is an enhancement in ppm·m when the target is scaled by the
//! background mean.

mod background;
mod filter;
pub mod linalg;
mod signature;

pub use background::{estimate_background, ColumnStats, GroupStats, Grouping, DEFAULT_LOADING};
pub use filter::{enhancement_from_alpha, matched_filter, threshold_alpha, threshold_enhancement, FilterMode};
pub use signature::TargetSignature;

/// Default enhancement threshold for turning the filter output into a mask.
pub const DEFAULT_MASK_THRESHOLD_PPM_M: f64 = 500.0;
