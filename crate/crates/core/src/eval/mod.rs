//! Segmentation and classification metrics with strong-plume strata.
//!
//! Pixel metrics pool confusion counts over every valid pixel of every
//! selected tile (micro aggregation) unless macro averaging is requested.
//! All metrics are percentages carried at full precision; a metric whose
//! denominator is zero is reported as 0.

mod confusion;
mod improvement;
mod metrics;
mod table;

pub use confusion::ConfusionCounts;
pub use improvement::{improvement, ImprovementKind};
pub use metrics::{
    pixel_metrics, tile_metrics, tile_metrics_from_masks, Aggregation, EvalTile, MetricsReport, Stratum, Task,
};
pub use table::{comparisons_to_csv, default_comparisons, Comparison, ComparisonResult, Metric, ResultRow, ResultTable, RowSelector};
