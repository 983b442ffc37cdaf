use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ConfusionCounts;
use crate::dataset::tile_label;
use crate::error::EvalError;
use crate::raster::Mask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Segmentation,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Segmentation => "segmentation",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    #[default]
    All,
    Strong,
    NotStrong,
}

impl Stratum {
    pub fn admits(self, strong: bool) -> bool {
        match self {
            Stratum::All => true,
            Stratum::Strong => strong,
            Stratum::NotStrong => !strong,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Pool confusion counts over all pixels of all tiles.
    #[default]
    Micro,
    /// Average per-tile precision, recall and IoU over the tiles where each is defined.
    Macro,
}

/// One scored tile: prediction and ground truth over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTile {
    pub pred: Mask,
    pub gt: Mask,
    /// Pixels outside this mask (padding, fill) are not scored.
    pub valid: Option<Vec<bool>>,
    pub strong: bool,
}

impl EvalTile {
    pub fn counts(&self) -> Result<ConfusionCounts, EvalError> {
        ConfusionCounts::from_masks(&self.pred, &self.gt, self.valid.as_deref())
    }

    fn valid_part(&self, mask: &Mask) -> Mask {
        match &self.valid {
            None => mask.clone(),
            Some(v) => {
                let data = mask.data().iter().zip(v).map(|(m, v)| *m && *v).collect();
                Mask::new(mask.rows(), mask.cols(), data).expect("shape checked")
            }
        }
    }

    /// Tile-level (prediction, truth) labels under the one-positive-pixel rule.
    pub fn labels(&self) -> Result<(bool, bool), EvalError> {
        self.counts()?;
        Ok((tile_label(&self.valid_part(&self.pred)), tile_label(&self.valid_part(&self.gt))))
    }
}

/// Percentages with zero-denominator metrics reported as 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: Task,
    pub stratum: Stratum,
    pub aggregation: Aggregation,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iou: Option<f64>,
    pub counts: ConfusionCounts,
    /// Number of tiles in the stratum.
    pub tiles: usize,
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

impl MetricsReport {
    pub fn from_counts(task: Task, stratum: Stratum, counts: ConfusionCounts, tiles: usize) -> Self {
        let precision = counts.precision().unwrap_or(0.0);
        let recall = counts.recall().unwrap_or(0.0);
        Self {
            task,
            stratum,
            aggregation: Aggregation::Micro,
            precision,
            recall,
            f1: harmonic(precision, recall),
            accuracy: (task == Task::Classification).then(|| counts.accuracy().unwrap_or(0.0)),
            iou: (task == Task::Segmentation).then(|| counts.iou().unwrap_or(0.0)),
            counts,
            tiles,
        }
    }
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> f64 {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Segmentation metrics over the tiles admitted by `stratum`.
pub fn pixel_metrics(tiles: &[EvalTile], stratum: Stratum, aggregation: Aggregation) -> Result<MetricsReport, EvalError> {
    let per_tile: Vec<ConfusionCounts> = tiles
        .par_iter()
        .filter(|t| stratum.admits(t.strong))
        .map(EvalTile::counts)
        .collect::<Result<_, _>>()?;
    let total: ConfusionCounts = per_tile.iter().copied().sum();
    let mut report = MetricsReport::from_counts(Task::Segmentation, stratum, total, per_tile.len());
    if aggregation == Aggregation::Macro {
        report.aggregation = Aggregation::Macro;
        report.precision = mean_defined(per_tile.iter().map(|c| c.precision()));
        report.recall = mean_defined(per_tile.iter().map(|c| c.recall()));
        report.f1 = harmonic(report.precision, report.recall);
        report.iou = Some(mean_defined(per_tile.iter().map(|c| c.iou())));
    }
    Ok(report)
}

/// Classification metrics from aligned per-tile labels.
pub fn tile_metrics(pred: &[bool], gt: &[bool], strong: &[bool], stratum: Stratum) -> Result<MetricsReport, EvalError> {
    if pred.len() != gt.len() {
        return Err(EvalError::LengthMismatch(pred.len(), gt.len()));
    }
    if strong.len() != gt.len() {
        return Err(EvalError::LengthMismatch(strong.len(), gt.len()));
    }
    let mut counts = ConfusionCounts::default();
    let mut tiles = 0;
    for ((p, g), s) in pred.iter().zip(gt).zip(strong) {
        if stratum.admits(*s) {
            counts.record(*p, *g);
            tiles += 1;
        }
    }
    Ok(MetricsReport::from_counts(Task::Classification, stratum, counts, tiles))
}

/// Classification metrics with labels derived from masks by the one-positive-pixel rule.
pub fn tile_metrics_from_masks(tiles: &[EvalTile], stratum: Stratum) -> Result<MetricsReport, EvalError> {
    let labels: Vec<(bool, bool)> = tiles.iter().map(EvalTile::labels).collect::<Result<_, _>>()?;
    let pred: Vec<bool> = labels.iter().map(|l| l.0).collect();
    let gt: Vec<bool> = labels.iter().map(|l| l.1).collect();
    let strong: Vec<bool> = tiles.iter().map(|t| t.strong).collect();
    tile_metrics(&pred, &gt, &strong, stratum)
}
