use serde::{Deserialize, Serialize};

use super::{improvement, ImprovementKind, MetricsReport, Task};
use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Precision,
    Recall,
    F1,
    Accuracy,
    Iou,
}

/// One results-table row; missing cells are `None` and render as `-`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub task: Task,
    pub model: String,
    /// `None` for the unstratified row.
    #[serde(default)]
    pub threshold_ppm_m: Option<f64>,
    #[serde(default)]
    pub precision: Option<f64>,
    #[serde(default)]
    pub recall: Option<f64>,
    #[serde(default)]
    pub f1: Option<f64>,
    #[serde(default)]
    pub accuracy: Option<f64>,
    #[serde(default)]
    pub iou: Option<f64>,
}

impl ResultRow {
    pub fn from_report(dataset: &str, model: &str, threshold_ppm_m: Option<f64>, r: &MetricsReport) -> Self {
        Self {
            dataset: dataset.to_string(),
            task: r.task,
            model: model.to_string(),
            threshold_ppm_m,
            precision: Some(r.precision),
            recall: Some(r.recall),
            f1: Some(r.f1),
            accuracy: r.accuracy,
            iou: r.iou,
        }
    }

    pub fn metric(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
            Metric::Accuracy => self.accuracy,
            Metric::Iou => self.iou,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSelector {
    pub dataset: String,
    pub task: Task,
    pub model: String,
    #[serde(default)]
    pub threshold_ppm_m: Option<f64>,
}

impl RowSelector {
    fn new(dataset: &str, task: Task, model: &str, threshold_ppm_m: Option<f64>) -> Self {
        Self { dataset: dataset.into(), task, model: model.into(), threshold_ppm_m }
    }

    fn matches(&self, row: &ResultRow) -> bool {
        row.dataset == self.dataset
            && row.task == self.task
            && row.model == self.model
            && row.threshold_ppm_m == self.threshold_ppm_m
    }
}

/// `improvement(metric(a), metric(b), kind)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub metric: Metric,
    pub kind: ImprovementKind,
    pub a: RowSelector,
    pub b: RowSelector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub label: String,
    pub metric: Metric,
    pub kind: ImprovementKind,
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// The UNet-vs-mag1c and strong-vs-all comparisons for a two-dataset results table.
pub fn default_comparisons() -> Vec<Comparison> {
    use ImprovementKind::{Points, Relative};
    use Task::{Classification as Cls, Segmentation as Seg};
    let sel = RowSelector::new;
    let strong = Some(900.0);
    let cmp = |label: &str, metric, kind, a, b| Comparison { label: label.into(), metric, kind, a, b };
    vec![
        cmp("iou unet vs mag1c, all plumes", Metric::Iou, Relative, sel("ortho", Seg, "UNet", None), sel("ortho", Seg, "mag1c", None)),
        cmp("iou unet vs mag1c, strong plumes", Metric::Iou, Relative, sel("ortho", Seg, "UNet", strong), sel("ortho", Seg, "mag1c", strong)),
        cmp("iou strong vs all, ortho", Metric::Iou, Points, sel("ortho", Seg, "UNet", strong), sel("ortho", Seg, "UNet", None)),
        cmp("iou strong vs all, unortho", Metric::Iou, Points, sel("unortho", Seg, "UNet", strong), sel("unortho", Seg, "UNet", None)),
        cmp("recall strong vs all, ortho", Metric::Recall, Points, sel("ortho", Cls, "UNet", strong), sel("ortho", Cls, "UNet", None)),
        cmp("recall strong vs all, unortho", Metric::Recall, Points, sel("unortho", Cls, "UNet", strong), sel("unortho", Cls, "UNet", None)),
    ]
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    /// Defaults to [`default_comparisons`] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparisons: Option<Vec<Comparison>>,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

impl ResultTable {
    fn find(&self, sel: &RowSelector, metric: Metric) -> Result<f64, EvalError> {
        self.rows
            .iter()
            .find(|r| sel.matches(r))
            .and_then(|r| r.metric(metric))
            .ok_or_else(|| EvalError::MissingRow(format!("{sel:?} with {metric:?}")))
    }

    pub fn compare(&self) -> Result<Vec<ComparisonResult>, EvalError> {
        let comparisons = self.comparisons.clone().unwrap_or_else(default_comparisons);
        comparisons
            .into_iter()
            .map(|c| {
                let a = self.find(&c.a, c.metric)?;
                let b = self.find(&c.b, c.metric)?;
                Ok(ComparisonResult { value: improvement(a, b, c.kind)?, label: c.label, metric: c.metric, kind: c.kind, a, b })
            })
            .collect()
    }

    /// CSV with two-decimal cells.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["Dataset", "Task", "Model", "Threshold", "Precision", "Recall", "F1", "Accuracy", "IoU"])
            .expect("in-memory write");
        for r in &self.rows {
            let threshold = r.threshold_ppm_m.map_or_else(|| "N/A".to_string(), |t| format!(">= {t}"));
            w.write_record([
                r.dataset.clone(),
                r.task.as_str().to_string(),
                r.model.clone(),
                threshold,
                cell(r.precision),
                cell(r.recall),
                cell(r.f1),
                cell(r.accuracy),
                cell(r.iou),
            ])
            .expect("in-memory write");
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn tag<S: Serialize>(v: S) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn comparisons_to_csv(results: &[ComparisonResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["Comparison", "Metric", "Kind", "A", "B", "Improvement"]).expect("in-memory write");
    for c in results {
        w.write_record([
            c.label.clone(),
            tag(c.metric),
            tag(c.kind),
            format!("{:.2}", c.a),
            format!("{:.2}", c.b),
            format!("{:.2}", c.value),
        ])
        .expect("in-memory write");
    }
    into_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(dataset: &str, task: Task, model: &str, thr: Option<f64>, recall: f64, iou: Option<f64>) -> ResultRow {
        ResultRow {
            dataset: dataset.into(),
            task,
            model: model.into(),
            threshold_ppm_m: thr,
            precision: None,
            recall: Some(recall),
            f1: None,
            accuracy: None,
            iou,
        }
    }

    #[test]
    fn compares_and_renders() {
        let t = ResultTable {
            rows: vec![
                row("ortho", Task::Segmentation, "UNet", None, 19.91, Some(18.47)),
                row("ortho", Task::Segmentation, "mag1c", None, 15.69, Some(4.76)),
            ],
            comparisons: Some(default_comparisons()[..1].to_vec()),
        };
        let r = t.compare().unwrap();
        assert_eq!(format!("{:.2}", r[0].value), "288.03");
        let csv = t.to_csv();
        assert_eq!(csv.lines().nth(1), Some("ortho,segmentation,UNet,N/A,-,19.91,-,-,18.47"));
        assert!(comparisons_to_csv(&r).contains(",iou,relative,18.47,4.76,288.03"));
    }

    #[test]
    fn missing_row_is_reported() {
        let t = ResultTable::default();
        assert!(matches!(t.compare(), Err(EvalError::MissingRow(_))));
    }
}
