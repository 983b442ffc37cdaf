use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plumepipe_core::dataset::{max_enhancement, read_manifest, strong_flag};
use plumepipe_core::eval::{
    comparisons_to_csv, pixel_metrics, tile_metrics_from_masks, EvalTile, MetricsReport, ResultRow, ResultTable,
    Stratum,
};
use plumepipe_core::{Cube, Mask};
use serde::{Deserialize, Serialize};

use super::{list_inputs, Ctx, StageOutcome};
use crate::config::parse_split_name;
use crate::error::{CliError, CliResult};
use crate::images::{read_cube, read_json, read_mask, write_json, write_text, ImageList};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifiedReports {
    pub all: MetricsReport,
    pub strong: MetricsReport,
    pub not_strong: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub model: String,
    pub split: String,
    pub threshold_ppm_m: f64,
    pub tiles: usize,
    pub segmentation: StratifiedReports,
    pub classification: StratifiedReports,
}

struct Truth {
    mask: Mask,
    enhancement: Cube,
    valid: Vec<bool>,
    cols: usize,
}

fn crop_bits(bits: &[bool], cols: usize, (r, c): (usize, usize), size: usize) -> Vec<bool> {
    (r..r + size).flat_map(|y| bits[y * cols + c..y * cols + c + size].iter().copied()).collect()
}

fn stratified(
    f: impl Fn(Stratum) -> Result<MetricsReport, plumepipe_core::error::EvalError>,
) -> CliResult<StratifiedReports> {
    Ok(StratifiedReports { all: f(Stratum::All)?, strong: f(Stratum::Strong)?, not_strong: f(Stratum::NotStrong)? })
}

/// Scores predicted masks against ground truth on the manifest's tiles.
pub fn eval(
    ctx: &Ctx,
    input: Option<&Path>,
    predictions: Option<&Path>,
    manifest: Option<&Path>,
) -> CliResult<StageOutcome> {
    let dir = ctx.dataset_dir();
    let gt_list = input.map_or_else(|| ctx.default_list(), Path::to_path_buf);
    let pred_list = predictions.map_or_else(|| dir.join("mf/images.json"), Path::to_path_buf);
    let manifest_p = manifest.map_or_else(|| dir.join("tiles/manifest.jsonl"), Path::to_path_buf);
    let mut inputs = list_inputs(&gt_list)?;
    inputs.extend(list_inputs(&pred_list)?);
    inputs.push(manifest_p.clone());
    let e = ctx.cfg.eval.clone();
    let thr = ctx.cfg.threshold_ppm_m;
    ctx.run(&ctx.stage_name("eval"), inputs, || {
        let (gl, gbase) = ImageList::load(&gt_list)?;
        let (pl, pbase) = ImageList::load(&pred_list)?;
        let mut truth = BTreeMap::new();
        for g in gl.resolved(&gbase) {
            let cube: Cube = read_cube(&g.cube)?;
            let t = Truth {
                mask: read_mask(g.require(&g.mask, "mask")?)?,
                enhancement: read_cube(g.require(&g.enhancement, "enhancement")?)?,
                valid: cube.valid_mask().to_vec(),
                cols: cube.cols(),
            };
            truth.insert(g.id.clone(), t);
        }
        let mut preds = BTreeMap::new();
        for p in pl.resolved(&pbase) {
            preds.insert(p.id.clone(), read_mask(p.require(&p.mask, "mask")?)?);
        }
        let want = if e.split == "all" { None } else { Some(parse_split_name(&e.split)?) };
        let mut tiles = Vec::new();
        for rec in read_manifest(&manifest_p)? {
            if want.is_some_and(|s| s != rec.split) {
                continue;
            }
            let missing = |what: &str| CliError::Config(format!("no {what} for image {:?}", rec.image_id));
            let t = truth.get(&rec.image_id).ok_or_else(|| missing("ground truth"))?;
            let pred = preds.get(&rec.image_id).ok_or_else(|| missing("prediction"))?;
            if pred.shape() != t.mask.shape() {
                return Err(CliError::Core(
                    plumepipe_core::error::EvalError::ShapeMismatch(format!(
                        "{}: prediction {:?} vs ground truth {:?}",
                        rec.image_id,
                        pred.shape(),
                        t.mask.shape()
                    ))
                    .into(),
                ));
            }
            let (r, c) = rec.top_left();
            let gt = t.mask.crop(r, c, rec.size, rec.size);
            let enh = t.enhancement.crop(r, c, rec.size, rec.size);
            let strong = strong_flag(max_enhancement(&gt, &enh), thr);
            tiles.push(EvalTile {
                pred: pred.crop(r, c, rec.size, rec.size),
                gt,
                valid: Some(crop_bits(&t.valid, t.cols, (r, c), rec.size)),
                strong,
            });
        }
        let report = EvalReport {
            dataset: ctx.cfg.dataset.clone(),
            model: e.model.clone(),
            split: e.split.clone(),
            threshold_ppm_m: thr,
            tiles: tiles.len(),
            segmentation: stratified(|s| pixel_metrics(&tiles, s, e.aggregation))?,
            classification: stratified(|s| tile_metrics_from_masks(&tiles, s))?,
        };
        let row = |r: &MetricsReport, t: Option<f64>| ResultRow::from_report(&report.dataset, &report.model, t, r);
        let table = ResultTable {
            rows: vec![
                row(&report.classification.all, None),
                row(&report.classification.strong, Some(thr)),
                row(&report.segmentation.all, None),
                row(&report.segmentation.strong, Some(thr)),
            ],
            comparisons: Some(Vec::new()),
        };
        let out = dir.join("eval");
        let paths = [out.join("report.json"), out.join("report.csv"), out.join("table.json")];
        write_json(&paths[0], &report)?;
        write_text(&paths[1], &table.to_csv())?;
        write_json(&paths[2], &table)?;
        Ok(paths.to_vec())
    })
}

/// Improvement arithmetic over a results table.
pub fn report(ctx: &Ctx, input: &Path) -> CliResult<StageOutcome> {
    ctx.run("report", vec![input.to_path_buf()], || {
        let table: ResultTable = read_json(input)?;
        let results = table.compare()?;
        let out = ctx.root.join("report");
        let paths: [PathBuf; 3] = [out.join("comparisons.json"), out.join("comparisons.csv"), out.join("table.csv")];
        write_json(&paths[0], &results)?;
        write_text(&paths[1], &comparisons_to_csv(&results))?;
        write_text(&paths[2], &table.to_csv())?;
        Ok(paths.to_vec())
    })
}
