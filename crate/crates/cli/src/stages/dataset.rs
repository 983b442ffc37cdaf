use std::path::{Path, PathBuf};

use log::info;
use plumepipe_core::dataset::{
    jitter_tiles, split_images, tile_raster, write_manifest, write_tile_shards, Split, SplitManifest, Tile,
    TileParams, TileRecord, TileSource,
};
use plumepipe_core::raster::{band_stats, normalize as normalize_cube, select_bands, BandStats};
use plumepipe_core::{Cube, Mask};
use rayon::prelude::*;

use super::{list_inputs, Ctx, StageOutcome};
use crate::config::parse_split_name;
use crate::error::{CliError, CliResult};
use crate::images::{create_dir, read_cube, read_json, read_mask, write_cube, write_json, ImageEntry, ImageList};

fn list_path(ctx: &Ctx, input: Option<&Path>) -> PathBuf {
    input.map_or_else(|| ctx.default_list(), Path::to_path_buf)
}

fn split_path(ctx: &Ctx, split_file: Option<&Path>) -> PathBuf {
    split_file.map_or_else(|| ctx.dataset_dir().join("split.json"), Path::to_path_buf)
}

fn compute_split(ctx: &Ctx, entries: &[ImageEntry]) -> CliResult<SplitManifest> {
    let ids: Vec<String> = entries.iter().map(|e| e.id.clone()).collect();
    let s = &ctx.cfg.split;
    Ok(split_images(&ids, ctx.cfg.seed, s.fractions, s.mode)?)
}

/// The split file if present, else the split the `split` stage would write.
fn load_split(ctx: &Ctx, path: &Path, entries: &[ImageEntry]) -> CliResult<SplitManifest> {
    if path.exists() {
        read_json(path)
    } else {
        info!("{} not found; computing the split from the config", path.display());
        compute_split(ctx, entries)
    }
}

fn split_of(m: &SplitManifest, id: &str) -> CliResult<Split> {
    m.split_of(id)
        .ok_or_else(|| CliError::Core(plumepipe_core::error::DatasetError::UnknownImage(id.into()).into()))
}

fn with_optional(mut inputs: Vec<PathBuf>, extra: &Path) -> Vec<PathBuf> {
    if extra.exists() {
        inputs.push(extra.to_path_buf());
    }
    inputs
}

fn tile_params(ctx: &Ctx) -> TileParams {
    let t = &ctx.cfg.tile;
    TileParams {
        size: t.size,
        stride: t.stride.unwrap_or(t.size),
        min_valid_frac: t.min_valid_frac,
        strong_threshold_ppm_m: ctx.cfg.threshold_ppm_m,
    }
}

pub fn bands(ctx: &Ctx, input: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    ctx.run(&ctx.stage_name("bands"), list_inputs(&list)?, || {
        ctx.cfg.bands.validate()?;
        let (l, base) = ImageList::load(&list)?;
        let dir = ctx.dataset_dir().join("bands");
        create_dir(&dir)?;
        let entries = l.resolved(&base);
        let results: Vec<CliResult<ImageEntry>> = entries
            .into_par_iter()
            .map(|e| {
                let cube: Cube = read_cube(&e.cube)?;
                let out = dir.join(format!("{}.cube.hsc", e.id));
                write_cube(&out, &select_bands(&cube, &ctx.cfg.bands)?, Some("radiance"))?;
                Ok(ImageEntry { cube: out, ..e })
            })
            .collect();
        let images = results.into_iter().collect::<CliResult<Vec<_>>>()?;
        let mut outputs: Vec<PathBuf> = images.iter().map(|e| e.cube.clone()).collect();
        let out_list = dir.join("images.json");
        ImageList { images }.save(&out_list)?;
        outputs.push(out_list);
        Ok(outputs)
    })
}

pub fn split(ctx: &Ctx, input: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    ctx.run(&ctx.stage_name("split"), vec![list.clone()], || {
        let (l, base) = ImageList::load(&list)?;
        let manifest = compute_split(ctx, &l.resolved(&base))?;
        let out = ctx.dataset_dir().join("split.json");
        write_json(&out, &manifest)?;
        Ok(vec![out])
    })
}

struct Loaded {
    id: String,
    cube: Cube,
    mask: Mask,
    enhancement: Cube,
}

fn load_sources(entries: &[ImageEntry]) -> CliResult<Vec<Loaded>> {
    entries
        .par_iter()
        .map(|e| {
            Ok(Loaded {
                id: e.id.clone(),
                cube: read_cube(&e.cube)?,
                mask: read_mask(e.require(&e.mask, "mask")?)?,
                enhancement: read_cube(e.require(&e.enhancement, "enhancement")?)?,
            })
        })
        .collect()
}

fn sources(loaded: &[Loaded]) -> Vec<TileSource<'_, f32>> {
    loaded
        .iter()
        .map(|l| TileSource { image_id: &l.id, cube: &l.cube, mask: &l.mask, enhancement: &l.enhancement })
        .collect()
}

fn grid_tiles(srcs: &[TileSource<'_, f32>], params: &TileParams) -> CliResult<Vec<Tile<f32>>> {
    let per_image: Vec<_> = srcs.par_iter().map(|s| tile_raster(s, params)).collect();
    let mut tiles = Vec::new();
    for t in per_image {
        tiles.extend(t?);
    }
    Ok(tiles)
}

/// Writes shards and the manifest; records are grouped by image in list order.
fn write_tiles(
    dir: &Path,
    loaded: &[Loaded],
    tiles: &[Tile<f32>],
    split: &SplitManifest,
) -> CliResult<Vec<PathBuf>> {
    let mut records: Vec<TileRecord> = Vec::new();
    let mut outputs = Vec::new();
    for l in loaded {
        let mine: Vec<&Tile<f32>> = tiles.iter().filter(|t| t.image_id == l.id).collect();
        if mine.is_empty() {
            continue;
        }
        let recs = write_tile_shards(dir, "shards", &l.id, split_of(split, &l.id)?, &mine)?;
        outputs.push(dir.join(&recs[0].cube_path));
        outputs.push(dir.join(&recs[0].mask_path));
        records.extend(recs);
    }
    let manifest = dir.join("manifest.jsonl");
    write_manifest(&manifest, &records)?;
    outputs.push(manifest);
    Ok(outputs)
}

pub fn tile(ctx: &Ctx, input: Option<&Path>, split_file: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    let split_p = split_path(ctx, split_file);
    ctx.run(&ctx.stage_name("tile"), with_optional(list_inputs(&list)?, &split_p), || {
        let (l, base) = ImageList::load(&list)?;
        let entries = l.resolved(&base);
        let split = load_split(ctx, &split_p, &entries)?;
        let loaded = load_sources(&entries)?;
        let srcs = sources(&loaded);
        let tiles = grid_tiles(&srcs, &tile_params(ctx))?;
        info!("{} tiles from {} images", tiles.len(), loaded.len());
        write_tiles(&ctx.dataset_dir().join("tiles"), &loaded, &tiles, &split)
    })
}

/// Grid tiles plus jittered re-crops of the tiles in the configured splits.
pub fn jitter(ctx: &Ctx, input: Option<&Path>, split_file: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    let split_p = split_path(ctx, split_file);
    ctx.run(&ctx.stage_name("jitter"), with_optional(list_inputs(&list)?, &split_p), || {
        let (l, base) = ImageList::load(&list)?;
        let entries = l.resolved(&base);
        let split = load_split(ctx, &split_p, &entries)?;
        let augmented: Vec<Split> =
            ctx.cfg.jitter.splits.iter().map(|s| parse_split_name(s)).collect::<CliResult<_>>()?;
        let loaded = load_sources(&entries)?;
        let srcs = sources(&loaded);
        let params = tile_params(ctx);
        let grid = grid_tiles(&srcs, &params)?;
        let mut eligible = Vec::new();
        let mut fixed = Vec::new();
        for t in grid {
            if augmented.contains(&split_of(&split, &t.image_id)?) {
                eligible.push(t);
            } else {
                fixed.push(t);
            }
        }
        let mut tiles = jitter_tiles(&eligible, &srcs, &ctx.cfg.jitter.spec, &params, ctx.cfg.seed)?;
        info!("{} grid tiles eligible, {} after jitter", eligible.len(), tiles.len());
        tiles.extend(fixed);
        write_tiles(&ctx.dataset_dir().join("jitter"), &loaded, &tiles, &split)
    })
}

pub fn stats(ctx: &Ctx, input: Option<&Path>, split_file: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    let split_p = split_path(ctx, split_file);
    ctx.run(&ctx.stage_name("stats"), with_optional(list_inputs(&list)?, &split_p), || {
        let (l, base) = ImageList::load(&list)?;
        let entries = l.resolved(&base);
        let split = load_split(ctx, &split_p, &entries)?;
        let wanted: Vec<Split> =
            ctx.cfg.normalize.stats_splits.iter().map(|s| parse_split_name(s)).collect::<CliResult<_>>()?;
        let mut selected = Vec::new();
        for e in &entries {
            if wanted.contains(&split_of(&split, &e.id)?) {
                selected.push(e);
            }
        }
        let cubes: Vec<Cube> = selected.par_iter().map(|e| read_cube(&e.cube)).collect::<CliResult<_>>()?;
        let stats = band_stats(&cubes)?;
        let out = ctx.dataset_dir().join("stats.json");
        write_json(&out, &stats)?;
        Ok(vec![out])
    })
}

pub fn normalize(ctx: &Ctx, input: Option<&Path>, stats_file: Option<&Path>) -> CliResult<StageOutcome> {
    let list = list_path(ctx, input);
    let stats_p = stats_file.map_or_else(|| ctx.dataset_dir().join("stats.json"), Path::to_path_buf);
    let mut inputs = list_inputs(&list)?;
    inputs.push(stats_p.clone());
    ctx.run(&ctx.stage_name("normalize"), inputs, || {
        let stats: BandStats = read_json(&stats_p)?;
        let (l, base) = ImageList::load(&list)?;
        let dir = ctx.dataset_dir().join("normalized");
        create_dir(&dir)?;
        let images: Vec<ImageEntry> = l
            .resolved(&base)
            .into_par_iter()
            .map(|e| {
                let cube: Cube = read_cube(&e.cube)?;
                let out = dir.join(format!("{}.cube.hsc", e.id));
                write_cube(&out, &normalize_cube(&cube, &stats, ctx.cfg.normalize.eps)?, None)?;
                Ok(ImageEntry { cube: out, ..e })
            })
            .collect::<CliResult<_>>()?;
        let mut outputs: Vec<PathBuf> = images.iter().map(|e| e.cube.clone()).collect();
        let out_list = dir.join("images.json");
        ImageList { images }.save(&out_list)?;
        outputs.push(out_list);
        Ok(outputs)
    })
}
