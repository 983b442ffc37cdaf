use std::path::{Path, PathBuf};

use plumepipe_core::geometry::{orthorectify, unorthorectify};
use plumepipe_core::{Cube, Mask};
use rayon::prelude::*;

use super::{list_inputs, Ctx, StageOutcome};
use crate::error::CliResult;
use crate::images::{create_dir, read_cube, read_glt, write_cube, write_mask, ImageEntry, ImageList};

fn raw_list(ctx: &Ctx, input: Option<&Path>) -> PathBuf {
    input.map_or_else(|| ctx.root.join("synth/images.json"), Path::to_path_buf)
}

fn collect(results: Vec<CliResult<(ImageEntry, Vec<PathBuf>)>>, list_path: &Path) -> CliResult<Vec<PathBuf>> {
    let mut list = ImageList::default();
    let mut outputs = Vec::new();
    for r in results {
        let (entry, files) = r?;
        list.images.push(entry);
        outputs.extend(files);
    }
    list.save(list_path)?;
    outputs.push(list_path.to_path_buf());
    Ok(outputs)
}

/// Orthorectifies each cube; annotations are already in the ortho plane.
pub fn ortho(ctx: &Ctx, input: Option<&Path>) -> CliResult<StageOutcome> {
    let list_path = raw_list(ctx, input);
    ctx.run("ortho", list_inputs(&list_path)?, || {
        let (list, base) = ImageList::load(&list_path)?;
        let dir = ctx.root.join("ortho");
        create_dir(&dir)?;
        let results = list
            .resolved(&base)
            .into_par_iter()
            .map(|e| {
                let glt = read_glt(e.require(&e.glt, "glt")?)?;
                let cube: Cube = read_cube(&e.cube)?;
                let out = dir.join(format!("{}.cube.hsc", e.id));
                write_cube(&out, &orthorectify(&cube, &glt)?, Some("radiance"))?;
                Ok((ImageEntry { cube: out.clone(), ..e }, vec![out]))
            })
            .collect();
        collect(results, &dir.join("images.json"))
    })
}

/// Maps ortho-plane annotations back to the sensor plane; the sensor-plane
/// cube is used as is unless `resample_cube` is set.
pub fn unortho(ctx: &Ctx, input: Option<&Path>) -> CliResult<StageOutcome> {
    let list_path = raw_list(ctx, input);
    let u = ctx.cfg.unortho.clone();
    ctx.run("unortho", list_inputs(&list_path)?, || {
        let (list, base) = ImageList::load(&list_path)?;
        let dir = ctx.root.join("unortho");
        create_dir(&dir)?;
        let results = list
            .resolved(&base)
            .into_par_iter()
            .map(|e| {
                let glt = read_glt(e.require(&e.glt, "glt")?)?;
                let mut entry = e.clone();
                let mut files = Vec::new();
                if let Some(mask_path) = &e.mask {
                    let ortho: Cube = read_cube(mask_path)?;
                    let cube = unorthorectify(&ortho, &glt, u.mask_rule, u.margin)?;
                    let out = dir.join(format!("{}.mask.hsc", e.id));
                    write_mask(&out, &Mask::from_cube(&cube))?;
                    entry.mask = Some(out.clone());
                    files.push(out);
                }
                if let Some(enh_path) = &e.enhancement {
                    let ortho: Cube = read_cube(enh_path)?;
                    let out = dir.join(format!("{}.enh.hsc", e.id));
                    write_cube(&out, &unorthorectify(&ortho, &glt, u.enhancement_rule, u.margin)?, Some("ppm_m"))?;
                    entry.enhancement = Some(out.clone());
                    files.push(out);
                }
                if u.resample_cube {
                    let ortho: Cube = read_cube(&e.cube)?;
                    let out = dir.join(format!("{}.cube.hsc", e.id));
                    write_cube(&out, &unorthorectify(&ortho, &glt, u.cube_rule, u.margin)?, Some("radiance"))?;
                    entry.cube = out.clone();
                    files.push(out);
                }
                Ok((entry, files))
            })
            .collect();
        collect(results, &dir.join("images.json"))
    })
}
