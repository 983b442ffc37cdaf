use std::path::{Path, PathBuf};

use log::info;
use plumepipe_core::matched_filter::{
    enhancement_from_alpha, estimate_background, matched_filter, threshold_alpha, TargetSignature,
};
use plumepipe_core::Cube64;

use super::{list_inputs, Ctx, StageOutcome};
use crate::error::{CliError, CliResult};
use crate::images::{create_dir, read_cube, write_cube, write_mask, ImageEntry, ImageList};

/// Configured signature file, then the synth signature, then built-in lines.
fn signature_source(ctx: &Ctx, flag: Option<&Path>) -> Option<PathBuf> {
    let synth = ctx.root.join("synth/signature.txt");
    flag.map(Path::to_path_buf)
        .or_else(|| ctx.cfg.mf.signature.clone())
        .or_else(|| synth.exists().then_some(synth))
}

fn signature_for(source: Option<&Path>, wavelengths_nm: &[f64]) -> CliResult<TargetSignature> {
    let sig = match source {
        Some(p) => TargetSignature::load(p).map_err(|e| match e {
            plumepipe_core::error::FormatError::Io(io) => CliError::io(p, io),
            other => CliError::Core(other.into()),
        })?,
        None => TargetSignature::synthetic_methane(wavelengths_nm)?,
    };
    Ok(sig.resample(wavelengths_nm)?)
}

/// Writes per image an enhancement map (ppm·m) and its thresholded mask.
pub fn mf(ctx: &Ctx, input: Option<&Path>, signature: Option<&Path>) -> CliResult<StageOutcome> {
    let list = input.map_or_else(|| ctx.default_list(), Path::to_path_buf);
    let sig_path = signature_source(ctx, signature);
    let mut inputs = list_inputs(&list)?;
    inputs.extend(sig_path.clone());
    let m = ctx.cfg.mf.clone();
    ctx.run(&ctx.stage_name("mf"), inputs, || {
        let (l, base) = ImageList::load(&list)?;
        let dir = ctx.dataset_dir().join("mf");
        create_dir(&dir)?;
        let mut images = Vec::new();
        let mut outputs = Vec::new();
        // images run one at a time; each filter call is parallel internally
        for e in l.resolved(&base) {
            let cube: Cube64 = read_cube(&e.cube)?;
            let sig = signature_for(sig_path.as_deref(), cube.wavelengths_nm())?;
            let stats = estimate_background(&cube, m.grouping, m.loading)?;
            let alpha = matched_filter(&cube, &stats, &sig, m.mode)?;
            let enh = enhancement_from_alpha(&alpha).cast::<f32>();
            let mask = threshold_alpha(&alpha, m.mask_threshold_ppm_m);
            info!("{}: {} of {} pixels above {} ppm·m", e.id, mask.count(), mask.data().len(), m.mask_threshold_ppm_m);
            let enh_path = dir.join(format!("{}.enh.hsc", e.id));
            let mask_path = dir.join(format!("{}.mask.hsc", e.id));
            write_cube(&enh_path, &enh, Some("ppm_m"))?;
            write_mask(&mask_path, &mask)?;
            outputs.extend([enh_path.clone(), mask_path.clone()]);
            images.push(ImageEntry { id: e.id, cube: e.cube, glt: None, mask: Some(mask_path), enhancement: Some(enh_path) });
        }
        let out_list = dir.join("images.json");
        ImageList { images }.save(&out_list)?;
        outputs.push(out_list);
        Ok(outputs)
    })
}
