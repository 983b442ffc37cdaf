use plumepipe_core::geometry::{orthorectify, orthorectify_mask};
use plumepipe_core::synth::{gen_glt, gen_scene, Plume, SceneSpec};
use plumepipe_core::{io::save_glt, SeededRng};
use rayon::prelude::*;

use super::{Ctx, StageOutcome};
use crate::error::{CliError, CliResult};
use crate::images::{write_cube, write_mask, write_text, ImageEntry, ImageList};

/// Scene spec of image `index`: the template with a derived seed and, when
/// the template has none, randomly placed plumes.
pub fn image_spec(ctx: &Ctx, index: usize) -> SceneSpec {
    let s = &ctx.cfg.synth;
    let mut spec = s.scene.clone();
    let mut rng = SeededRng::derive(ctx.cfg.seed, index as u64);
    spec.seed = rng.next_u64();
    if spec.plumes.is_empty() {
        spec.plumes = (0..s.plumes_per_image)
            .map(|_| Plume {
                center_row: rng.uniform(0.15, 0.85) * spec.rows as f64,
                center_col: rng.uniform(0.15, 0.85) * spec.cols as f64,
                sigma_px: rng.uniform(s.sigma_px.0, s.sigma_px.1),
                peak_ppm_m: rng.uniform(s.peak_ppm_m.0, s.peak_ppm_m.1),
            })
            .collect();
    }
    spec
}

/// Writes `synth/`: per image a sensor-plane cube, its GLT, sensor-plane
/// truth, and ortho-plane annotations; `images.json` lists the cube with
/// the ortho annotations and `truth.json` the sensor-plane truth.
pub fn synth(ctx: &Ctx) -> CliResult<StageOutcome> {
    ctx.run("synth", Vec::new(), || {
        let dir = ctx.root.join("synth");
        crate::images::create_dir(&dir)?;
        let ids: Vec<String> = (0..ctx.cfg.synth.count).map(|i| format!("img{i:03}")).collect();
        let results: Vec<CliResult<(ImageEntry, ImageEntry, String)>> = ids
            .par_iter()
            .enumerate()
            .map(|(i, id)| {
                let spec = image_spec(ctx, i);
                let scene = gen_scene::<f32>(&spec)?;
                let glt = gen_glt(spec.rows, spec.cols, &spec.distortion)?;
                let ortho_mask = orthorectify_mask(&scene.mask, &glt)?;
                let ortho_enh = orthorectify(&scene.enhancement, &glt)?;
                let p = |suffix: &str| dir.join(format!("{id}.{suffix}"));
                write_cube(&p("cube.hsc"), &scene.cube, Some("radiance"))?;
                save_glt(&p("glt"), &glt).map_err(|e| CliError::Core(e.into()))?;
                write_mask(&p("truth.mask.hsc"), &scene.mask)?;
                write_cube(&p("truth.enh.hsc"), &scene.enhancement, Some("ppm_m"))?;
                write_mask(&p("ortho.mask.hsc"), &ortho_mask)?;
                write_cube(&p("ortho.enh.hsc"), &ortho_enh, Some("ppm_m"))?;
                let raw = ImageEntry {
                    id: id.clone(),
                    cube: p("cube.hsc"),
                    glt: Some(p("glt")),
                    mask: Some(p("ortho.mask.hsc")),
                    enhancement: Some(p("ortho.enh.hsc")),
                };
                let truth = ImageEntry {
                    glt: None,
                    mask: Some(p("truth.mask.hsc")),
                    enhancement: Some(p("truth.enh.hsc")),
                    ..raw.clone()
                };
                Ok((raw, truth, scene.signature.to_text()))
            })
            .collect();
        let mut raw = ImageList::default();
        let mut truth = ImageList::default();
        let mut signature = None;
        for r in results {
            let (a, b, sig) = r?;
            raw.images.push(a);
            truth.images.push(b);
            signature.get_or_insert(sig);
        }
        let mut outputs: Vec<_> = raw.images.iter().chain(&truth.images).flat_map(|e| e.files()).map(|p| p.to_path_buf()).collect();
        outputs.sort();
        outputs.dedup();
        raw.save(&dir.join("images.json"))?;
        truth.save(&dir.join("truth.json"))?;
        outputs.extend([dir.join("images.json"), dir.join("truth.json")]);
        if let Some(sig) = signature {
            write_text(&dir.join("signature.txt"), &sig)?;
            outputs.push(dir.join("signature.txt"));
        }
        Ok(outputs)
    })
}
