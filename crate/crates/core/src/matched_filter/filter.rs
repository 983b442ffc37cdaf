use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::background::ColumnStats;
use super::linalg::cholesky_solve;
use super::signature::TargetSignature;
use crate::error::FilterError;
use crate::raster::{HyperCube, Mask};
use crate::scalar::Scalar;

/// Target vector used by the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// `q = mean ⊙ t`; alpha comes out in ppm·m.
    #[default]
    MeanScaled,
    /// `q = t`.
    Raw,
}

/// Per-group filter weights `Σ⁻¹q / (qᵀΣ⁻¹q)`.
fn weights<T: Scalar>(
    stats: &ColumnStats<T>,
    signature: &TargetSignature,
    mode: FilterMode,
) -> Result<Vec<Vec<T>>, FilterError> {
    let n = stats.bands();
    stats
        .groups
        .iter()
        .map(|g| {
            let q: Vec<T> = match mode {
                FilterMode::MeanScaled => g.mean.iter().zip(&signature.t).map(|(m, t)| *m * T::of(*t)).collect(),
                FilterMode::Raw => signature.t.iter().map(|t| T::of(*t)).collect(),
            };
            let z = cholesky_solve(&g.factor, n, &q);
            let denom: T = q.iter().zip(&z).map(|(a, b)| *a * *b).sum();
            if !(denom > T::zero()) {
                return Err(FilterError::BadSignature("target has zero energy against the background".into()));
            }
            Ok(z.into_iter().map(|v| v / denom).collect())
        })
        .collect()
}

/// Per-pixel matched-filter score `α(x) = (x−μ)ᵀΣ⁻¹q / (qᵀΣ⁻¹q)`.
///
/// Absorption lowers radiance, so a plume of `c` ppm·m injected as
/// `x = μ(1 − c·t)` scores `α = −c`. Invalid pixels are NaN.
pub fn matched_filter<T: Scalar>(
    cube: &HyperCube<T>,
    stats: &ColumnStats<T>,
    signature: &TargetSignature,
    mode: FilterMode,
) -> Result<HyperCube<T>, FilterError> {
    let bands = cube.bands();
    if stats.bands() != bands || signature.t.len() != bands {
        return Err(FilterError::ShapeMismatch(format!(
            "cube has {bands} bands, background {}, signature {}",
            stats.bands(),
            signature.t.len()
        )));
    }
    if stats.column_group.len() != cube.cols() {
        return Err(FilterError::ShapeMismatch(format!(
            "background covers {} columns, cube has {}",
            stats.column_group.len(),
            cube.cols()
        )));
    }
    let w = weights(stats, signature, mode)?;
    let cols = cube.cols();
    let mut alpha = vec![T::nan(); cube.pixel_count()];
    if cols > 0 {
        alpha.par_chunks_mut(cols).enumerate().for_each(|(r, row)| {
            for (c, out) in row.iter_mut().enumerate() {
                if !cube.is_valid(r, c) {
                    continue;
                }
                let gi = stats.column_group[c];
                let mu = &stats.groups[gi].mean;
                *out = cube
                    .pixel(r, c)
                    .iter()
                    .zip(mu)
                    .zip(&w[gi])
                    .map(|((x, m), wi)| (*x - *m) * *wi)
                    .sum();
            }
        });
    }
    Ok(HyperCube::single_band(cube.rows(), cube.cols(), alpha, cube.valid_mask().to_vec())
        .expect("alpha map shape is consistent"))
}

/// Enhancement in ppm·m (`−α`), positive over plumes.
pub fn enhancement_from_alpha<T: Scalar>(alpha: &HyperCube<T>) -> HyperCube<T> {
    let data = alpha.data().iter().map(|v| -*v).collect();
    HyperCube::single_band(alpha.rows(), alpha.cols(), data, alpha.valid_mask().to_vec())
        .expect("same shape")
}

/// `(−α ≥ threshold) ∧ valid`.
pub fn threshold_alpha<T: Scalar>(alpha: &HyperCube<T>, threshold_ppm_m: f64) -> Mask {
    let data = (0..alpha.pixel_count())
        .map(|i| alpha.valid_mask()[i] && -alpha.pixel_at(i)[0].f64() >= threshold_ppm_m)
        .collect();
    Mask::new(alpha.rows(), alpha.cols(), data).expect("same shape")
}

/// `(enhancement ≥ threshold) ∧ valid`.
pub fn threshold_enhancement<T: Scalar>(enhancement: &HyperCube<T>, threshold_ppm_m: f64) -> Mask {
    let data = (0..enhancement.pixel_count())
        .map(|i| enhancement.valid_mask()[i] && enhancement.pixel_at(i)[0].f64() >= threshold_ppm_m)
        .collect();
    Mask::new(enhancement.rows(), enhancement.cols(), data).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matched_filter::{estimate_background, Grouping};

    fn unit_stats(mean: Vec<f64>, cols: usize) -> ColumnStats<f64> {
        let n = mean.len();
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            cov[i * n + i] = 1.0;
        }
        ColumnStats::from_known(&mean, &cov, cols, 0.0).unwrap()
    }

    #[test]
    fn hand_case() {
        let stats = unit_stats(vec![1.0, 1.0], 1);
        let sig = TargetSignature::new(vec![1.0, 2.0], vec![1.0, 0.0], "t").unwrap();
        let cube = HyperCube::from_data(1, 1, vec![1.0, 2.0], vec![3.0, 1.0]).unwrap();
        let a = matched_filter(&cube, &stats, &sig, FilterMode::MeanScaled).unwrap();
        assert_eq!(a.data(), &[2.0]);
    }

    #[test]
    fn mean_pixel_scores_zero() {
        let stats = unit_stats(vec![4.0, 5.0, 6.0], 3);
        let sig = TargetSignature::new(vec![1.0, 2.0, 3.0], vec![0.3, 0.1, 0.2], "t").unwrap();
        let cube = HyperCube::from_data(2, 3, vec![1.0, 2.0, 3.0], [4.0, 5.0, 6.0].repeat(6)).unwrap();
        for mode in [FilterMode::MeanScaled, FilterMode::Raw] {
            let a = matched_filter(&cube, &stats, &sig, mode).unwrap();
            assert!(a.data().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn invalid_pixels_stay_fill_and_shapes_checked() {
        let stats = unit_stats(vec![1.0, 1.0], 2);
        let sig = TargetSignature::new(vec![1.0, 2.0], vec![1.0, 0.0], "t").unwrap();
        let cube = HyperCube::new(1, 2, vec![1.0, 2.0], vec![1.0, 1.0, 1.0, 1.0], vec![true, false]).unwrap();
        let a = matched_filter(&cube, &stats, &sig, FilterMode::Raw).unwrap();
        assert!(a.data()[1].is_nan() && !a.valid_mask()[1]);
        let narrow = unit_stats(vec![1.0, 1.0], 1);
        assert!(matches!(
            matched_filter(&cube, &narrow, &sig, FilterMode::Raw),
            Err(FilterError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn thresholds() {
        let alpha = HyperCube::<f32>::new(1, 3, vec![0.0], vec![-10.0, -1.0, -5.0], vec![true, true, false]).unwrap();
        assert_eq!(threshold_alpha(&alpha, 0.0).data(), &[true, true, false]);
        assert_eq!(threshold_alpha(&alpha, f64::INFINITY).data(), &[false, false, false]);
        assert_eq!(threshold_alpha(&alpha, 5.0).data(), &[true, false, false]);
        let enh = enhancement_from_alpha(&alpha);
        assert_eq!(threshold_enhancement(&enh, 5.0), threshold_alpha(&alpha, 5.0));
    }

    fn noisy_cube(scale: f64, shift: f64) -> HyperCube<f64> {
        let mut rng = crate::rng::SeededRng::new(8);
        let data: Vec<f64> = (0..40 * 3 * 4)
            .map(|i| (10.0 + (i % 4) as f64 + rng.normal()) * scale + shift)
            .collect();
        HyperCube::from_data(40, 3, vec![1.0, 2.0, 3.0, 4.0], data).unwrap()
    }

    #[test]
    fn shift_and_scale_behaviour() {
        let sig = TargetSignature::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.1, 0.4, 0.2, 0.3], "t").unwrap();
        let run = |cube: &HyperCube<f64>, mode| {
            let stats = estimate_background(cube, Grouping::PerColumn, 1e-4).unwrap();
            matched_filter(cube, &stats, &sig, mode).unwrap()
        };
        let base = noisy_cube(1.0, 0.0);
        // raw mode: constant offset is invisible, scaling by k scales alpha by k
        let shifted = run(&noisy_cube(1.0, 3.5), FilterMode::Raw);
        let scaled_raw = run(&noisy_cube(2.5, 0.0), FilterMode::Raw);
        let scaled_ms = run(&noisy_cube(2.5, 0.0), FilterMode::MeanScaled);
        let raw = run(&base, FilterMode::Raw);
        let ms = run(&base, FilterMode::MeanScaled);
        for i in 0..raw.data().len() {
            let r = raw.data()[i];
            let tol = 1e-6 * r.abs().max(1e-3);
            assert!((shifted.data()[i] - r).abs() <= tol);
            assert!((scaled_raw.data()[i] - 2.5 * r).abs() <= 2.5 * tol);
            assert!((scaled_ms.data()[i] - ms.data()[i]).abs() <= 1e-6 * ms.data()[i].abs().max(1e-3));
        }
    }
}
