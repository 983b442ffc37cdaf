use serde::{Deserialize, Serialize};

use super::glt::Distortion;
use crate::error::{FilterError, SynthError};
use crate::matched_filter::linalg::psd_factor;
use crate::matched_filter::TargetSignature;
use crate::raster::{HyperCube, Mask};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plume {
    pub center_row: f64,
    pub center_col: f64,
    pub sigma_px: f64,
    pub peak_ppm_m: f64,
}

/// How absorption is applied to the background radiance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Injection {
    /// `L = L0 * (1 - c t)`
    #[default]
    Linear,
    /// `L = L0 * exp(-c t)`
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    /// Band centers; evenly spaced over `wavelength_range_nm` when empty.
    pub wavelengths_nm: Vec<f64>,
    pub wavelength_range_nm: (f64, f64),
    /// Background mean spectrum; a smooth default when empty.
    pub background_mean: Vec<f64>,
    /// Row-major `bands x bands` background covariance; when empty, an AR(1)
    /// model with standard deviation `noise_fraction * mean` and
    /// correlation `band_correlation^|i-j|`.
    pub background_cov: Vec<f64>,
    pub noise_fraction: f64,
    pub band_correlation: f64,
    pub plumes: Vec<Plume>,
    pub distortion: Distortion,
    pub injection: Injection,
    /// Ground-truth mask is `c >= mask_threshold_ppm_m`.
    pub mask_threshold_ppm_m: f64,
    /// Absorption lines `(center_nm, fwhm_nm, peak per ppm·m)`; the built-in
    /// methane lines when empty.
    pub signature_lines: Vec<(f64, f64, f64)>,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            rows: 256,
            cols: 256,
            bands: 32,
            wavelengths_nm: Vec::new(),
            wavelength_range_nm: (2100.0, 2450.0),
            background_mean: Vec::new(),
            background_cov: Vec::new(),
            noise_fraction: 0.002,
            band_correlation: 0.5,
            plumes: Vec::new(),
            distortion: Distortion::default(),
            injection: Injection::Linear,
            mask_threshold_ppm_m: 500.0,
            signature_lines: Vec::new(),
            seed: 0,
        }
    }
}

impl SceneSpec {
    pub fn wavelengths(&self) -> Vec<f64> {
        if !self.wavelengths_nm.is_empty() {
            return self.wavelengths_nm.clone();
        }
        let (lo, hi) = self.wavelength_range_nm;
        if self.bands == 1 {
            return vec![lo];
        }
        (0..self.bands)
            .map(|i| lo + (hi - lo) * i as f64 / (self.bands - 1) as f64)
            .collect()
    }

    /// Resolved `(mean, covariance)` of the background.
    pub fn background(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.bands;
        let mean = if self.background_mean.is_empty() {
            (0..n)
                .map(|i| 100.0 + 25.0 * (i as f64 * 0.35).sin() + 0.5 * i as f64)
                .collect()
        } else {
            self.background_mean.clone()
        };
        let cov = if self.background_cov.is_empty() {
            let sd: Vec<f64> = mean.iter().map(|m| self.noise_fraction * m).collect();
            let mut c = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    c[i * n + j] = sd[i] * sd[j] * self.band_correlation.powi((i as i32 - j as i32).abs());
                }
            }
            c
        } else {
            self.background_cov.clone()
        };
        (mean, cov)
    }

    pub fn signature(&self) -> Result<TargetSignature, FilterError> {
        let w = self.wavelengths();
        if self.signature_lines.is_empty() {
            TargetSignature::synthetic_methane(&w)
        } else {
            TargetSignature::synthetic(&w, &self.signature_lines)
        }
    }

    /// Concentration field in ppm·m at a pixel center.
    pub fn concentration(&self, row: usize, col: usize) -> f64 {
        self.plumes
            .iter()
            .map(|p| {
                let dr = row as f64 - p.center_row;
                let dc = col as f64 - p.center_col;
                p.peak_ppm_m * (-(dr * dr + dc * dc) / (2.0 * p.sigma_px * p.sigma_px)).exp()
            })
            .sum()
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.rows == 0 || self.cols == 0 || self.bands == 0 {
            return Err(SynthError::InvalidSpec("rows, cols and bands must be positive".into()));
        }
        if !self.wavelengths_nm.is_empty() && self.wavelengths_nm.len() != self.bands {
            return Err(SynthError::InvalidSpec("wavelength count != bands".into()));
        }
        if !self.background_mean.is_empty() && self.background_mean.len() != self.bands {
            return Err(SynthError::InvalidSpec("background mean length != bands".into()));
        }
        if !self.background_cov.is_empty() && self.background_cov.len() != self.bands * self.bands {
            return Err(SynthError::InvalidSpec("background covariance is not bands x bands".into()));
        }
        for p in &self.plumes {
            if !(p.sigma_px > 0.0) || !(p.peak_ppm_m >= 0.0) {
                return Err(SynthError::InvalidSpec("plume needs sigma > 0 and peak >= 0".into()));
            }
        }
        Ok(())
    }
}

/// A generated scene: radiance, concentration (ppm·m), truth mask and the
/// signature used for injection.
#[derive(Debug, Clone)]
pub struct Scene<T> {
    pub cube: HyperCube<T>,
    pub enhancement: HyperCube<T>,
    pub mask: Mask,
    pub signature: TargetSignature,
}

pub fn gen_scene<T: Scalar>(spec: &SceneSpec) -> Result<Scene<T>, SynthError> {
    spec.validate()?;
    let n = spec.bands;
    let (mean, cov) = spec.background();
    let symmetric = (0..n).all(|i| (0..i).all(|j| (cov[i * n + j] - cov[j * n + i]).abs() <= 1e-12 * (1.0 + cov[i * n + j].abs())));
    if !symmetric || cov.iter().any(|v| !v.is_finite()) {
        return Err(SynthError::InvalidCovariance);
    }
    let factor = psd_factor(&cov, n, 1e-12).ok_or(SynthError::InvalidCovariance)?;
    let signature = spec.signature().map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let wavelengths = spec.wavelengths();

    let mut rng = SeededRng::new(spec.seed);
    let pixels = spec.rows * spec.cols;
    let mut data = Vec::with_capacity(pixels * n);
    let mut conc = Vec::with_capacity(pixels);
    let mut z = vec![0.0; n];
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            z.iter_mut().for_each(|v| *v = rng.normal());
            let cppm = spec.concentration(r, c);
            for b in 0..n {
                let noise: f64 = (0..=b).map(|k| factor[b * n + k] * z[k]).sum();
                let l0 = mean[b] + noise;
                let a = cppm * signature.t[b];
                let l = match spec.injection {
                    Injection::Linear => l0 * (1.0 - a),
                    Injection::Exponential => l0 * (-a).exp(),
                };
                data.push(T::of(l));
            }
            conc.push(cppm);
        }
    }
    let mask = Mask::new(
        spec.rows,
        spec.cols,
        conc.iter().map(|c| *c >= spec.mask_threshold_ppm_m && *c > 0.0).collect(),
    )
    .expect("shape");
    let cube = HyperCube::from_data(spec.rows, spec.cols, wavelengths, data)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let enhancement = HyperCube::single_band(
        spec.rows,
        spec.cols,
        conc.into_iter().map(T::of).collect(),
        vec![true; pixels],
    )
    .expect("shape");
    Ok(Scene {
        cube,
        enhancement,
        mask,
        signature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(plumes: Vec<Plume>) -> SceneSpec {
        SceneSpec {
            rows: 24,
            cols: 20,
            bands: 6,
            plumes,
            seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn no_plumes_is_background() {
        let s = gen_scene::<f32>(&small(vec![])).unwrap();
        assert!(!s.mask.any());
        assert!(s.enhancement.data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn plume_peak_at_center() {
        let spec = small(vec![Plume {
            center_row: 10.0,
            center_col: 7.0,
            sigma_px: 5.0,
            peak_ppm_m: 1500.0,
        }]);
        let s = gen_scene::<f64>(&spec).unwrap();
        let max = s.enhancement.data().iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - 1500.0).abs() <= 1e-3);
        assert_eq!(s.enhancement.pixel(10, 7)[0], max);
        assert!(s.mask.get(10, 7));
    }

    #[test]
    fn deterministic() {
        let spec = small(vec![Plume {
            center_row: 3.0,
            center_col: 3.0,
            sigma_px: 2.0,
            peak_ppm_m: 800.0,
        }]);
        let a = gen_scene::<f32>(&spec).unwrap();
        let b = gen_scene::<f32>(&spec).unwrap();
        assert_eq!(
            a.cube.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.cube.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn linear_and_exponential_agree_to_first_order() {
        // keep peak * max(t) <= 0.01
        let base = small(vec![]);
        let tmax = base.signature().unwrap().t.iter().cloned().fold(0.0, f64::max);
        let plume = Plume {
            center_row: 12.0,
            center_col: 10.0,
            sigma_px: 4.0,
            peak_ppm_m: 0.01 / tmax,
        };
        let lin = gen_scene::<f64>(&SceneSpec {
            plumes: vec![plume.clone()],
            ..base.clone()
        })
        .unwrap();
        let exp = gen_scene::<f64>(&SceneSpec {
            plumes: vec![plume],
            injection: Injection::Exponential,
            ..base
        })
        .unwrap();
        for (a, b) in lin.cube.data().iter().zip(exp.cube.data()) {
            assert!((a - b).abs() <= 1e-4 * b.abs());
        }
    }

    #[test]
    fn rejects_bad_covariance() {
        let spec = SceneSpec {
            bands: 2,
            background_cov: vec![1.0, 2.0, 0.0, 1.0],
            ..small(vec![])
        };
        assert!(matches!(gen_scene::<f32>(&spec), Err(SynthError::InvalidCovariance)));
        let spec = SceneSpec {
            bands: 2,
            background_cov: vec![1.0, 0.0, 0.0, -1.0],
            ..small(vec![])
        };
        assert!(matches!(gen_scene::<f32>(&spec), Err(SynthError::InvalidCovariance)));
    }
}
