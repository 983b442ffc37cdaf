use serde::{Deserialize, Serialize};

use super::HyperCube;
use crate::error::RasterError;
use crate::scalar::Scalar;

pub const DEFAULT_NORM_EPS: f64 = 1e-6;

/// Per-band mean and population standard deviation over valid pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub pixel_count: usize,
}

impl BandStats {
    pub fn bands(&self) -> usize {
        self.mean.len()
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Two-pass mean/std over the valid pixels of all `cubes` (divisor N).
pub fn band_stats<'a, T, I>(cubes: I) -> Result<BandStats, RasterError>
where
    T: Scalar,
    I: IntoIterator<Item = &'a HyperCube<T>>,
{
    let cubes: Vec<&HyperCube<T>> = cubes.into_iter().collect();
    let first = cubes.first().ok_or(RasterError::NoValidPixels)?;
    let bands = first.bands();
    if cubes.iter().any(|c| c.wavelengths_nm() != first.wavelengths_nm()) {
        return Err(RasterError::WavelengthMismatch);
    }

    let mut sums = vec![CompensatedSum::default(); bands];
    let mut n = 0usize;
    for cube in &cubes {
        for (_, px) in cube.valid_pixels() {
            for (s, v) in sums.iter_mut().zip(px) {
                s.add(v.f64());
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(RasterError::NoValidPixels);
    }
    let mean: Vec<f64> = sums.iter().map(|s| s.value() / n as f64).collect();

    let mut sq = vec![CompensatedSum::default(); bands];
    for cube in &cubes {
        for (_, px) in cube.valid_pixels() {
            for ((s, v), m) in sq.iter_mut().zip(px).zip(&mean) {
                let d = v.f64() - m;
                s.add(d * d);
            }
        }
    }
    let std = sq.iter().map(|s| (s.value() / n as f64).max(0.0).sqrt()).collect();
    Ok(BandStats {
        mean,
        std,
        pixel_count: n,
    })
}

/// Maps valid pixels to `(x - mean) / max(std, eps)`; invalid pixels stay fill.
pub fn normalize<T: Scalar>(
    cube: &HyperCube<T>,
    stats: &BandStats,
    eps: f64,
) -> Result<HyperCube<T>, RasterError> {
    if stats.bands() != cube.bands() || stats.std.len() != cube.bands() {
        return Err(RasterError::BandCountMismatch {
            expected: cube.bands(),
            actual: stats.bands(),
        });
    }
    let scale: Vec<f64> = stats.std.iter().map(|s| 1.0 / s.max(eps)).collect();
    let mut data = cube.data().to_vec();
    for (px, ok) in data.chunks_exact_mut(cube.bands()).zip(cube.valid_mask()) {
        if *ok {
            for ((v, m), k) in px.iter_mut().zip(&stats.mean).zip(&scale) {
                *v = T::of((v.f64() - m) * k);
            }
        }
    }
    HyperCube::new(
        cube.rows(),
        cube.cols(),
        cube.wavelengths_nm().to_vec(),
        data,
        cube.valid_mask().to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_stats() {
        let cube = HyperCube::<f32>::from_data(1, 2, vec![1.0], vec![1.0, 3.0]).unwrap();
        let s = band_stats([&cube]).unwrap();
        assert_eq!(s.mean, vec![2.0]);
        assert_eq!(s.std, vec![1.0]);
        assert_eq!(s.pixel_count, 2);
    }

    #[test]
    fn invalid_pixels_are_ignored() {
        let cube =
            HyperCube::<f32>::new(1, 3, vec![1.0], vec![1.0, 3.0, 100.0], vec![true, true, false]).unwrap();
        let s = band_stats([&cube]).unwrap();
        assert_eq!((s.mean[0], s.std[0], s.pixel_count), (2.0, 1.0, 2));
    }

    #[test]
    fn constant_band() {
        let cube = HyperCube::<f64>::from_data(2, 2, vec![1.0], vec![4.5; 4]).unwrap();
        let s = band_stats([&cube]).unwrap();
        assert_eq!((s.mean[0], s.std[0]), (4.5, 0.0));
        let z = normalize(&cube, &s, DEFAULT_NORM_EPS).unwrap();
        assert!(z.data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn errors() {
        let empty = HyperCube::<f32>::empty(2, 2, vec![1.0]).unwrap();
        assert_eq!(band_stats([&empty]).unwrap_err(), RasterError::NoValidPixels);
        let a = HyperCube::<f32>::from_data(1, 1, vec![1.0], vec![0.0]).unwrap();
        let b = HyperCube::<f32>::from_data(1, 1, vec![2.0], vec![0.0]).unwrap();
        assert_eq!(band_stats([&a, &b]).unwrap_err(), RasterError::WavelengthMismatch);
        let s = BandStats {
            mean: vec![0.0, 0.0],
            std: vec![1.0, 1.0],
            pixel_count: 1,
        };
        assert!(matches!(normalize(&a, &s, 1e-6), Err(RasterError::BandCountMismatch { .. })));
    }

    #[test]
    fn normalize_hand_value_and_guard() {
        let cube = HyperCube::<f64>::from_data(1, 1, vec![1.0, 2.0], vec![5.0, 7.0]).unwrap();
        let s = BandStats {
            mean: vec![3.0, 6.0],
            std: vec![2.0, 0.0],
            pixel_count: 1,
        };
        let out = normalize(&cube, &s, 1e-6).unwrap();
        assert_eq!(out.data()[0], 1.0);
        assert!((out.data()[1] - 1e6).abs() < 1e-3);
        assert!(out.data()[1].is_finite());
    }
}
