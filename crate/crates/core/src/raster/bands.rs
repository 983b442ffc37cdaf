use serde::{Deserialize, Serialize};

use super::HyperCube;
use crate::error::RasterError;
use crate::scalar::Scalar;

/// Which bands to keep: inclusive wavelength intervals plus the single
/// nearest band to each RGB target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandSelection {
    pub ranges_nm: Vec<(f64, f64)>,
    pub rgb_wavelengths_nm: Vec<f64>,
    pub expected_count: Option<usize>,
}

impl Default for BandSelection {
    /// Methane window: SWIR 1573-1699 nm and 2004-2478 nm plus RGB at
    /// 640/550/462 nm.
    fn default() -> Self {
        Self {
            ranges_nm: vec![(1573.0, 1699.0), (2004.0, 2478.0)],
            rgb_wavelengths_nm: vec![462.0, 550.0, 640.0],
            expected_count: None,
        }
    }
}

impl BandSelection {
    pub fn ranges(ranges_nm: Vec<(f64, f64)>) -> Self {
        Self {
            ranges_nm,
            rgb_wavelengths_nm: Vec::new(),
            expected_count: None,
        }
    }

    pub fn validate(&self) -> Result<(), RasterError> {
        for &(lo, hi) in &self.ranges_nm {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(RasterError::InvalidSelection(format!("bad interval [{lo}, {hi}]")));
            }
        }
        let mut sorted = self.ranges_nm.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted.windows(2).any(|w| w[1].0 <= w[0].1) {
            return Err(RasterError::InvalidSelection("intervals overlap".into()));
        }
        if self.rgb_wavelengths_nm.iter().any(|w| !w.is_finite()) {
            return Err(RasterError::InvalidSelection("non-finite RGB target".into()));
        }
        Ok(())
    }

    /// Indices of the selected bands, ascending.
    pub fn band_indices(&self, wavelengths_nm: &[f64]) -> Result<Vec<usize>, RasterError> {
        self.validate()?;
        let mut keep: Vec<usize> = wavelengths_nm
            .iter()
            .enumerate()
            .filter(|(_, &w)| self.ranges_nm.iter().any(|&(lo, hi)| lo <= w && w <= hi))
            .map(|(i, _)| i)
            .collect();
        for &target in &self.rgb_wavelengths_nm {
            // first minimum wins, so an exact tie goes to the shorter wavelength
            let nearest = wavelengths_nm
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
                .map(|(i, _)| i);
            keep.extend(nearest);
        }
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(RasterError::EmptySelection);
        }
        if let Some(expected) = self.expected_count {
            if expected != keep.len() {
                return Err(RasterError::CountMismatch {
                    expected,
                    actual: keep.len(),
                });
            }
        }
        Ok(keep)
    }
}

/// Keeps the bands chosen by `sel`, preserving ascending order.
pub fn select_bands<T: Scalar>(
    cube: &HyperCube<T>,
    sel: &BandSelection,
) -> Result<HyperCube<T>, RasterError> {
    let keep = sel.band_indices(cube.wavelengths_nm())?;
    let wavelengths = keep.iter().map(|&i| cube.wavelengths_nm()[i]).collect();
    let mut data = Vec::with_capacity(cube.pixel_count() * keep.len());
    for px in cube.data().chunks_exact(cube.bands()) {
        data.extend(keep.iter().map(|&i| px[i]));
    }
    HyperCube::new(
        cube.rows(),
        cube.cols(),
        wavelengths,
        data,
        cube.valid_mask().to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_cube(wavelengths: Vec<f64>) -> HyperCube<f32> {
        let bands = wavelengths.len();
        let data = (0..2 * bands).map(|v| v as f32).collect();
        HyperCube::from_data(1, 2, wavelengths, data).unwrap()
    }

    fn emit_like_grid() -> Vec<f64> {
        (0..285).map(|i| 381.0 + 7.4 * i as f64).collect()
    }

    // Independent scan: count bands inside either window, then add the RGB
    // bands found by a separate arg-min over absolute distance.
    fn oracle_count(w: &[f64]) -> usize {
        let mut inside = vec![false; w.len()];
        for (i, x) in w.iter().enumerate() {
            if (*x >= 1573.0 && *x <= 1699.0) || (*x >= 2004.0 && *x <= 2478.0) {
                inside[i] = true;
            }
        }
        for t in [462.0f64, 550.0, 640.0] {
            let mut best = 0;
            for i in 1..w.len() {
                if (w[i] - t).abs() < (w[best] - t).abs() {
                    best = i;
                }
            }
            inside[best] = true;
        }
        inside.iter().filter(|b| **b).count()
    }

    #[test]
    fn methane_window_matches_scan_oracle() {
        let w = emit_like_grid();
        let expected = oracle_count(&w);
        // frozen from the oracle: 17 bands in 1573-1699, 64 in 2004-2478, 3 RGB
        assert_eq!(expected, 84);
        let cube = grid_cube(w);
        let out = select_bands(&cube, &BandSelection::default()).unwrap();
        assert_eq!(out.bands(), expected);
        assert!(out.wavelengths_nm().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn all_inside_keeps_order() {
        let cube = grid_cube(vec![1600.0, 1650.0]);
        let out = select_bands(&cube, &BandSelection::ranges(vec![(1573.0, 1699.0)])).unwrap();
        assert_eq!(out, cube);
    }

    #[test]
    fn all_outside_is_empty() {
        let cube = grid_cube(vec![900.0, 1000.0]);
        assert_eq!(
            select_bands(&cube, &BandSelection::ranges(vec![(1573.0, 1699.0)])).unwrap_err(),
            RasterError::EmptySelection
        );
    }

    #[test]
    fn count_check_and_bounds_inclusive() {
        let cube = grid_cube(vec![1573.0, 1699.0, 1700.0]);
        let mut sel = BandSelection::ranges(vec![(1573.0, 1699.0)]);
        assert_eq!(select_bands(&cube, &sel).unwrap().bands(), 2);
        sel.expected_count = Some(3);
        assert_eq!(
            select_bands(&cube, &sel).unwrap_err(),
            RasterError::CountMismatch { expected: 3, actual: 2 }
        );
    }

    #[test]
    fn rgb_duplicates_removed() {
        let cube = grid_cube(vec![500.0, 1600.0]);
        let sel = BandSelection {
            ranges_nm: vec![(1573.0, 1699.0)],
            rgb_wavelengths_nm: vec![462.0, 550.0, 640.0],
            expected_count: None,
        };
        assert_eq!(select_bands(&cube, &sel).unwrap().wavelengths_nm(), &[500.0, 1600.0]);
    }

    #[test]
    fn overlapping_intervals_rejected() {
        let sel = BandSelection::ranges(vec![(1.0, 5.0), (5.0, 6.0)]);
        assert!(matches!(sel.validate(), Err(RasterError::InvalidSelection(_))));
    }
}
