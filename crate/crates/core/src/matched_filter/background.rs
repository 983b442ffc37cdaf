use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::cholesky;
use crate::error::FilterError;
use crate::raster::HyperCube;
use crate::scalar::Scalar;

pub const DEFAULT_LOADING: f64 = 1e-4;

/// How pixels are pooled into background groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// One group per image column (pushbroom detector sample).
    #[default]
    PerColumn,
    Global,
}

/// Background mean and loaded covariance of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats<T> {
    pub mean: Vec<T>,
    /// Row-major `bands x bands`, diagonal loading included.
    pub covariance: Vec<T>,
    pub(crate) factor: Vec<T>,
}

impl<T: Scalar> GroupStats<T> {
    fn new(mean: Vec<T>, covariance: Vec<T>, group: usize) -> Result<Self, FilterError> {
        let n = mean.len();
        let factor = cholesky(&covariance, n).ok_or(FilterError::SingularCovariance { group })?;
        Ok(Self {
            mean,
            covariance,
            factor,
        })
    }
}

/// Per-column background statistics; `column_group[c]` indexes `groups`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats<T> {
    pub groups: Vec<GroupStats<T>>,
    pub column_group: Vec<usize>,
    pub loading: f64,
}

impl<T: Scalar> ColumnStats<T> {
    pub fn bands(&self) -> usize {
        self.groups[0].mean.len()
    }

    pub fn group_for_column(&self, col: usize) -> &GroupStats<T> {
        &self.groups[self.column_group[col]]
    }

    /// Statistics from a known background (used with synthetic scenes).
    pub fn from_known(mean: &[f64], covariance: &[f64], cols: usize, loading: f64) -> Result<Self, FilterError> {
        let n = mean.len();
        if covariance.len() != n * n || n == 0 {
            return Err(FilterError::ShapeMismatch("covariance is not bands x bands".into()));
        }
        let cov = load(covariance.to_vec(), n, loading);
        let g = GroupStats::new(
            mean.iter().map(|v| T::of(*v)).collect(),
            cov.into_iter().map(T::of).collect(),
            0,
        )?;
        Ok(Self {
            groups: vec![g],
            column_group: vec![0; cols],
            loading,
        })
    }
}

/// Adds `loading * mean(diag)` to the diagonal. A zero diagonal (constant
/// background) is loaded with `loading` itself.
fn load(mut cov: Vec<f64>, n: usize, loading: f64) -> Vec<f64> {
    let mean_diag = (0..n).map(|i| cov[i * n + i]).sum::<f64>() / n as f64;
    let level = if mean_diag > 0.0 { mean_diag } else { 1.0 };
    for i in 0..n {
        cov[i * n + i] += loading * level;
    }
    cov
}

/// Mean and divisor-N covariance, accumulated in `f64`.
fn moments<'a>(pixels: impl Iterator<Item = &'a [f64]> + Clone, n: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let mut mean = vec![0.0; n];
    let mut count = 0usize;
    for px in pixels.clone() {
        for (m, v) in mean.iter_mut().zip(px) {
            *m += v;
        }
        count += 1;
    }
    mean.iter_mut().for_each(|m| *m /= count.max(1) as f64);
    let mut cov = vec![0.0; n * n];
    let mut d = vec![0.0; n];
    for px in pixels {
        for i in 0..n {
            d[i] = px[i] - mean[i];
        }
        for i in 0..n {
            for j in 0..=i {
                cov[i * n + j] += d[i] * d[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = cov[i * n + j] / count.max(1) as f64;
            cov[i * n + j] = v;
            cov[j * n + i] = v;
        }
    }
    (mean, cov, count)
}

/// Estimates background mean and loaded covariance per group. Columns with
/// fewer than `bands + 1` valid pixels fall back to the global statistics.
pub fn estimate_background<T: Scalar>(
    cube: &HyperCube<T>,
    grouping: Grouping,
    loading: f64,
) -> Result<ColumnStats<T>, FilterError> {
    let (rows, cols, bands) = (cube.rows(), cube.cols(), cube.bands());
    let needed = bands + 1;
    // f64 copy of each column's valid spectra
    let columns: Vec<Vec<f64>> = (0..cols)
        .into_par_iter()
        .map(|c| {
            let mut v = Vec::with_capacity(rows * bands);
            for r in 0..rows {
                if cube.is_valid(r, c) {
                    v.extend(cube.pixel(r, c).iter().map(|x| x.f64()));
                }
            }
            v
        })
        .collect();

    let global = || -> Result<GroupStats<T>, FilterError> {
        let all = columns.iter().flat_map(|c| c.chunks_exact(bands));
        let found = columns.iter().map(|c| c.len() / bands).sum::<usize>();
        if found < needed {
            return Err(FilterError::TooFewPixels { needed, found });
        }
        let (mean, cov, _) = moments(all, bands);
        to_group(mean, load(cov, bands, loading), 0)
    };

    match grouping {
        Grouping::Global => Ok(ColumnStats {
            groups: vec![global()?],
            column_group: vec![0; cols],
            loading,
        }),
        Grouping::PerColumn => {
            let per_column: Vec<Option<Result<GroupStats<T>, FilterError>>> = columns
                .par_iter()
                .enumerate()
                .map(|(c, col)| {
                    let count = col.len() / bands;
                    (count >= needed).then(|| {
                        let (mean, cov, _) = moments(col.chunks_exact(bands), bands);
                        to_group(mean, load(cov, bands, loading), c)
                    })
                })
                .collect();
            let short = per_column.iter().filter(|g| g.is_none()).count();
            let mut groups = Vec::with_capacity(cols + 1);
            let mut column_group = Vec::with_capacity(cols);
            let mut fallback: Option<usize> = None;
            for g in per_column {
                match g {
                    Some(g) => {
                        column_group.push(groups.len());
                        groups.push(g?);
                    }
                    None => {
                        let idx = match fallback {
                            Some(i) => i,
                            None => {
                                groups.push(global()?);
                                fallback = Some(groups.len() - 1);
                                groups.len() - 1
                            }
                        };
                        column_group.push(idx);
                    }
                }
            }
            if short > 0 {
                log::warn!("{short} of {cols} columns have fewer than {needed} valid pixels; using global background");
            }
            Ok(ColumnStats {
                groups,
                column_group,
                loading,
            })
        }
    }
}

fn to_group<T: Scalar>(mean: Vec<f64>, cov: Vec<f64>, group: usize) -> Result<GroupStats<T>, FilterError> {
    GroupStats::new(
        mean.into_iter().map(T::of).collect(),
        cov.into_iter().map(T::of).collect(),
        group,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_band_hand_case() {
        let cube = HyperCube::<f64>::from_data(2, 1, vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (mean, cov, n) = moments(cube.data().chunks_exact(2), 2);
        assert_eq!((mean, cov, n), (vec![2.0, 3.0], vec![1.0, 1.0, 1.0, 1.0], 2));
        // rank-one covariance needs loading
        assert!(matches!(
            estimate_background(&cube, Grouping::Global, 0.0),
            Err(FilterError::TooFewPixels { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn identical_spectra_need_loading() {
        let cube = HyperCube::<f64>::from_data(4, 1, vec![1.0, 2.0], [5.0, 7.0].repeat(4)).unwrap();
        assert_eq!(
            estimate_background(&cube, Grouping::Global, 0.0).unwrap_err(),
            FilterError::SingularCovariance { group: 0 }
        );
        let stats = estimate_background(&cube, Grouping::Global, 1e-4).unwrap();
        assert_eq!(stats.groups[0].mean, vec![5.0, 7.0]);
        assert_eq!(stats.groups[0].covariance, vec![1e-4, 0.0, 0.0, 1e-4]);
    }

    #[test]
    fn narrow_columns_fall_back_to_global() {
        // 3 rows, 2 bands: every column has exactly bands + 1 pixels except
        // the second, which has one invalid pixel
        let data: Vec<f64> = (0..12).map(|v| (v * v % 7) as f64).collect();
        let valid = vec![true, true, true, false, true, true];
        let cube = HyperCube::new(3, 2, vec![1.0, 2.0], data, valid).unwrap();
        let stats = estimate_background(&cube, Grouping::PerColumn, 1e-3).unwrap();
        assert_eq!(stats.column_group, vec![0, 1]);
        assert_eq!(stats.groups.len(), 2);
    }
}
