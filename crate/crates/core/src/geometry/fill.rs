//! Exact nearest-seed fill.
//!
//! Distances are Euclidean between pixel centers, compared exactly in
//! integer arithmetic. Among equidistant seeds the one with the smaller row
//! wins, then the smaller column. The transform is separable:
//!
//! 1. per column, the nearest seed in that column (ties to the upper one);
//! 2. per row, the lower envelope of the parabolas
//!    `(x - c)^2 + g_c^2` contributed by each column `c`, where ties between
//!    two parabolas are resolved at integer breakpoints by the seed key
//!    `(seed_row, c)`.
//!
//! Both passes are linear, so the fill is `O(rows * cols)`.

use rayon::prelude::*;

use super::warp::SparseRaster;
use crate::error::GeometryError;
use crate::raster::HyperCube;
use crate::scalar::Scalar;

const NONE: u32 = u32::MAX;

/// Fills every unset pixel inside `region` with the value of its nearest set
/// pixel. Set pixels keep their values; unset pixels outside `region` stay
/// fill.
pub fn nn_fill<T: Scalar>(sparse: &SparseRaster<T>, region: &[bool]) -> Result<HyperCube<T>, GeometryError> {
    let (rows, cols, bands) = (sparse.rows, sparse.cols, sparse.bands);
    if region.len() != rows * cols || sparse.set_mask.len() != rows * cols {
        return Err(GeometryError::ShapeMismatch(format!(
            "fill region has {} pixels, raster is {rows}x{cols}",
            region.len()
        )));
    }
    let set = &sparse.set_mask;
    if !set.iter().zip(region).any(|(s, r)| *s && *r) {
        return Err(GeometryError::NoSeedPixels);
    }

    let seed_row = column_nearest(set, rows, cols);

    let mut values = sparse.values.clone();
    let mut valid = set.clone();
    values
        .par_chunks_mut(cols * bands)
        .zip(valid.par_chunks_mut(cols))
        .enumerate()
        .for_each(|(r, (vrow, okrow))| {
            let base = r * cols;
            let needs_fill = (0..cols).any(|x| !set[base + x] && region[base + x]);
            if !needs_fill {
                return;
            }
            let winners = row_envelope(r as i64, &seed_row[base..base + cols]);
            for x in 0..cols {
                if set[base + x] || !region[base + x] {
                    continue;
                }
                let c = winners[x];
                let sr = seed_row[base + c] as usize;
                let src = (sr * cols + c) * bands;
                vrow[x * bands..(x + 1) * bands].copy_from_slice(&sparse.values[src..src + bands]);
                okrow[x] = true;
            }
        });

    Ok(HyperCube::new(rows, cols, sparse.wavelengths_nm.clone(), values, valid)
        .expect("filled raster shape is consistent"))
}

/// For every pixel, the row of the nearest seed in the same column, or
/// `NONE` when the column has no seed. Equidistant seeds resolve upward.
fn column_nearest(set: &[bool], rows: usize, cols: usize) -> Vec<u32> {
    let mut above = vec![NONE; rows * cols];
    let mut last = vec![NONE; cols];
    for r in 0..rows {
        for c in 0..cols {
            if set[r * cols + c] {
                last[c] = r as u32;
            }
            above[r * cols + c] = last[c];
        }
    }
    let mut out = above;
    last.fill(NONE);
    for r in (0..rows).rev() {
        for c in 0..cols {
            let i = r * cols + c;
            if set[i] {
                last[c] = r as u32;
            }
            let below = last[c];
            if below == NONE {
                continue;
            }
            let up = out[i];
            if up == NONE || (below as usize - r) < (r - up as usize) {
                out[i] = below;
            }
        }
    }
    out
}

/// Last integer `x` at which column `c` beats column `d > c` for row `r`.
fn breakpoint(r: i64, c: i64, gc_row: i64, d: i64, gd_row: i64) -> i64 {
    let gc = r - gc_row;
    let gd = r - gd_row;
    let num = d * d + gd * gd - c * c - gc * gc;
    let den = 2 * (d - c);
    if num.rem_euclid(den) == 0 {
        let s = num / den;
        // equal distance at x = s: smaller (seed_row, column) key wins
        if (gc_row, c) < (gd_row, d) {
            s
        } else {
            s - 1
        }
    } else {
        num.div_euclid(den)
    }
}

/// Winning column for each `x` in the row.
fn row_envelope(r: i64, seed_row: &[u32]) -> Vec<usize> {
    let cols = seed_row.len();
    let mut stack: Vec<(i64, i64)> = Vec::with_capacity(cols); // (column, first x it wins)
    for (d, &sr) in seed_row.iter().enumerate() {
        if sr == NONE {
            continue;
        }
        let d = d as i64;
        let sr = sr as i64;
        loop {
            match stack.last() {
                None => {
                    stack.push((d, i64::MIN));
                    break;
                }
                Some(&(c, start)) => {
                    let b = breakpoint(r, c, seed_row[c as usize] as i64, d, sr);
                    if b < start {
                        stack.pop();
                    } else {
                        stack.push((d, b + 1));
                        break;
                    }
                }
            }
        }
    }
    let mut out = vec![0usize; cols];
    let mut k = 0;
    for (x, slot) in out.iter_mut().enumerate() {
        while k + 1 < stack.len() && stack[k + 1].1 <= x as i64 {
            k += 1;
        }
        *slot = stack[k].0 as usize;
    }
    out
}
