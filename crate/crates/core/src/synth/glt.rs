use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::geometry::{Glt, SrcPixel};
use crate::rng::SeededRng;

/// Off-nadir style distortion of the sensor grid.
///
/// The ortho pixel `(y, x)` takes its value from source line
/// `round(y * along_track_scale)` and sample
/// `round((x - offset(y)) * cross_track_scale)`, with
/// `offset(y) = shift_cols + skew_cols_per_line * y
///              + wobble_amplitude_cols * sin(2π y / wobble_period_lines)`.
/// Scales above 1 skip source pixels (holes after back-sampling), scales
/// below 1 make several ortho pixels share one source pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Distortion {
    pub shift_cols: f64,
    pub skew_cols_per_line: f64,
    pub wobble_amplitude_cols: f64,
    pub wobble_period_lines: f64,
    pub cross_track_scale: f64,
    pub along_track_scale: f64,
    /// Ortho pixels this close to the grid edge are left unmapped.
    pub crop_margin: usize,
    pub ortho_rows: Option<usize>,
    pub ortho_cols: Option<usize>,
}

impl Default for Distortion {
    fn default() -> Self {
        Self {
            shift_cols: 0.0,
            skew_cols_per_line: 0.0,
            wobble_amplitude_cols: 0.0,
            wobble_period_lines: 64.0,
            cross_track_scale: 1.0,
            along_track_scale: 1.0,
            crop_margin: 0,
            ortho_rows: None,
            ortho_cols: None,
        }
    }
}

impl Distortion {
    fn offset(&self, y: f64) -> f64 {
        let wobble = if self.wobble_amplitude_cols != 0.0 {
            self.wobble_amplitude_cols * (std::f64::consts::TAU * y / self.wobble_period_lines).sin()
        } else {
            0.0
        };
        self.shift_cols + self.skew_cols_per_line * y + wobble
    }

    fn validate(&self) -> Result<(), SynthError> {
        let finite = [
            self.shift_cols,
            self.skew_cols_per_line,
            self.wobble_amplitude_cols,
            self.wobble_period_lines,
            self.cross_track_scale,
            self.along_track_scale,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SynthError::DistortionOutOfRange("non-finite parameter".into()));
        }
        if self.cross_track_scale <= 0.0 || self.along_track_scale <= 0.0 {
            return Err(SynthError::DistortionOutOfRange("scales must be positive".into()));
        }
        if self.wobble_amplitude_cols != 0.0 && self.wobble_period_lines <= 0.0 {
            return Err(SynthError::DistortionOutOfRange("wobble period must be positive".into()));
        }
        Ok(())
    }
}

/// Builds the lookup table of a distorted `src_rows x src_cols` sensor grid.
/// Zero distortion gives the identity.
pub fn gen_glt(src_rows: usize, src_cols: usize, d: &Distortion) -> Result<Glt, SynthError> {
    d.validate()?;
    let ortho_rows = d
        .ortho_rows
        .unwrap_or_else(|| (src_rows as f64 / d.along_track_scale).round() as usize);
    let max_offset = (0..ortho_rows)
        .map(|y| d.offset(y as f64))
        .fold(0.0f64, f64::max)
        .ceil() as usize;
    let ortho_cols = d
        .ortho_cols
        .unwrap_or_else(|| (src_cols as f64 / d.cross_track_scale).round() as usize + max_offset);
    let m = d.crop_margin;
    let mut entries = Vec::with_capacity(ortho_rows * ortho_cols);
    for y in 0..ortho_rows {
        let off = d.offset(y as f64);
        let line = (y as f64 * d.along_track_scale).round();
        for x in 0..ortho_cols {
            let inside_crop = y >= m && x >= m && y + m < ortho_rows && x + m < ortho_cols;
            let sample = ((x as f64 - off) * d.cross_track_scale).round();
            let in_range = line >= 0.0 && sample >= 0.0 && line < src_rows as f64 && sample < src_cols as f64;
            entries.push((inside_crop && in_range).then(|| SrcPixel::new(line as u32, sample as u32)));
        }
    }
    if !entries.iter().any(Option::is_some) {
        return Err(SynthError::DistortionOutOfRange("no ortho pixel maps into the swath".into()));
    }
    Ok(Glt::new(ortho_rows, ortho_cols, src_rows, src_cols, entries).expect("entries checked in range"))
}

/// A random bijection between two `rows x cols` grids.
pub fn gen_bijective_glt(rows: usize, cols: usize, rng: &mut SeededRng) -> Glt {
    let mut perm: Vec<usize> = (0..rows * cols).collect();
    rng.shuffle(&mut perm);
    let entries = perm
        .into_iter()
        .map(|k| Some(SrcPixel::new((k / cols) as u32, (k % cols) as u32)))
        .collect();
    Glt::new(rows, cols, rows, cols, entries).expect("permutation is in range")
}
