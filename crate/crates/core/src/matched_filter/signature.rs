use std::fmt::Write as _;
use std::path::Path;

use crate::error::{FilterError, FormatError};

/// Unit methane absorption per band (per ppm·m), stored with the
/// wavelength grid it was sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSignature {
    pub wavelengths_nm: Vec<f64>,
    pub t: Vec<f64>,
    pub source: String,
}

impl TargetSignature {
    pub fn new(wavelengths_nm: Vec<f64>, t: Vec<f64>, source: impl Into<String>) -> Result<Self, FilterError> {
        if wavelengths_nm.len() != t.len() || t.is_empty() {
            return Err(FilterError::BadSignature("wavelength/coefficient length mismatch".into()));
        }
        if t.iter().any(|v| !v.is_finite()) || t.iter().all(|v| *v == 0.0) {
            return Err(FilterError::BadSignature("coefficients must be finite and not all zero".into()));
        }
        if wavelengths_nm.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FilterError::BadSignature("wavelengths must increase".into()));
        }
        Ok(Self {
            wavelengths_nm,
            t,
            source: source.into(),
        })
    }

    /// Sum of Gaussian absorption lines `(center_nm, fwhm_nm, peak per ppm·m)`.
    pub fn synthetic(wavelengths_nm: &[f64], lines: &[(f64, f64, f64)]) -> Result<Self, FilterError> {
        let t = wavelengths_nm
            .iter()
            .map(|&w| {
                lines
                    .iter()
                    .map(|&(c, fwhm, depth)| {
                        let sigma = fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
                        depth * (-(w - c) * (w - c) / (2.0 * sigma * sigma)).exp()
                    })
                    .sum()
            })
            .collect();
        Self::new(wavelengths_nm.to_vec(), t, "synthetic")
    }

    /// Default synthetic methane signature: the 1666 nm and 2200-2400 nm
    /// absorption features, scaled so the deepest line is `4e-6` per ppm·m.
    pub fn synthetic_methane(wavelengths_nm: &[f64]) -> Result<Self, FilterError> {
        Self::synthetic(
            wavelengths_nm,
            &[
                (1666.0, 20.0, 2.5e-6),
                (2230.0, 40.0, 1.5e-6),
                (2300.0, 50.0, 4.0e-6),
                (2370.0, 40.0, 3.0e-6),
            ],
        )
    }

    /// Linear interpolation onto another wavelength grid (clamped at the ends).
    pub fn resample(&self, wavelengths_nm: &[f64]) -> Result<Self, FilterError> {
        let w = &self.wavelengths_nm;
        let t = wavelengths_nm
            .iter()
            .map(|&x| {
                if x <= w[0] {
                    return self.t[0];
                }
                if x >= w[w.len() - 1] {
                    return self.t[w.len() - 1];
                }
                let i = w.partition_point(|v| *v <= x) - 1;
                let f = (x - w[i]) / (w[i + 1] - w[i]);
                self.t[i] * (1.0 - f) + self.t[i + 1] * f
            })
            .collect();
        Self::new(wavelengths_nm.to_vec(), t, self.source.clone())
    }

    /// Parses two whitespace-separated columns `wavelength_nm t`; `#` starts
    /// a comment.
    pub fn parse(text: &str, source: &str) -> Result<Self, FormatError> {
        let mut w = Vec::new();
        let mut t = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parse_err = |message: String| FormatError::Parse { line: i + 1, message };
            let cols: Vec<&str> = content.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(parse_err(format!("expected 2 columns, found {}", cols.len())));
            }
            w.push(cols[0].parse::<f64>().map_err(|e| parse_err(e.to_string()))?);
            t.push(cols[1].parse::<f64>().map_err(|e| parse_err(e.to_string()))?);
        }
        Self::new(w, t, source).map_err(|e| FormatError::Parse {
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# wavelength_nm t  (source: {})\n", self.source);
        for (w, t) in self.wavelengths_nm.iter().zip(&self.t) {
            let _ = writeln!(s, "{w} {t:e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_comments() {
        let sig = TargetSignature::parse("# header\n1600 0.5\n\n1700  1e-3 # tail\n", "x").unwrap();
        assert_eq!(sig.wavelengths_nm, vec![1600.0, 1700.0]);
        assert_eq!(sig.t, vec![0.5, 1e-3]);
        let back = TargetSignature::parse(&sig.to_text(), "x").unwrap();
        assert_eq!(back.t, sig.t);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(TargetSignature::parse("1600\n", "x"), Err(FormatError::Parse { line: 1, .. })));
        assert!(TargetSignature::parse("1600 0\n1700 0\n", "x").is_err());
    }

    #[test]
    fn resample_interpolates() {
        let sig = TargetSignature::new(vec![0.0, 10.0], vec![0.0, 1.0], "x").unwrap();
        assert_eq!(sig.resample(&[-1.0, 5.0, 20.0]).unwrap().t, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn synthetic_peaks_at_line_center() {
        let sig = TargetSignature::synthetic(&[2290.0, 2300.0, 2310.0], &[(2300.0, 30.0, 1.0)]).unwrap();
        assert_eq!(sig.t[1], 1.0);
        assert!(sig.t[0] < 1.0 && (sig.t[0] - sig.t[2]).abs() < 1e-15);
    }
}
