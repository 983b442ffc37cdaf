//! `HSCUBE01` hyperspectral cube files.
//!
//! ```text
//! "HSCUBE01" | u32 LE header length | JSON header
//!   | rows*cols*bands f32 LE, band-interleaved-by-pixel
//!   | rows*cols u8 validity flags, row-major (only when "has_mask": true)
//! ```
//!
//! Invalid pixels are written with `fill_value` in every band. When the
//! header has no mask section every pixel is valid.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_framed_header, read_payload};
use crate::error::{FormatError, RasterError};
use crate::raster::HyperCube;
use crate::scalar::Scalar;

pub const HSC_MAGIC: &[u8; 8] = b"HSCUBE01";

/// Either a number or the string `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FillValue {
    Number(f64),
    Text(NanTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NanTag {
    #[serde(rename = "nan")]
    Nan,
}

impl FillValue {
    pub const NAN: FillValue = FillValue::Text(NanTag::Nan);

    fn as_f32(self) -> f32 {
        match self {
            FillValue::Number(v) => v as f32,
            FillValue::Text(_) => f32::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HscHeader {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub dtype: String,
    pub interleave: String,
    pub wavelengths_nm: Vec<f64>,
    pub fill_value: FillValue,
    #[serde(default)]
    pub has_mask: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

/// Serializes a cube. `units` lands in the header when given (e.g. `"ppm_m"`).
pub fn encode_hsc<T: Scalar>(cube: &HyperCube<T>, units: Option<&str>) -> Vec<u8> {
    let has_mask = cube.valid_mask().iter().any(|v| !v);
    let header = HscHeader {
        rows: cube.rows(),
        cols: cube.cols(),
        bands: cube.bands(),
        dtype: "f32le".into(),
        interleave: "bip".into(),
        wavelengths_nm: cube.wavelengths_nm().to_vec(),
        fill_value: FillValue::NAN,
        has_mask,
        units: units.map(str::to_owned),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let n = cube.data().len();
    let mut out = Vec::with_capacity(12 + json.len() + 4 * n + cube.pixel_count());
    out.extend_from_slice(HSC_MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    let fill = header.fill_value.as_f32();
    for (px, ok) in cube.data().chunks_exact(cube.bands()).zip(cube.valid_mask()) {
        for v in px {
            let f = if *ok { v.to_f32().unwrap_or(f32::NAN) } else { fill };
            out.extend_from_slice(&f.to_le_bytes());
        }
    }
    if has_mask {
        out.extend(cube.valid_mask().iter().map(|&v| v as u8));
    }
    out
}

/// Reads one cube from the stream, leaving the reader just past it.
pub fn read_hsc<T: Scalar>(r: &mut impl Read) -> Result<(HyperCube<T>, HscHeader), FormatError> {
    let raw = read_framed_header(r, HSC_MAGIC, "HSCUBE01")?;
    let header: HscHeader = serde_json::from_slice(&raw)?;
    if header.dtype != "f32le" || header.interleave != "bip" {
        return Err(FormatError::Header(format!(
            "unsupported dtype/interleave {}/{}",
            header.dtype, header.interleave
        )));
    }
    if header.wavelengths_nm.len() != header.bands {
        return Err(FormatError::Header("wavelength count != bands".into()));
    }
    let pixels = header
        .rows
        .checked_mul(header.cols)
        .ok_or_else(|| FormatError::Header("raster too large".into()))?;
    let n = pixels
        .checked_mul(header.bands)
        .ok_or_else(|| FormatError::Header("raster too large".into()))?;
    let payload = read_payload(r, 4 * n)?;
    let data: Vec<T> = payload
        .chunks_exact(4)
        .map(|b| T::of(f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64))
        .collect();
    let valid = if header.has_mask {
        read_payload(r, pixels)?.into_iter().map(|b| b != 0).collect()
    } else {
        vec![true; pixels]
    };
    let cube = HyperCube::new(header.rows, header.cols, header.wavelengths_nm.clone(), data, valid)
        .map_err(|e: RasterError| FormatError::Header(e.to_string()))?;
    Ok((cube, header))
}

pub fn decode_hsc<T: Scalar>(bytes: &[u8]) -> Result<(HyperCube<T>, HscHeader), FormatError> {
    let mut cursor = bytes;
    read_hsc(&mut cursor)
}

pub fn save_hsc<T: Scalar>(path: &Path, cube: &HyperCube<T>, units: Option<&str>) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_hsc(cube, units))?;
    w.flush()?;
    Ok(())
}

pub fn load_hsc<T: Scalar>(path: &Path) -> Result<(HyperCube<T>, HscHeader), FormatError> {
    let mut r = BufReader::new(File::open(path)?);
    read_hsc(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_is_bit_exact() {
        let cube =
            HyperCube::<f32>::new(1, 2, vec![500.0, 600.0], vec![1.0, 2.0, 3.0, 4.0], vec![true, false]).unwrap();
        let bytes = encode_hsc(&cube, None);
        assert_eq!(&bytes[..8], b"HSCUBE01");
        let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let header = std::str::from_utf8(&bytes[12..12 + len]).unwrap();
        assert_eq!(
            header,
            r#"{"rows":1,"cols":2,"bands":2,"dtype":"f32le","interleave":"bip","wavelengths_nm":[500.0,600.0],"fill_value":"nan","has_mask":true}"#
        );
        let payload = &bytes[12 + len..];
        assert_eq!(payload.len(), 16 + 2);
        assert_eq!(&payload[..4], &1.0f32.to_le_bytes());
        assert_eq!(&payload[4..8], &2.0f32.to_le_bytes());
        assert!(f32::from_le_bytes(payload[8..12].try_into().unwrap()).is_nan());
        assert_eq!(&payload[16..], &[1, 0]);
    }

    #[test]
    fn numeric_fill_and_units() {
        let json = r#"{"rows":1,"cols":1,"bands":1,"dtype":"f32le","interleave":"bip","wavelengths_nm":[0.0],"fill_value":-9999,"units":"ppm_m"}"#;
        let mut bytes = b"HSCUBE01".to_vec();
        bytes.extend_from_slice(&(json.len() as u32).to_le_bytes());
        bytes.extend_from_slice(json.as_bytes());
        bytes.extend_from_slice(&12.5f32.to_le_bytes());
        let (cube, header) = decode_hsc::<f64>(&bytes).unwrap();
        assert_eq!(header.fill_value, FillValue::Number(-9999.0));
        assert_eq!(header.units.as_deref(), Some("ppm_m"));
        assert_eq!(cube.data(), &[12.5]);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let cube = HyperCube::<f32>::from_data(2, 2, vec![1.0], vec![0.0; 4]).unwrap();
        let mut bytes = encode_hsc(&cube, None);
        bytes.truncate(bytes.len() - 1);
        assert!(matches!(decode_hsc::<f32>(&bytes), Err(FormatError::Truncated { .. })));
        bytes[0] = b'X';
        assert!(matches!(decode_hsc::<f32>(&bytes), Err(FormatError::BadMagic { .. })));
    }

    proptest! {
        #[test]
        fn round_trip(rows in 1usize..6, cols in 1usize..6, bands in 1usize..4, seed in any::<u64>()) {
            let mut rng = crate::rng::SeededRng::new(seed);
            let n = rows * cols;
            let data = (0..n * bands).map(|_| rng.uniform(-1e3, 1e3) as f32).collect();
            let valid = (0..n).map(|_| rng.next_f64() < 0.8).collect();
            let w = (0..bands).map(|b| 400.0 + b as f64).collect();
            let cube = HyperCube::<f32>::new(rows, cols, w, data, valid).unwrap();
            let bytes = encode_hsc(&cube, Some("radiance"));
            let (back, _) = decode_hsc::<f32>(&bytes).unwrap();
            prop_assert_eq!(back.valid_mask(), cube.valid_mask());
            prop_assert_eq!(encode_hsc(&back, Some("radiance")), bytes);
        }
    }
}
