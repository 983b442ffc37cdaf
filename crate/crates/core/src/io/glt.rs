//! `HSGLT001` lookup-table files.
//!
//! ```text
//! "HSGLT001" | u32 LE header length
//!   | {"ortho_rows","ortho_cols","src_rows","src_cols","sentinel":0}
//!   | ortho_rows*ortho_cols pairs of i32 LE (sample + 1, line + 1)
//! ```
//!
//! Indices are one-based; the pair `(0, 0)` marks an unmapped ortho pixel.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_framed_header, read_payload};
use crate::error::{Error, FormatError, GeometryError};
use crate::geometry::{Glt, SrcPixel};

pub const GLT_MAGIC: &[u8; 8] = b"HSGLT001";

#[derive(Debug, Serialize, Deserialize)]
struct GltHeader {
    ortho_rows: usize,
    ortho_cols: usize,
    src_rows: usize,
    src_cols: usize,
    sentinel: i32,
}

pub fn encode_glt(glt: &Glt) -> Vec<u8> {
    let (ortho_rows, ortho_cols) = glt.ortho_shape();
    let (src_rows, src_cols) = glt.src_shape();
    let header = GltHeader {
        ortho_rows,
        ortho_cols,
        src_rows,
        src_cols,
        sentinel: 0,
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(12 + json.len() + 8 * glt.entries().len());
    out.extend_from_slice(GLT_MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for e in glt.entries() {
        let (s, l) = e.map_or((0, 0), |p| (p.sample as i32 + 1, p.line as i32 + 1));
        out.extend_from_slice(&s.to_le_bytes());
        out.extend_from_slice(&l.to_le_bytes());
    }
    out
}

pub fn read_glt(r: &mut impl Read) -> Result<Glt, Error> {
    let raw = read_framed_header(r, GLT_MAGIC, "HSGLT001")?;
    let h: GltHeader = serde_json::from_slice(&raw).map_err(FormatError::from)?;
    if h.sentinel != 0 {
        return Err(FormatError::Header(format!("unsupported sentinel {}", h.sentinel)).into());
    }
    let n = h.ortho_rows * h.ortho_cols;
    let payload = read_payload(r, 8 * n)?;
    let mut entries = Vec::with_capacity(n);
    for (i, pair) in payload.chunks_exact(8).enumerate() {
        let s = i32::from_le_bytes(pair[..4].try_into().unwrap());
        let l = i32::from_le_bytes(pair[4..].try_into().unwrap());
        let entry = match (s, l) {
            (0, 0) => None,
            (s, l) if s >= 1 && l >= 1 => Some(SrcPixel::new((l - 1) as u32, (s - 1) as u32)),
            _ => {
                return Err(GeometryError::OutOfRangeEntry {
                    row: i / h.ortho_cols,
                    col: i % h.ortho_cols,
                }
                .into())
            }
        };
        entries.push(entry);
    }
    Ok(Glt::new(h.ortho_rows, h.ortho_cols, h.src_rows, h.src_cols, entries)?)
}

pub fn decode_glt(bytes: &[u8]) -> Result<Glt, Error> {
    let mut cursor = bytes;
    read_glt(&mut cursor)
}

pub fn save_glt(path: &Path, glt: &Glt) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_glt(glt))?;
    w.flush()?;
    Ok(())
}

pub fn load_glt(path: &Path) -> Result<Glt, Error> {
    let mut r = BufReader::new(File::open(path).map_err(FormatError::from)?);
    read_glt(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_pairs() {
        let glt = Glt::new(1, 2, 3, 4, vec![Some(SrcPixel::new(2, 3)), None]).unwrap();
        let bytes = encode_glt(&glt);
        let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        assert_eq!(
            std::str::from_utf8(&bytes[12..12 + len]).unwrap(),
            r#"{"ortho_rows":1,"ortho_cols":2,"src_rows":3,"src_cols":4,"sentinel":0}"#
        );
        let p = &bytes[12 + len..];
        let ints: Vec<i32> = p.chunks_exact(4).map(|b| i32::from_le_bytes(b.try_into().unwrap())).collect();
        assert_eq!(ints, vec![4, 3, 0, 0]);
        assert_eq!(decode_glt(&bytes).unwrap(), glt);
    }

    #[test]
    fn corrupt_entries_are_rejected() {
        let glt = Glt::new(1, 1, 3, 4, vec![Some(SrcPixel::new(0, 0))]).unwrap();
        let mut bytes = encode_glt(&glt);
        let n = bytes.len();
        bytes[n - 4..].copy_from_slice(&9i32.to_le_bytes()); // line 9 > src_rows
        assert!(matches!(
            decode_glt(&bytes),
            Err(Error::Geometry(GeometryError::OutOfRangeEntry { row: 0, col: 0 }))
        ));
        bytes[n - 4..].copy_from_slice(&0i32.to_le_bytes()); // half sentinel
        assert!(matches!(decode_glt(&bytes), Err(Error::Geometry(_))));
    }
}
