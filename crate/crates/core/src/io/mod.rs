//! Binary container formats.
//!
//! Both formats share a layout: 8 magic bytes, a little-endian `u32` header
//! length, a compact UTF-8 JSON header, then a little-endian payload.

mod glt;
mod hsc;

pub use glt::{decode_glt, encode_glt, load_glt, save_glt, GLT_MAGIC};
pub use hsc::{decode_hsc, encode_hsc, load_hsc, save_hsc, FillValue, HscHeader, HSC_MAGIC};

use std::io::Read;

use crate::error::FormatError;

pub(crate) fn read_framed_header(
    r: &mut impl Read,
    magic: &'static [u8; 8],
    name: &'static str,
) -> Result<Vec<u8>, FormatError> {
    let mut m = [0u8; 8];
    r.read_exact(&mut m)?;
    if &m != magic {
        return Err(FormatError::BadMagic { expected: name });
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_le_bytes(len) as usize;
    let mut header = vec![0u8; len];
    r.read_exact(&mut header)?;
    Ok(header)
}

pub(crate) fn read_payload(r: &mut impl Read, expected: usize) -> Result<Vec<u8>, FormatError> {
    let mut buf = Vec::with_capacity(expected);
    r.take(expected as u64).read_to_end(&mut buf)?;
    if buf.len() != expected {
        return Err(FormatError::Truncated {
            expected,
            actual: buf.len(),
        });
    }
    Ok(buf)
}
