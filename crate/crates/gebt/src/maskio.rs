//! Bit-packed mask blobs: a 16-byte header (`GEBM`, `u32` length, `f64`
//! ratio, little-endian) followed by LSB-first bits.

use std::fs;
use std::path::Path;

use gebt_core::PruneMask;

use crate::bundle::{pack_bits, unpack_bits};
use crate::error::{format_err, io_at, Result};

pub const MAGIC: &[u8; 4] = b"GEBM";
const HEADER: usize = 16;

pub fn encode_mask(mask: &PruneMask) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + mask.len().div_ceil(8));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(mask.len() as u32).to_le_bytes());
    out.extend_from_slice(&mask.ratio().to_le_bytes());
    out.extend(pack_bits(mask.bits()));
    out
}

pub fn decode_mask(bytes: &[u8], origin: &Path) -> Result<PruneMask> {
    if bytes.len() < HEADER || &bytes[..4] != MAGIC {
        return Err(format_err(origin, "not a mask blob"));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let ratio = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let expected = HEADER + len.div_ceil(8);
    if bytes.len() != expected {
        return Err(format_err(origin, format!("expected {expected} bytes, found {}", bytes.len())));
    }
    Ok(PruneMask::from_bits(unpack_bits(&bytes[HEADER..], len), ratio))
}

pub fn write_mask(mask: &PruneMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_mask(mask)).map_err(io_at(path))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<PruneMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(io_at(path))?;
    decode_mask(&bytes, path)
}
