//! Minimal writer for NPY files (format version 1.0) holding complex doubles.
//!
//! Kept deliberately tiny: one dtype, little-endian, C order. Enough for a
//! numpy or scipy session to load dumped operators without extra tooling.

use crate::{C64, Error, Result};
use std::path::Path;

/// Writes `data` in C order as a `<c16` NPY file with the given shape.
pub fn write_complex(path: &Path, shape: &[usize], data: &[C64]) -> Result<()> {
    let count: usize = shape.iter().product();
    if count != data.len() {
        return Err(Error::GridMismatch {
            detail: format!("shape {shape:?} holds {count} elements, buffer has {}", data.len()),
        });
    }
    let shape_txt = if shape.len() == 1 {
        format!("({},)", shape[0])
    } else {
        format!("({})", shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "))
    };
    let mut header = format!("{{'descr': '<c16', 'fortran_order': False, 'shape': {shape_txt}, }}");
    // magic (6) + version (2) + header length (2) + header must align to 64
    let prelude = 10;
    let pad = (64 - (prelude + header.len() + 1) % 64) % 64;
    header.extend(std::iter::repeat(' ').take(pad));
    header.push('\n');

    let mut buf = Vec::with_capacity(prelude + header.len() + data.len() * 16);
    buf.extend_from_slice(b"\x93NUMPY");
    buf.extend_from_slice(&[1, 0]);
    buf.extend_from_slice(&(header.len() as u16).to_le_bytes());
    buf.extend_from_slice(header.as_bytes());
    for c in data {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    std::fs::write(path, &buf)?;
    Ok(())
}
