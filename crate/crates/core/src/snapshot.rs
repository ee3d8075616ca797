//! Binary field snapshots.
//!
//! Layout (little-endian): magic `b"UPML1\0"`, three `u64` dims, `u32`
//! component id, `f64` time, `u8` dtype, then the row-major payload.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::Component;
use crate::yee::{EMState, Field3};

pub const MAGIC: &[u8; 6] = b"UPML1\0";
/// The only payload type written: IEEE-754 binary64.
pub const DTYPE_F64: u8 = 1;

pub fn write_field<W: Write>(w: &mut W, component: Component, time: f64, field: &Field3) -> Result<()> {
    w.write_all(MAGIC)?;
    for d in field.dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    w.write_all(&component.id().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    w.write_all(&[DTYPE_F64])?;
    let mut buf = Vec::with_capacity(8 * field.data.len());
    for v in &field.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Writes all six components back to back.
pub fn write_state<W: Write>(w: &mut W, state: &EMState) -> Result<()> {
    for c in Component::ALL {
        write_field(w, c, state.time(), state.field(c))?;
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<(Component, f64, Field3)> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Shape("bad snapshot magic".into()));
    }
    let mut u64b = [0u8; 8];
    let mut dims = [0usize; 3];
    for d in &mut dims {
        r.read_exact(&mut u64b)?;
        *d = u64::from_le_bytes(u64b) as usize;
    }
    let mut u32b = [0u8; 4];
    r.read_exact(&mut u32b)?;
    let component = Component::from_id(u32::from_le_bytes(u32b))
        .ok_or_else(|| Error::Shape("unknown component id".into()))?;
    r.read_exact(&mut u64b)?;
    let time = f64::from_le_bytes(u64b);
    let mut dtype = [0u8; 1];
    r.read_exact(&mut dtype)?;
    if dtype[0] != DTYPE_F64 {
        return Err(Error::Shape(format!("unsupported dtype {}", dtype[0])));
    }
    let n = dims[0] * dims[1] * dims[2];
    let mut raw = vec![0u8; 8 * n];
    r.read_exact(&mut raw)?;
    let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((component, time, Field3 { dims, data }))
}
