//! Flat binary field container.
//!
//! Header: `d: u64, N: u64, L: f64, n: u64, representation: u64 (0 physical, 1 frequency), time: f64`,
//! then `(re, im)` pairs as little-endian `f64`, component-major.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{GridField, PeriodicGrid, Representation, SpectralError};

pub fn write_snapshot(
    field: &GridField,
    time: f64,
    mut w: impl Write,
) -> Result<(), SpectralError> {
    let tag: u64 = match field.representation {
        Representation::Physical => 0,
        Representation::Frequency => 1,
    };
    w.write_all(&(field.grid.d as u64).to_le_bytes())?;
    w.write_all(&(field.grid.n as u64).to_le_bytes())?;
    w.write_all(&field.grid.half_width.to_le_bytes())?;
    w.write_all(&(field.components as u64).to_le_bytes())?;
    w.write_all(&tag.to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    let mut buf = Vec::with_capacity(field.values.len() * 16);
    for v in &field.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn word(r: &mut impl Read) -> Result<[u8; 8], SpectralError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_snapshot(mut r: impl Read) -> Result<(GridField, f64), SpectralError> {
    let d = u64::from_le_bytes(word(&mut r)?) as usize;
    let n = u64::from_le_bytes(word(&mut r)?) as usize;
    let half_width = f64::from_le_bytes(word(&mut r)?);
    let components = u64::from_le_bytes(word(&mut r)?) as usize;
    let representation = match u64::from_le_bytes(word(&mut r)?) {
        0 => Representation::Physical,
        1 => Representation::Frequency,
        other => {
            return Err(SpectralError::Snapshot(format!(
                "unknown representation tag {other}"
            )))
        }
    };
    let time = f64::from_le_bytes(word(&mut r)?);
    let grid = PeriodicGrid::new(d, n, half_width)?;
    let count = components * grid.total();
    let mut raw = vec![0u8; count * 16];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((
        GridField::from_values(grid, components, values, representation)?,
        time,
    ))
}
