//! Binary field snapshots.
//!
//! Layout: a 32-byte header (`b"DRL1"`, `u32 d`, `u32 n`, `f64 L`,
//! `u8` representation, zero padding) followed by `n^d` little-endian
//! `(re, im)` `f64` pairs in storage order.

use num_complex::Complex64;
use std::io::{Read, Write};

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"DRL1";
const HEADER_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum Snapshot {
    Physical(PhysicalField),
    Spectral(SpectralField),
}

impl Snapshot {
    fn parts(&self) -> (&Grid, &[Complex64], u8) {
        match self {
            Snapshot::Physical(f) => (f.grid(), f.data(), 0),
            Snapshot::Spectral(f) => (f.grid(), f.data(), 1),
        }
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let (grid, data, tag) = self.parts();
        let mut header = [0u8; HEADER_LEN];
        header[..4].copy_from_slice(MAGIC);
        header[4..8].copy_from_slice(&(grid.dim() as u32).to_le_bytes());
        header[8..12].copy_from_slice(&(grid.n() as u32).to_le_bytes());
        header[12..20].copy_from_slice(&grid.half_width().to_le_bytes());
        header[20] = tag;
        w.write_all(&header)?;
        let mut body = Vec::with_capacity(data.len() * 16);
        for v in data {
            body.extend_from_slice(&v.re.to_le_bytes());
            body.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&body)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[..4] != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        let dim = u32_at(4) as usize;
        let n = u32_at(8) as usize;
        let half_width = f64::from_le_bytes(header[12..20].try_into().unwrap());
        let grid = Grid::new(dim, n, half_width)?;
        let mut body = vec![0u8; grid.len() * 16];
        r.read_exact(&mut body)?;
        let data = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        match header[20] {
            0 => Ok(Snapshot::Physical(PhysicalField::from_vec(grid, data)?)),
            1 => Ok(Snapshot::Spectral(SpectralField::from_vec(grid, data)?)),
            t => Err(Error::Snapshot(format!("unknown representation tag {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = Grid::new(2, 8, 1.5).unwrap();
        let f = SpectralField::from_fn(grid, |xi| Complex64::new(xi[0], -xi[1] * 0.5));
        let snap = Snapshot::Spectral(f);
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 64 * 16);
        assert_eq!(&buf[..4], b"DRL1");
        let back = Snapshot::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, snap);
    }

    #[test]
    fn rejects_bad_magic() {
        let buf = vec![0u8; 64];
        assert!(Snapshot::read_from(buf.as_slice()).is_err());
    }
}
