//! `MZWF` binary wavefunction files.
//!
//! Layout, all little-endian: magic `MZWF`, `u32` version (1), `u64` point
//! count, `f64` eps, `f64` t, `f64` x_min, `f64` x_max, then `(re, im)` `f64`
//! pairs in grid-node order.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MZWF";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DumpHeader {
    pub n_points: u64,
    pub eps: f64,
    pub t: f64,
    pub x_min: f64,
    pub x_max: f64,
}

pub fn write_dump<W: Write>(mut out: W, header: &DumpHeader, values: &[Complex<f64>]) -> std::io::Result<()> {
    assert_eq!(header.n_points as usize, values.len(), "header does not match the data");
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&header.n_points.to_le_bytes())?;
    for v in [header.eps, header.t, header.x_min, header.x_max] {
        out.write_all(&v.to_le_bytes())?;
    }
    for z in values {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_dump<R: Read>(mut input: R) -> Result<(DumpHeader, Vec<Complex<f64>>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| Error::Format(e.to_string()))?;
    let mut cur = Cursor { bytes: &bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n_points = u64::from_le_bytes(cur.take(8)?.try_into().unwrap());
    let header = DumpHeader { n_points, eps: cur.f64()?, t: cur.f64()?, x_min: cur.f64()?, x_max: cur.f64()? };
    let n = usize::try_from(n_points).map_err(|_| Error::Format("point count overflows".into()))?;
    if bytes.len() - cur.pos != n * 16 {
        return Err(Error::Format(format!("expected {} payload bytes, found {}", n * 16, bytes.len() - cur.pos)));
    }
    let values = (0..n).map(|_| Ok(Complex::new(cur.f64()?, cur.f64()?))).collect::<Result<_>>()?;
    Ok((header, values))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let s = self.bytes.get(self.pos..end).ok_or_else(|| Error::Format("truncated file".into()))?;
        self.pos = end;
        Ok(s)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let header = DumpHeader { n_points: 3, eps: 0.01, t: 2.5, x_min: -5.0, x_max: 5.0 };
        let values = vec![Complex::new(1.0, -0.0), Complex::new(f64::MIN_POSITIVE, 3.5), Complex::new(-2e-300, 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_dump(&mut buf, &header, &values).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 32 + 48);
        assert_eq!(&buf[..4], b"MZWF");
        let (h, v) = read_dump(&buf[..]).unwrap();
        assert_eq!(h, header);
        for (a, b) in v.iter().zip(&values) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let header = DumpHeader { n_points: 2, eps: 1.0, t: 0.0, x_min: 0.0, x_max: 1.0 };
        let mut buf = Vec::new();
        write_dump(&mut buf, &header, &[Complex::new(1.0, 0.0); 2]).unwrap();
        assert!(read_dump(&buf[..buf.len() - 1]).is_err());
        buf[0] = b'X';
        assert!(read_dump(&buf[..]).is_err());
    }
}
