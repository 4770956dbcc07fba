//! The binary frame-matrix container: magic `FMAT`, two little-endian u32
//! counts N and P, then N*P little-endian f64 values row-major.

use std::io::{Read, Write};
use std::path::Path;

use ptd_core::neighbors::FrameMatrix;

use crate::error::{io_at, CliError, Result};

const MAGIC: &[u8; 4] = b"FMAT";

pub fn write(path: &Path, d: &FrameMatrix) -> Result<()> {
    let mut buf = Vec::with_capacity(12 + 8 * d.data().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(d.rows() as u32).to_le_bytes());
    buf.extend_from_slice(&(d.cols() as u32).to_le_bytes());
    for v in d.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = io_at(path, std::fs::File::create(path))?;
    io_at(path, file.write_all(&buf))
}

pub fn read(path: &Path) -> Result<FrameMatrix> {
    let mut file = io_at(path, std::fs::File::open(path))?;
    let mut header = [0u8; 12];
    io_at(path, file.read_exact(&mut header))?;
    if &header[0..4] != MAGIC {
        return Err(CliError::data(format!(
            "{}: not a frame-matrix file (bad magic)",
            path.display()
        )));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let p = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut payload = Vec::new();
    io_at(path, file.read_to_end(&mut payload))?;
    if payload.len() != n * p * 8 {
        return Err(CliError::data(format!(
            "{}: expected {} matrix bytes, found {}",
            path.display(),
            n * p * 8,
            payload.len()
        )));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    FrameMatrix::new(n, p, data).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.fmat");
        let d = FrameMatrix::from_rows(&[[1.5, -2.25, 3.0], [0.0, 255.0, 0.125]]).unwrap();
        write(&path, &d).unwrap();
        let back = read(&path).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.fmat");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x00\x01\x00\x00\x00").unwrap();
        assert!(read(&path).is_err());
    }
}
