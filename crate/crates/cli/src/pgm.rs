//! Binary PGM (P5, maxval 255) frames.

use std::io::{Read, Write};
use std::path::Path;

use ptd_core::raster::Frame;

use crate::error::{io_at, CliError, Result};

pub fn write(path: &Path, frame: &Frame) -> Result<()> {
    let r = frame.resolution;
    let mut buf = Vec::with_capacity(32 + frame.pixels.len());
    buf.extend_from_slice(format!("P5\n{r} {r}\n255\n").as_bytes());
    buf.extend_from_slice(&frame.pixels);
    let mut file = io_at(path, std::fs::File::create(path))?;
    io_at(path, file.write_all(&buf))
}

pub fn read(path: &Path) -> Result<Frame> {
    let mut bytes = Vec::new();
    io_at(
        path,
        io_at(path, std::fs::File::open(path))?.read_to_end(&mut bytes),
    )?;
    parse(&bytes).map_err(|msg| CliError::data(format!("{}: {msg}", path.display())))
}

fn parse(bytes: &[u8]) -> std::result::Result<Frame, String> {
    let mut pos = 0usize;
    let mut token = || -> std::result::Result<String, String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err("not a binary PGM (want P5)".into());
    }
    let width: usize = token()?.parse().map_err(|_| "bad width".to_string())?;
    let height: usize = token()?.parse().map_err(|_| "bad height".to_string())?;
    let maxval: usize = token()?.parse().map_err(|_| "bad maxval".to_string())?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval} (want 255)"));
    }
    if width != height {
        return Err(format!("frames must be square, got {width} x {height}"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let pixels = bytes
        .get(pos..pos + width * height)
        .ok_or("truncated raster")?
        .to_vec();
    Ok(Frame {
        resolution: width,
        pixels,
    })
}

/// Frame file name for a 1-based frame number: `frame_0001.pgm`, ...
pub fn frame_name(n: usize) -> String {
    format!("frame_{n:04}.pgm")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        let frame = Frame {
            resolution: 3,
            pixels: vec![0, 10, 255, 128, 9, 3, 200, 201, 202],
        };
        write(&path, &frame).unwrap();
        let back = read(&path).unwrap();
        assert_eq!(frame, back);
        // Writing the parsed frame again reproduces identical bytes.
        let path2 = dir.path().join("g.pgm");
        write(&path2, &back).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn rejects_non_p5() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        std::fs::write(&path, b"P2\n2 2\n255\n0 0 0 0\n").unwrap();
        assert!(read(&path).is_err());
    }
}
