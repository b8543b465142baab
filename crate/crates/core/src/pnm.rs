//! Binary PPM (P6) and PGM (P5) codecs with maxval 255.
//!
//! Writers always emit the canonical header `P6\n<w> <h>\n255\n`; readers
//! accept any whitespace and `#` comments between header fields.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::imaging::{Frame, GrayImage, Plane};

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("expected magic {expected}, found {found:?}")]
    BadMagic {
        expected: &'static str,
        found: String,
    },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    Maxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
}

struct Header {
    width: usize,
    height: usize,
    data_offset: usize,
}

fn parse_header(bytes: &[u8], magic: &'static str) -> Result<Header, PnmError> {
    if bytes.len() < 2 || &bytes[..2] != magic.as_bytes() {
        let found = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(PnmError::BadMagic {
            expected: magic,
            found,
        });
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(PnmError::Header(format!(
                "expected a number at byte {start}"
            )));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| PnmError::Header(format!("number out of range: {text}")))?;
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PnmError::Header("missing separator before raster".into())),
    }
    if fields[2] != 255 {
        return Err(PnmError::Maxval(fields[2]));
    }
    Ok(Header {
        width: fields[0] as usize,
        height: fields[1] as usize,
        data_offset: pos,
    })
}

fn raster<'a>(bytes: &'a [u8], header: &Header, channels: usize) -> Result<&'a [u8], PnmError> {
    let expected = header.width * header.height * channels;
    let data = &bytes[header.data_offset..];
    if data.len() < expected {
        return Err(PnmError::Truncated {
            expected,
            found: data.len(),
        });
    }
    Ok(&data[..expected])
}

/// Decodes a P6 image into an opaque frame.
pub fn decode_ppm(bytes: &[u8]) -> Result<Frame, PnmError> {
    let header = parse_header(bytes, "P6")?;
    let rgb = raster(bytes, &header, 3)?;
    Ok(Frame::from_rgb(header.width, header.height, rgb).expect("raster length checked"))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PnmError> {
    let header = parse_header(bytes, "P5")?;
    let values = raster(bytes, &header, 1)?.to_vec();
    Ok(GrayImage::new(header.width, header.height, values).expect("raster length checked"))
}

/// Encodes the RGB channels of a frame as P6; alpha is dropped.
pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.to_rgb());
    out
}

pub fn encode_pgm(img: &impl Plane) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.values());
    out
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Frame, PnmError> {
    decode_ppm(&fs::read(path)?)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PnmError> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_ppm(path: impl AsRef<Path>, frame: &Frame) -> Result<(), PnmError> {
    Ok(fs::write(path, encode_ppm(frame))?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &impl Plane) -> Result<(), PnmError> {
    Ok(fs::write(path, encode_pgm(img))?)
}
