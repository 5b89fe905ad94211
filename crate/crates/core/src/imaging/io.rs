use std::fs;
use std::path::Path;

use super::{GrayFrame, ImagingError};

/// Loads a binary PGM (`P5`, maxval 255) or an 8-bit grayscale PNG.
/// Color inputs are rejected, not converted.
pub fn load_frame(path: impl AsRef<Path>) -> Result<GrayFrame, ImagingError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImagingError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        Err(ImagingError::UnsupportedFormat(format!(
            "{}: neither binary PGM nor PNG",
            path.display()
        )))
    }
}

pub fn save_pgm(frame: &GrayFrame, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(frame)).map_err(|source| ImagingError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn encode_pgm(frame: &GrayFrame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.pixels());
    out
}

/// Header tokens are whitespace separated; `#` comments run to end of line.
/// Exactly one whitespace byte separates maxval from the raster.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayFrame, ImagingError> {
    let bad = |msg: &str| ImagingError::UnsupportedFormat(format!("PGM: {msg}"));
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if tokens[0] != "P5" {
        return Err(bad("only binary P5 is supported"));
    }
    let parse = |t: &str| t.parse::<usize>().map_err(|_| bad("non-numeric header field"));
    let (width, height, maxval) = (parse(tokens[1])?, parse(tokens[2])?, parse(tokens[3])?);
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    if pos >= bytes.len() {
        return Err(bad("missing raster"));
    }
    let raster = &bytes[pos + 1..];
    GrayFrame::new(width, height, raster.to_vec())
}

fn decode_png(bytes: &[u8]) -> Result<GrayFrame, ImagingError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?;
    match img {
        image::DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            GrayFrame::new(w as usize, h as usize, buf.into_raw())
        }
        other => Err(ImagingError::UnsupportedFormat(format!(
            "PNG must be 8-bit grayscale without alpha, got {:?}",
            other.color()
        ))),
    }
}
