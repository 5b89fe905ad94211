//! Grayscale frames and the pixel-level preprocessing used ahead of
//! detection and pupil localization.

mod filters;
mod integral;
mod io;
mod synth;

pub use filters::{equalize_histogram, pyramid_down, sobel_magnitude, threshold_invert};
pub use integral::IntegralImage;
pub use io::{load_frame, save_pgm, decode_pgm, encode_pgm};
pub use synth::{render_synthetic_eye, SyntheticEyeSpec};

use crate::detect::Rect;

#[derive(Debug, thiserror::Error)]
pub enum ImagingError {
    #[error("frame dimensions must be at least 1x1, got {width}x{height}")]
    EmptyFrame { width: usize, height: usize },
    #[error("pixel buffer holds {actual} bytes but {width}x{height} needs {expected}")]
    PayloadMismatch { width: usize, height: usize, expected: usize, actual: usize },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("frame too small for this operation: {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("rectangle {0:?} lies outside the frame")]
    OutOfBounds(Rect),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, #[source] source: std::io::Error },
    #[error("png decode error: {0}")]
    Png(#[from] image::ImageError),
}

/// 8-bit single-channel raster in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::EmptyFrame { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(ImagingError::PayloadMismatch {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    /// Frame filled with one intensity. Panics on a zero dimension.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("non-empty frame")
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("non-empty frame")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    pub fn contains(&self, r: &Rect) -> bool {
        r.width > 0 && r.height > 0 && r.right() <= self.width && r.bottom() <= self.height
    }

    pub fn crop(&self, r: &Rect) -> Result<GrayFrame, ImagingError> {
        if !self.contains(r) {
            return Err(ImagingError::OutOfBounds(*r));
        }
        let mut pixels = Vec::with_capacity(r.width * r.height);
        for y in r.y..r.bottom() {
            let row = y * self.width;
            pixels.extend_from_slice(&self.pixels[row + r.x..row + r.right()]);
        }
        GrayFrame::new(r.width, r.height, pixels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_payload() {
        assert!(GrayFrame::new(2, 2, vec![0; 3]).is_err());
        assert!(GrayFrame::new(0, 2, vec![]).is_err());
        assert!(GrayFrame::new(2, 2, vec![0; 4]).is_ok());
    }

    #[test]
    fn crop_copies_sub_rectangle() {
        let f = GrayFrame::from_fn(4, 3, |x, y| (y * 4 + x) as u8);
        let c = f.crop(&Rect::new(1, 1, 2, 2)).unwrap();
        assert_eq!(c.pixels(), &[5, 6, 9, 10]);
        assert!(f.crop(&Rect::new(3, 0, 2, 1)).is_err());
    }
}
