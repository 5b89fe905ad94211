//! Viola–Jones style cascade detection of faces and eyes, and the
//! proportional eye-region estimate that narrows the eye search.

mod cascade;
mod group;
mod regions;
mod scan;

pub use cascade::{
    parse_cascade, Child, HaarCascade, HaarFeature, Stage, TreeNode, WeakClassifier, WeightedRect,
};
pub use group::{group_rectangles, group_rectangles_counted};
pub use regions::{estimate_eye_regions, EyeRegionLayout};
pub use scan::{detect_objects, evaluate_window};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DetectError {
    #[error("malformed cascade XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("invalid cascade: {0}")]
    InvalidCascade(String),
    #[error("window {window:?} is outside the {width}x{height} frame")]
    WindowOutOfBounds { window: Rect, width: usize, height: usize },
}

/// Axis-aligned rectangle in frame pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self { x, y, width, height }
    }

    pub fn right(&self) -> usize {
        self.x + self.width
    }

    pub fn bottom(&self) -> usize {
        self.y + self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x as f64 + self.width as f64 / 2.0, self.y as f64 + self.height as f64 / 2.0)
    }

    /// Translate by a non-negative offset.
    pub fn offset(&self, dx: usize, dy: usize) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.width, self.height)
    }
}

/// Scanner settings. Sizes are window sides in pixels; a window is scanned
/// when both its width and height fall inside `[min_size, max_size]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectParams {
    pub scale_factor: f64,
    pub min_neighbors: usize,
    pub min_size: usize,
    pub max_size: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self { scale_factor: 1.1, min_neighbors: 3, min_size: 0, max_size: usize::MAX }
    }
}
