use rayon::prelude::*;

use super::cascade::{Child, HaarCascade};
use super::group::group_rectangles_counted;
use super::{DetectError, DetectParams, Rect};
use crate::imaging::{GrayFrame, IntegralImage};

#[derive(Debug, Clone)]
struct ScaledRect {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    weight: f64,
}

#[derive(Debug, Clone)]
struct ScaledFeature {
    rects: Vec<ScaledRect>,
    tilted: bool,
}

/// A cascade with its feature rectangles resized to one window size.
struct ScaledCascade<'a> {
    cascade: &'a HaarCascade,
    features: Vec<ScaledFeature>,
    win_w: usize,
    win_h: usize,
}

fn scale_len(v: usize, s: f64) -> usize {
    ((v as f64 * s).round() as usize).max(1)
}

impl<'a> ScaledCascade<'a> {
    fn new(cascade: &'a HaarCascade, win_w: usize, win_h: usize) -> Self {
        let sx = win_w as f64 / cascade.window_width as f64;
        let sy = win_h as f64 / cascade.window_height as f64;
        let features = cascade
            .features
            .iter()
            .map(|f| {
                let rects = f
                    .rects
                    .iter()
                    .map(|r| {
                        if f.tilted {
                            // Rotated rects need one isotropic scale.
                            let x = ((r.x as f64 * sx).round() as usize).min(win_w);
                            let y = (r.y as f64 * sx).round() as usize;
                            let mut w = scale_len(r.width, sx);
                            let mut h = scale_len(r.height, sx).min(x.max(1));
                            while w > 1 && x + w > win_w {
                                w -= 1;
                            }
                            while h > 1 && y + w + h > win_h {
                                h -= 1;
                            }
                            while w > 1 && y + w + h > win_h {
                                w -= 1;
                            }
                            ScaledRect { x, y, w, h, weight: r.weight }
                        } else {
                            let x = ((r.x as f64 * sx).round() as usize).min(win_w - 1);
                            let y = ((r.y as f64 * sy).round() as usize).min(win_h - 1);
                            let w = scale_len(r.width, sx).min(win_w - x);
                            let h = scale_len(r.height, sy).min(win_h - y);
                            ScaledRect { x, y, w, h, weight: r.weight }
                        }
                    })
                    .collect();
                ScaledFeature { rects, tilted: f.tilted }
            })
            .collect();
        Self { cascade, features, win_w, win_h }
    }

    fn feature_value(&self, ii: &IntegralImage, idx: usize, ox: usize, oy: usize) -> f64 {
        let f = &self.features[idx];
        let mut v = 0.0;
        for r in &f.rects {
            let s = if f.tilted {
                let (x, y) = (ox + r.x, oy + r.y);
                if r.x < r.h || r.x + r.w > self.win_w || r.y + r.w + r.h > self.win_h {
                    continue;
                }
                ii.tilted_sum(x, y, r.w, r.h) as f64
            } else {
                ii.sum(ox + r.x, oy + r.y, r.w, r.h) as f64
            };
            v += r.weight * s;
        }
        v
    }

    /// Window normalizer `area · σ`, with variance below 1 clamped to 1.
    fn normalizer(&self, ii: &IntegralImage, x: usize, y: usize) -> f64 {
        let area = (self.win_w * self.win_h) as f64;
        let sum = ii.sum(x, y, self.win_w, self.win_h) as f64;
        let sq = ii.square_sum(x, y, self.win_w, self.win_h) as f64;
        let mean = sum / area;
        let var = (sq / area - mean * mean).max(1.0);
        area * var.sqrt()
    }

    fn passes(&self, ii: &IntegralImage, x: usize, y: usize) -> bool {
        let norm = self.normalizer(ii, x, y);
        for stage in &self.cascade.stages {
            let mut total = 0.0;
            for weak in &stage.classifiers {
                let mut idx = 0;
                loop {
                    let node = &weak.nodes[idx];
                    let v = self.feature_value(ii, node.feature, x, y) / norm;
                    match if v < node.threshold { node.left } else { node.right } {
                        Child::Node(i) => idx = i,
                        Child::Leaf(l) => {
                            total += weak.leaves[l];
                            break;
                        }
                    }
                }
            }
            if total < stage.threshold {
                return false;
            }
        }
        true
    }
}

/// Runs the cascade on one window. Feature rectangles are scaled to the
/// window size, each feature value is divided by `area · σ` of the window,
/// and the window passes when every stage sum reaches its threshold.
pub fn evaluate_window(cascade: &HaarCascade, ii: &IntegralImage, window: &Rect) -> Result<bool, DetectError> {
    if window.width == 0 || window.height == 0 || window.right() > ii.width() || window.bottom() > ii.height() {
        return Err(DetectError::WindowOutOfBounds { window: *window, width: ii.width(), height: ii.height() });
    }
    if cascade.uses_tilted() && !ii.has_tilted() {
        return Err(DetectError::InvalidCascade(
            "cascade has tilted features but the integral image has no tilted grid".into(),
        ));
    }
    Ok(ScaledCascade::new(cascade, window.width, window.height).passes(ii, window.x, window.y))
}

/// Window sizes visited by the scanner, with their strides.
fn scan_plan(cascade: &HaarCascade, frame_w: usize, frame_h: usize, params: &DetectParams) -> Vec<(usize, usize, usize)> {
    let mut plan = Vec::new();
    for k in 0.. {
        let scale = params.scale_factor.powi(k);
        let ww = (cascade.window_width as f64 * scale).round() as usize;
        let wh = (cascade.window_height as f64 * scale).round() as usize;
        if ww > frame_w || wh > frame_h || ww > params.max_size || wh > params.max_size {
            break;
        }
        if ww >= params.min_size && wh >= params.min_size {
            let stride = (scale.round() as usize).max(1);
            plan.push((ww, wh, stride));
        }
        if !(params.scale_factor > 1.0) {
            break;
        }
    }
    plan
}

/// Multi-scale sliding-window detection.
///
/// Windows of size `base · scale_factorᵏ` (rounded) inside
/// `[min_size, max_size]` are scanned with stride `max(1, round(scale))`.
/// Hits are merged by [`group_rectangles`](super::group_rectangles) unless
/// `min_neighbors == 0`, in which case every passing window is returned.
/// Output is sorted by descending group size, then by `(y, x, w, h)`.
pub fn detect_objects(frame: &GrayFrame, cascade: &HaarCascade, params: &DetectParams) -> Vec<Rect> {
    let ii = if cascade.uses_tilted() { IntegralImage::with_tilted(frame) } else { IntegralImage::new(frame) };
    let plan = scan_plan(cascade, frame.width(), frame.height(), params);
    let hits: Vec<Rect> = plan
        .par_iter()
        .map(|&(ww, wh, stride)| {
            let scaled = ScaledCascade::new(cascade, ww, wh);
            let mut found = Vec::new();
            for y in (0..=frame.height() - wh).step_by(stride) {
                for x in (0..=frame.width() - ww).step_by(stride) {
                    if scaled.passes(&ii, x, y) {
                        found.push(Rect::new(x, y, ww, wh));
                    }
                }
            }
            found
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut grouped = group_rectangles_counted(&hits, params.min_neighbors);
    grouped.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| (a.0.y, a.0.x, a.0.width, a.0.height).cmp(&(b.0.y, b.0.x, b.0.width, b.0.height))));
    grouped.into_iter().map(|(r, _)| r).collect()
}
