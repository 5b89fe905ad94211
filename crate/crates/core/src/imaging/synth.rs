use serde::{Deserialize, Serialize};

use super::GrayFrame;
use crate::rng::{domain, SeedStream};

/// Synthetic eye crop: a dark iris disc on a bright sclera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticEyeSpec {
    pub width: usize,
    pub height: usize,
    pub center: (f64, f64),
    pub radius: f64,
    pub sclera: u8,
    pub iris: u8,
    pub noise_sigma: f64,
    /// Fraction of the iris diameter hidden by an eyelid band coming down
    /// from the top of the frame. `1.0` hides the whole iris.
    pub occlusion: f64,
    pub seed: u64,
}

impl Default for SyntheticEyeSpec {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            center: (32.0, 32.0),
            radius: 10.0,
            sclera: 220,
            iris: 40,
            noise_sigma: 0.0,
            occlusion: 0.0,
            seed: 0,
        }
    }
}

/// Renders `spec`. Pixel `(x, y)` belongs to the iris when
/// `(x − cx)² + (y − cy)² ≤ r²`; noise is added per pixel in row-major
/// order and the result rounded and clamped to `[0, 255]`.
pub fn render_synthetic_eye(spec: &SyntheticEyeSpec) -> GrayFrame {
    let (cx, cy) = spec.center;
    let r2 = spec.radius * spec.radius;
    let lid_bottom = cy - spec.radius + spec.occlusion.clamp(0.0, 1.0) * 2.0 * spec.radius;
    let occluded = spec.occlusion > 0.0;
    let mut rng = SeedStream::new(spec.seed, domain::IMAGE_NOISE, 0);
    let mut pixels = Vec::with_capacity(spec.width * spec.height);
    for y in 0..spec.height {
        for x in 0..spec.width {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let mut v = if dx * dx + dy * dy <= r2 { spec.iris } else { spec.sclera } as f64;
            if occluded && (y as f64) <= lid_bottom {
                v = spec.sclera as f64;
            }
            if spec.noise_sigma > 0.0 {
                v += rng.normal(0.0, spec.noise_sigma);
            }
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayFrame::new(spec.width, spec.height, pixels).expect("spec dimensions are non-zero")
}
