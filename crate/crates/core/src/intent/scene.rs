use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IntentError;
use crate::imaging::{save_pgm, GrayFrame};
use crate::rng::{domain, SeedStream};

/// A noise-free cartoon face with scripted iris motion, for exercising the
/// frame pipeline against known pupil positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceSceneSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub fps: f64,
    pub seed: u64,
    pub face_center: (f64, f64),
    /// Semi-axes of the face ellipse.
    pub face_axes: (f64, f64),
    /// Eye centers relative to the face center, mirrored in x.
    pub eye_offset: (f64, f64),
    /// Semi-axes of each sclera ellipse.
    pub sclera_axes: (f64, f64),
    pub iris_radius: f64,
    /// Maximal gaze displacement of the iris from the eye center.
    pub gaze_range: (f64, f64),
    /// Fixation length range in ms.
    pub dwell_ms: (f64, f64),
    pub blink_rate_hz: f64,
    pub blink_frames: (usize, usize),
    pub background: u8,
    pub skin: u8,
    pub sclera: u8,
    pub iris: u8,
    pub brow: u8,
    pub mouth: u8,
}

impl Default for FaceSceneSpec {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            frames: 150,
            fps: 30.0,
            seed: 11,
            face_center: (160.0, 125.0),
            face_axes: (76.0, 92.0),
            eye_offset: (27.0, -18.0),
            sclera_axes: (15.0, 9.0),
            iris_radius: 7.0,
            gaze_range: (6.0, 2.0),
            dwell_ms: (150.0, 500.0),
            blink_rate_hz: 0.4,
            blink_frames: (3, 5),
            background: 60,
            skin: 120,
            sclera: 230,
            iris: 30,
            brow: 40,
            mouth: 80,
        }
    }
}

/// Rendered frames plus the iris centers they were drawn with.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceScene {
    pub frames: Vec<GrayFrame>,
    /// Iris center of the eye on the image-left side (the subject's right).
    pub truth_right: Vec<(f64, f64)>,
    /// Iris center of the eye on the image-right side (the subject's left).
    pub truth_left: Vec<(f64, f64)>,
    pub blink: Vec<bool>,
}

impl FaceSceneSpec {
    /// Eye centers `(image-left, image-right)`.
    pub fn eye_centers(&self) -> ((f64, f64), (f64, f64)) {
        let (cx, cy) = self.face_center;
        let (dx, dy) = self.eye_offset;
        ((cx - dx, cy + dy), (cx + dx, cy + dy))
    }
}

fn inside(x: f64, y: f64, c: (f64, f64), axes: (f64, f64)) -> bool {
    let (u, v) = ((x - c.0) / axes.0, (y - c.1) / axes.1);
    u * u + v * v <= 1.0
}

/// Gaze offsets per frame (piecewise constant fixations) and blink flags.
fn script(spec: &FaceSceneSpec) -> (Vec<(f64, f64)>, Vec<bool>) {
    let mut rng = SeedStream::new(spec.seed, domain::SCENE_SYNTH, 0);
    let mut gaze = Vec::with_capacity(spec.frames);
    while gaze.len() < spec.frames {
        let ms = rng.uniform_range(spec.dwell_ms.0, spec.dwell_ms.1);
        let n = ((ms * spec.fps / 1000.0).round() as usize).max(1);
        let target = (
            rng.uniform_range(-spec.gaze_range.0, spec.gaze_range.0),
            rng.uniform_range(-spec.gaze_range.1, spec.gaze_range.1),
        );
        gaze.extend(std::iter::repeat_n(target, n));
    }
    gaze.truncate(spec.frames);
    let mut blink = vec![false; spec.frames];
    let p = spec.blink_rate_hz / spec.fps;
    let mut i = 0;
    while i < spec.frames {
        if rng.uniform() < p {
            let len = rng.int_inclusive(spec.blink_frames.0 as i64, spec.blink_frames.1 as i64) as usize;
            for b in blink.iter_mut().skip(i).take(len) {
                *b = true;
            }
            i += len + 1;
        } else {
            i += 1;
        }
    }
    (gaze, blink)
}

pub fn render_face_scene(spec: &FaceSceneSpec) -> FaceScene {
    let (gaze, blink) = script(spec);
    let (er, el) = spec.eye_centers();
    let (cx, cy) = spec.face_center;
    let (sa, sb) = spec.sclera_axes;
    let mut frames = Vec::with_capacity(spec.frames);
    let mut truth_right = Vec::with_capacity(spec.frames);
    let mut truth_left = Vec::with_capacity(spec.frames);
    for (g, &closed) in gaze.iter().zip(&blink) {
        let ir = (er.0 + g.0, er.1 + g.1);
        let il = (el.0 + g.0, el.1 + g.1);
        truth_right.push(ir);
        truth_left.push(il);
        let r2 = spec.iris_radius * spec.iris_radius;
        let frame = GrayFrame::from_fn(spec.width, spec.height, |x, y| {
            let (x, y) = (x as f64, y as f64);
            if !inside(x, y, spec.face_center, spec.face_axes) {
                return spec.background;
            }
            for (eye, iris) in [(er, ir), (el, il)] {
                let brow_y = eye.1 - sb - 12.0;
                if (x - eye.0).abs() <= sa + 2.0 && (y - brow_y).abs() <= 2.0 {
                    return spec.brow;
                }
                if (x - eye.0).abs() <= sa && (y - eye.1).abs() <= sb {
                    if closed {
                        return spec.skin;
                    }
                    if inside(x, y, eye, (sa, sb)) {
                        let (dx, dy) = (x - iris.0, y - iris.1);
                        return if dx * dx + dy * dy <= r2 { spec.iris } else { spec.sclera };
                    }
                }
            }
            if inside(x, y, (cx, cy + 0.5 * spec.face_axes.1), (0.3 * spec.face_axes.0, 0.07 * spec.face_axes.1)) {
                return spec.mouth;
            }
            spec.skin
        });
        frames.push(frame);
    }
    FaceScene { frames, truth_right, truth_left, blink }
}

/// Writes frames as `frame_00000.pgm`, … into `dir` (created if missing).
pub fn write_frames(frames: &[GrayFrame], dir: &Path) -> Result<Vec<PathBuf>, IntentError> {
    std::fs::create_dir_all(dir).map_err(|e| IntentError::Io { path: dir.to_path_buf(), source: e })?;
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let p = dir.join(format!("frame_{i:05}.pgm"));
            save_pgm(f, &p)?;
            Ok(p)
        })
        .collect()
}
