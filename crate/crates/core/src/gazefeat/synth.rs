use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{extract_features, FeatureConfig, FeatureError, GazeDataset};
use crate::pupiltrack::{Eye, GazeSample, GazeTrace};
use crate::rng::{domain, SeedStream};
use crate::Label;

/// Viewing behaviour simulated by [`synth_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TraceKind {
    Reading,
    Viewing,
}

impl TraceKind {
    pub fn label(self) -> Label {
        match self {
            TraceKind::Reading => Label::Text,
            TraceKind::Viewing => Label::Image,
        }
    }

    fn stream(self) -> u64 {
        match self {
            TraceKind::Reading => 0,
            TraceKind::Viewing => 1,
        }
    }
}

impl FromStr for TraceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "READING" => Ok(TraceKind::Reading),
            "VIEWING" => Ok(TraceKind::Viewing),
            other => Err(format!("unknown trace kind {other:?} (expected READING or VIEWING)")),
        }
    }
}

// Stimulus area, in gaze pixels.
const LEFT: f64 = 40.0;
const RIGHT: f64 = 360.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 260.0;
const EYE_JITTER: f64 = 0.25;
const BLINKS_PER_SECOND: f64 = 0.25;

fn samples_for(ms: f64, fps: f64) -> usize {
    ((ms * fps / 1000.0).round() as usize).max(1)
}

/// Fixation points with dwell lengths (in samples) and the per-trace
/// drift scales `(σx, σy)`.
struct Script {
    fixations: Vec<((f64, f64), usize)>,
    drift: (f64, f64),
}

fn reading_script(rng: &mut SeedStream, n: usize, fps: f64) -> Script {
    let sigma_h = rng.uniform_range(0.8, 1.2);
    let drift = (sigma_h, sigma_h * rng.uniform_range(0.5, 0.8));
    let pause_p = rng.uniform_range(0.0, 0.35);
    let line_spacing = rng.uniform_range(12.0, 18.0);
    // readers differ in pace, so the shortest dwell varies per trace
    let shortest_ms = rng.uniform_range(200.0, 300.0);
    let (mut x, mut y) = (LEFT, TOP);
    let mut fixations = Vec::new();
    let mut total = 0;
    while total < n {
        let ms = if rng.uniform() < pause_p { rng.uniform_range(700.0, 2500.0) } else { rng.uniform_range(shortest_ms, shortest_ms + 200.0) };
        let dwell = samples_for(ms, fps);
        fixations.push(((x, y), dwell));
        total += dwell;
        x += rng.uniform_range(20.0, 45.0);
        if x > RIGHT {
            x = LEFT + rng.uniform_range(0.0, 10.0);
            y += line_spacing;
            if y > BOTTOM {
                y = TOP;
            }
        }
    }
    Script { fixations, drift }
}

fn viewing_script(rng: &mut SeedStream, n: usize, fps: f64) -> Script {
    let sigma_v = rng.uniform_range(0.8, 1.2);
    let drift = (sigma_v * rng.uniform_range(0.4, 0.9), sigma_v);
    let short_p = rng.uniform_range(0.2, 0.85);
    let n_clusters = rng.int_inclusive(5, 15) as usize;
    let mut centres: Vec<(f64, f64)> = Vec::new();
    for _ in 0..n_clusters {
        // spread clusters out; give up on spacing after a few tries
        let mut c = (0.0, 0.0);
        for _ in 0..20 {
            c = (rng.uniform_range(LEFT, RIGHT), rng.uniform_range(TOP, BOTTOM));
            if centres.iter().all(|p| ((p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)).sqrt() >= 50.0) {
                break;
            }
        }
        centres.push(c);
    }
    let mut fixations = Vec::new();
    let mut total = 0;
    let mut current = rng.index(n_clusters);
    while total < n {
        let visits = 1 + rng.index(4);
        for _ in 0..visits {
            let angle = rng.uniform_range(0.0, std::f64::consts::TAU);
            let offset = rng.uniform_range(0.0, 25.0);
            let c = centres[current];
            let p = (c.0 + offset * angle.cos(), c.1 + offset * angle.sin());
            let ms = if rng.uniform() < short_p { rng.uniform_range(200.0, 500.0) } else { rng.uniform_range(500.0, 3000.0) };
            let dwell = samples_for(ms, fps);
            fixations.push((p, dwell));
            total += dwell;
        }
        if n_clusters > 1 {
            current = (current + 1 + rng.index(n_clusters - 1)) % n_clusters;
        }
    }
    Script { fixations, drift }
}

/// Seeded left/right gaze traces for a reading or an image-viewing session.
///
/// Reading walks left-to-right along text lines with fixations spanning a
/// 200 ms window that starts at a per-trace shortest dwell of 200–300 ms,
/// occasional long pauses and line returns; fixational drift is wider
/// horizontally than vertically. Viewing visits 5–15 spread-out clusters
/// with mostly long dwells (0.5–3 s), some short ones, isotropic jumps and
/// vertically wider drift. Both eyes follow the same path with independent
/// isotropic jitter (σ = 0.25 px) and share blinks, which appear as invalid
/// samples. Frames are numbered from 0.
pub fn synth_trace(kind: TraceKind, duration_s: f64, fps: f64, seed: u64) -> (GazeTrace, GazeTrace) {
    let n = ((duration_s * fps).round() as usize).max(1);
    let mut rng = SeedStream::new(seed, domain::TRACE_SYNTH, kind.stream());
    let script = match kind {
        TraceKind::Reading => reading_script(&mut rng, n, fps),
        TraceKind::Viewing => viewing_script(&mut rng, n, fps),
    };
    let mut path = Vec::with_capacity(n);
    'outer: for &((fx, fy), dwell) in &script.fixations {
        for _ in 0..dwell {
            if path.len() == n {
                break 'outer;
            }
            path.push((fx + rng.normal(0.0, script.drift.0), fy + rng.normal(0.0, script.drift.1)));
        }
    }
    let mut valid = vec![true; n];
    let p_blink = BLINKS_PER_SECOND / fps;
    let mut t = 0;
    while t < n {
        if rng.uniform() < p_blink {
            let len = samples_for(rng.uniform_range(100.0, 200.0), fps);
            valid[t..(t + len).min(n)].iter_mut().for_each(|v| *v = false);
            t += len;
        } else {
            t += 1;
        }
    }
    let eye_trace = |eye: Eye, stream: &mut SeedStream| {
        let mut last = path[0];
        let samples = path
            .iter()
            .zip(&valid)
            .enumerate()
            .map(|(i, (&(x, y), &ok))| {
                let jittered = (x + stream.normal(0.0, EYE_JITTER), y + stream.normal(0.0, EYE_JITTER));
                if ok {
                    last = jittered;
                }
                GazeSample { frame_index: i, x: last.0, y: last.1, valid: ok }
            })
            .collect();
        GazeTrace { eye, fps, samples }
    };
    let mut left_rng = SeedStream::new(seed, domain::TRACE_SYNTH, 2 + 2 * kind.stream());
    let mut right_rng = SeedStream::new(seed, domain::TRACE_SYNTH, 3 + 2 * kind.stream());
    let left = eye_trace(Eye::Left, &mut left_rng);
    let right = eye_trace(Eye::Right, &mut right_rng);
    (left, right)
}

/// Seed of the `i`-th trace pair of a synthetic dataset.
pub fn dataset_trace_seed(seed: u64, i: usize) -> u64 {
    SeedStream::new(seed, domain::TRACE_SYNTH, 0x8000_0000 + i as u64).next_u64()
}

/// `per_class` reading (TEXT) and viewing (IMAGE) rows, interleaved. Row
/// pair `i` uses trace seed [`dataset_trace_seed`]`(seed, i)` for both kinds.
pub fn synth_dataset(per_class: usize, duration_s: f64, fps: f64, seed: u64, cfg: &FeatureConfig) -> Result<GazeDataset, FeatureError> {
    let mut rows = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        let s = dataset_trace_seed(seed, i);
        for kind in [TraceKind::Reading, TraceKind::Viewing] {
            let (l, r) = synth_trace(kind, duration_s, fps, s);
            rows.push(extract_features(&l, &r, cfg)?.with_label(kind.label()));
        }
    }
    Ok(GazeDataset { rows, source: format!("synthetic reading/viewing traces, {duration_s} s at {fps} fps"), seed: Some(seed) })
}
