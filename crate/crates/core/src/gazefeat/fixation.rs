use serde::{Deserialize, Serialize};

use crate::pupiltrack::GazeTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationConfig {
    /// Largest allowed `(max x − min x) + (max y − min y)`, px.
    pub dispersion_threshold: f64,
    pub min_duration_ms: f64,
    pub fps: f64,
}

impl Default for FixationConfig {
    fn default() -> Self {
        Self { dispersion_threshold: 15.0, min_duration_ms: 200.0, fps: 30.0 }
    }
}

impl FixationConfig {
    /// Fewest samples spanning `min_duration_ms`: 6 at 30 fps.
    pub fn min_samples(&self) -> usize {
        ((self.min_duration_ms * self.fps / 1000.0 - 1e-9).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationEvent {
    /// Frame indices of the first and last sample, inclusive.
    pub start_index: usize,
    pub end_index: usize,
    pub centroid: (f64, f64),
    pub point_count: usize,
    pub dispersion: f64,
}

#[derive(Clone, Copy)]
struct Bounds {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Bounds {
    fn point(x: f64, y: f64) -> Self {
        Self { min_x: x, max_x: x, min_y: y, max_y: y }
    }

    fn with(self, x: f64, y: f64) -> Self {
        Self { min_x: self.min_x.min(x), max_x: self.max_x.max(x), min_y: self.min_y.min(y), max_y: self.max_y.max(y) }
    }

    fn dispersion(&self) -> f64 {
        (self.max_x - self.min_x) + (self.max_y - self.min_y)
    }
}

/// Dispersion-threshold fixation identification.
///
/// A window of `min_samples` valid samples starting at the current position
/// becomes a fixation if its dispersion is within the threshold; it then
/// grows one sample at a time while it stays within. Otherwise the start
/// moves one sample on. Invalid samples never join a window.
pub fn segment_fixations(trace: &GazeTrace, cfg: &FixationConfig) -> Vec<FixationEvent> {
    let s = &trace.samples;
    let n = s.len();
    let min_n = cfg.min_samples();
    let mut events = Vec::new();
    let mut i = 0;
    while i + min_n <= n {
        if let Some(bad) = (i..i + min_n).rev().find(|&k| !s[k].valid) {
            i = bad + 1;
            continue;
        }
        let mut b = Bounds::point(s[i].x, s[i].y);
        for p in &s[i + 1..i + min_n] {
            b = b.with(p.x, p.y);
        }
        if b.dispersion() > cfg.dispersion_threshold {
            i += 1;
            continue;
        }
        let mut j = i + min_n;
        while j < n && s[j].valid {
            let grown = b.with(s[j].x, s[j].y);
            if grown.dispersion() > cfg.dispersion_threshold {
                break;
            }
            b = grown;
            j += 1;
        }
        let count = j - i;
        let (sx, sy) = s[i..j].iter().fold((0.0, 0.0), |a, p| (a.0 + p.x, a.1 + p.y));
        events.push(FixationEvent {
            start_index: s[i].frame_index,
            end_index: s[j - 1].frame_index,
            centroid: (sx / count as f64, sy / count as f64),
            point_count: count,
            dispersion: b.dispersion(),
        });
        i = j;
    }
    events
}

/// `(max, min, mean)` of the events' point counts; `(0, 0, 0.0)` when there
/// are none.
pub fn fixation_count_stats(events: &[FixationEvent]) -> (u32, u32, f64) {
    if events.is_empty() {
        return (0, 0, 0.0);
    }
    let max = events.iter().map(|e| e.point_count).max().unwrap_or(0);
    let min = events.iter().map(|e| e.point_count).min().unwrap_or(0);
    let mean = events.iter().map(|e| e.point_count as f64).sum::<f64>() / events.len() as f64;
    (max as u32, min as u32, mean)
}
