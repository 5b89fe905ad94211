use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{kalman_step, Eye, KalmanConfig, KalmanState, PupilObservation, TrackError};

/// Frame rate assumed when a trace carries no other information.
pub const DEFAULT_FPS: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub frame_index: usize,
    pub x: f64,
    pub y: f64,
    pub valid: bool,
}

/// One eye's pupil trajectory in camera pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeTrace {
    pub eye: Eye,
    pub fps: f64,
    pub samples: Vec<GazeSample>,
}

impl GazeTrace {
    /// Checks that frame indices strictly increase and points are finite.
    pub fn new(eye: Eye, fps: f64, samples: Vec<GazeSample>) -> Result<Self, TrackError> {
        if samples.windows(2).any(|w| w[1].frame_index <= w[0].frame_index) {
            return Err(TrackError::Unordered);
        }
        if let Some(s) = samples.iter().find(|s| !s.x.is_finite() || !s.y.is_finite()) {
            return Err(TrackError::NonFiniteMeasurement(s.x, s.y));
        }
        Ok(Self { eye, fps, samples })
    }

    /// Consecutive frames `0..n`, all valid.
    pub fn from_points(eye: Eye, fps: f64, points: &[(f64, f64)]) -> Self {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| GazeSample { frame_index: i, x, y, valid: true })
            .collect();
        Self { eye, fps, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.samples.iter().filter(|s| s.valid).count()
    }
}

/// For each observation, whether it sits in a run of missing frames longer
/// than `max_gap`. A run is measured in frames between the surrounding valid
/// observations (or the end of the sequence).
fn long_gaps(obs: &[PupilObservation], max_gap: usize) -> Vec<bool> {
    let mut out = vec![false; obs.len()];
    let mut i = 0;
    while i < obs.len() {
        if obs[i].valid {
            i += 1;
            continue;
        }
        let start = i;
        while i < obs.len() && !obs[i].valid {
            i += 1;
        }
        let before = if start == 0 { None } else { Some(obs[start - 1].frame_index) };
        let missing = match (before, obs.get(i)) {
            (Some(b), Some(next)) => next.frame_index - b - 1,
            (Some(b), None) => obs[i - 1].frame_index - b,
            // leading run: handled before initialization
            (None, _) => 0,
        };
        if missing > max_gap {
            out[start..i].iter_mut().for_each(|v| *v = true);
        }
    }
    out
}

/// Kalman-smooths one eye's observations.
///
/// The filter starts at rest on the first valid observation with covariance
/// `init_cov · I`; earlier samples repeat that position flagged invalid. Each
/// frame-index step is one prediction; valid observations are measurements.
/// Gaps of at most `max_gap` frames carry predicted positions and stay valid.
/// Longer gaps hold the last output position flagged invalid, and the filter
/// restarts on the next valid observation.
pub fn smooth_trace(obs: &[PupilObservation], cfg: &KalmanConfig, fps: f64) -> Result<GazeTrace, TrackError> {
    let first = obs.iter().position(|o| o.valid).ok_or(TrackError::NoValidObservation)?;
    let eye = obs[0].eye;
    if obs.iter().any(|o| o.eye != eye) || obs.windows(2).any(|w| w[1].frame_index <= w[0].frame_index) {
        return Err(TrackError::Unordered);
    }
    let long = long_gaps(obs, cfg.max_gap);
    let mut samples = Vec::with_capacity(obs.len());
    let mut state: Option<(KalmanState, usize)> = None;
    let mut last = obs[first].center;
    for (i, o) in obs.iter().enumerate() {
        if i < first {
            samples.push(GazeSample { frame_index: o.frame_index, x: last.0, y: last.1, valid: false });
            continue;
        }
        let (pos, valid) = if o.valid {
            let (next, pos) = match state.take() {
                None => {
                    let s = KalmanState::new(o.center.0, o.center.1, cfg);
                    let pos = s.position();
                    if !pos.0.is_finite() || !pos.1.is_finite() {
                        return Err(TrackError::NonFiniteMeasurement(pos.0, pos.1));
                    }
                    (s, pos)
                }
                Some((mut s, at)) => {
                    for _ in at + 1..o.frame_index {
                        s = s.predict();
                    }
                    kalman_step(&s, Some(o.center))?
                }
            };
            state = Some((next, o.frame_index));
            (pos, true)
        } else if long[i] {
            state = None;
            (last, false)
        } else {
            let (mut s, at) = state.take().expect("short gaps follow a live filter");
            for _ in at..o.frame_index {
                s = s.predict();
            }
            let pos = s.position();
            state = Some((s, o.frame_index));
            (pos, true)
        };
        last = pos;
        samples.push(GazeSample { frame_index: o.frame_index, x: pos.0, y: pos.1, valid });
    }
    Ok(GazeTrace { eye, fps, samples })
}

const TRACE_HEADER: [&str; 4] = ["frame", "x", "y", "valid"];

/// CSV `frame,x,y,valid` with `valid` as 1 or 0.
pub fn write_trace<W: Write>(trace: &GazeTrace, out: W) -> Result<(), TrackError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for s in &trace.samples {
        w.write_record([s.frame_index.to_string(), s.x.to_string(), s.y.to_string(), (s.valid as u8).to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R, eye: Eye, fps: f64) -> Result<GazeTrace, TrackError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(TRACE_HEADER) {
        return Err(TrackError::Parse { line: 1, message: format!("expected header {}", TRACE_HEADER.join(",")) });
    }
    let mut samples = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |m: &str| TrackError::Parse { line, message: m.to_string() };
        let num = |i: usize| rec[i].trim().parse::<f64>().map_err(|_| bad("non-numeric coordinate"));
        let frame_index = rec[0].trim().parse().map_err(|_| bad("bad frame index"))?;
        let valid = match rec[3].trim() {
            "1" => true,
            "0" => false,
            _ => return Err(bad("valid must be 0 or 1")),
        };
        samples.push(GazeSample { frame_index, x: num(1)?, y: num(2)?, valid });
    }
    GazeTrace::new(eye, fps, samples)
}
