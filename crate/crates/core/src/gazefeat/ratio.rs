use serde::{Deserialize, Serialize};

use super::{FeatureError, FixationEvent};
use crate::pupiltrack::GazeTrace;

/// Which consecutive-sample pairs feed the movement ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MrScope {
    All,
    /// Pairs lying inside one fixation are skipped.
    SaccadesOnly,
}

/// Horizontal and vertical scan counts. Each pair of adjacent, valid
/// samples with `max(|dx|, |dy|) ≥ threshold` is one scan, horizontal when
/// `|dx| ≥ |dy|`. Pairs inside any of `exclude` are not counted.
pub fn scan_counts(
    trace: &GazeTrace,
    threshold: f64,
    exclude: Option<&[FixationEvent]>,
) -> Result<(usize, usize), FeatureError> {
    let valid = trace.valid_count();
    if valid < 2 {
        return Err(FeatureError::TooFewValid(valid));
    }
    let inside = |a: usize, b: usize| {
        exclude.is_some_and(|ev| {
            // events are ordered; find the last one starting at or before a
            let k = ev.partition_point(|e| e.start_index <= a);
            k > 0 && b <= ev[k - 1].end_index
        })
    };
    let (mut h, mut v) = (0, 0);
    for w in trace.samples.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        if !p.valid || !q.valid || inside(p.frame_index, q.frame_index) {
            continue;
        }
        let (dx, dy) = ((q.x - p.x).abs(), (q.y - p.y).abs());
        if dx.max(dy) < threshold {
            continue;
        }
        if dx >= dy {
            h += 1;
        } else {
            v += 1;
        }
    }
    Ok((h, v))
}

/// `H / max(V, 1)` over all adjacent valid pairs.
pub fn movement_ratio(trace: &GazeTrace, threshold: f64) -> Result<f64, FeatureError> {
    let (h, v) = scan_counts(trace, threshold, None)?;
    Ok(h as f64 / v.max(1) as f64)
}
