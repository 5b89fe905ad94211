use serde::{Deserialize, Serialize};

use super::TrackError;
use crate::imaging::{sobel_magnitude, GrayFrame};

/// A circle candidate: integer centre, radius and vote count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circle {
    pub x: usize,
    pub y: usize,
    pub r: usize,
    pub votes: u32,
}

/// Offsets `(dx, dy)` whose Euclidean length rounds to `r`.
fn ring(r: usize) -> Vec<(isize, isize)> {
    let (lo, hi) = ((r as f64 - 0.5).powi(2), (r as f64 + 0.5).powi(2));
    let r = r as isize + 1;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as f64;
            if d2 >= lo && d2 < hi {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Circular Hough transform over full circles.
///
/// Pixels whose Sobel magnitude reaches `edge_threshold` vote for every
/// centre at distance `r` (rounded) for each `r` in `[r_min, r_max]`.
/// Accumulator cells with at least `vote_ratio · 2πr` votes that are maximal
/// within ±2 px and ±1 radius survive; equal-vote neighbours resolve to the
/// lowest `(r, y, x)`. Output is sorted by votes, descending.
pub fn hough_circles(
    frame: &GrayFrame,
    r_min: usize,
    r_max: usize,
    edge_threshold: f32,
    vote_ratio: f64,
) -> Result<Vec<Circle>, TrackError> {
    let (w, h) = (frame.width(), frame.height());
    if r_min < 3 || r_min > r_max || r_max > w.min(h) / 2 {
        return Err(TrackError::InvalidRadius { r_min, r_max, width: w, height: h });
    }
    let mag = sobel_magnitude(frame);
    let edges: Vec<(isize, isize)> = (0..w * h)
        .filter(|&i| mag[i] >= edge_threshold)
        .map(|i| ((i % w) as isize, (i / w) as isize))
        .collect();
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let nr = r_max - r_min + 1;
    let plane = w * h;
    let mut acc = vec![0u32; nr * plane];
    for (ri, r) in (r_min..=r_max).enumerate() {
        let offsets = ring(r);
        let layer = &mut acc[ri * plane..(ri + 1) * plane];
        for &(ex, ey) in &edges {
            for &(dx, dy) in &offsets {
                let (cx, cy) = (ex + dx, ey + dy);
                if cx >= 0 && cy >= 0 && (cx as usize) < w && (cy as usize) < h {
                    layer[cy as usize * w + cx as usize] += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    for (ri, r) in (r_min..=r_max).enumerate() {
        let min_votes = vote_ratio * std::f64::consts::TAU * r as f64;
        for y in 0..h {
            for x in 0..w {
                let v = acc[ri * plane + y * w + x];
                if v == 0 || (v as f64) < min_votes {
                    continue;
                }
                if is_local_max(&acc, (ri, y, x), (nr, h, w), v) {
                    out.push(Circle { x, y, r, votes: v });
                }
            }
        }
    }
    out.sort_by(|a, b| b.votes.cmp(&a.votes).then((a.r, a.y, a.x).cmp(&(b.r, b.y, b.x))));
    Ok(out)
}

fn is_local_max(acc: &[u32], (ri, y, x): (usize, usize, usize), (nr, h, w): (usize, usize, usize), v: u32) -> bool {
    let here = (ri, y, x);
    for rj in ri.saturating_sub(1)..=(ri + 1).min(nr - 1) {
        for yy in y.saturating_sub(2)..=(y + 2).min(h - 1) {
            for xx in x.saturating_sub(2)..=(x + 2).min(w - 1) {
                let u = acc[rj * h * w + yy * w + xx];
                if u > v || (u == v && (rj, yy, xx) < here) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{render_synthetic_eye, SyntheticEyeSpec};

    #[test]
    fn ring_size_tracks_circumference() {
        // lattice counts wobble for small radii
        for r in 3..60 {
            let n = ring(r).len() as f64;
            let c = std::f64::consts::TAU * r as f64;
            let tol = if r < 8 { 0.35 } else { 0.25 };
            assert!((n - c).abs() < tol * c, "r={r}: {n} vs {c}");
            assert!(ring(r).iter().all(|&(dx, dy)| (((dx * dx + dy * dy) as f64).sqrt().round() as usize) == r));
        }
    }

    #[test]
    fn ring_sizes_average_to_circumference() {
        let (n, c): (f64, f64) = (20..60).map(|r| (ring(r).len() as f64, std::f64::consts::TAU * r as f64)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        assert!((n / c - 1.0).abs() < 0.03, "{}", n / c);
    }

    #[test]
    fn blank_frame_has_no_circles() {
        assert!(hough_circles(&GrayFrame::filled(64, 64, 200), 6, 20, 200.0, 0.3).unwrap().is_empty());
    }

    #[test]
    fn radius_range_checked() {
        let f = GrayFrame::filled(40, 30, 0);
        assert!(hough_circles(&f, 2, 10, 1.0, 0.3).is_err());
        assert!(hough_circles(&f, 8, 7, 1.0, 0.3).is_err());
        assert!(hough_circles(&f, 5, 16, 1.0, 0.3).is_err());
        assert!(hough_circles(&f, 5, 15, 1.0, 0.3).is_ok());
    }

    #[test]
    fn single_disc_recovered() {
        let f = render_synthetic_eye(&SyntheticEyeSpec::default());
        let c = hough_circles(&f, 6, 20, 200.0, 0.3).unwrap();
        let top = c[0];
        assert!((top.x as i64 - 32).abs() <= 1 && (top.y as i64 - 32).abs() <= 1, "{top:?}");
        assert!((top.r as i64 - 10).abs() <= 1, "{top:?}");
    }

    #[test]
    fn two_discs_recovered() {
        let f = GrayFrame::from_fn(64, 64, |x, y| {
            let d = |cx: f64, cy: f64| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= 64.0;
            if d(20.0, 20.0) || d(44.0, 44.0) { 40 } else { 220 }
        });
        let c = hough_circles(&f, 6, 12, 200.0, 0.3).unwrap();
        for (tx, ty) in [(20, 20), (44, 44)] {
            assert!(
                c.iter().take(2).any(|c| (c.x as i64 - tx).abs() <= 1 && (c.y as i64 - ty).abs() <= 1 && (c.r as i64 - 8).abs() <= 1),
                "{:?}",
                &c[..c.len().min(4)]
            );
        }
    }
}
