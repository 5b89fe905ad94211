mod common;

use common::hough_case;
use gazeforge::imaging::{render_synthetic_eye, GrayFrame, SyntheticEyeSpec};
use gazeforge::pupiltrack::{hough_circles, smooth_trace, Eye, KalmanConfig, PupilObservation};
use gazeforge::rng::{domain, SeedStream};

#[test]
fn hough_accuracy_sweep() {
    let mut hits = 0;
    for i in 0..100 {
        let spec = hough_case(i);
        let f = render_synthetic_eye(&spec);
        let c = hough_circles(&f, 5, 22, 200.0, 0.3).unwrap();
        let ok = c.first().is_some_and(|c| {
            let e = ((c.x as f64 - spec.center.0).powi(2) + (c.y as f64 - spec.center.1).powi(2)).sqrt();
            e <= 1.5 && (c.r as f64 - spec.radius).abs() <= 1.0
        });
        if !ok {
            eprintln!("miss {i}: {spec:?} -> {:?}", c.first());
        }
        hits += ok as usize;
    }
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn hough_is_translation_equivariant() {
    for (i, (dx, dy)) in [(3usize, 0usize), (0, 5), (7, 4), (11, 13)].into_iter().enumerate() {
        let r = 7.0 + i as f64 * 2.0;
        let base = SyntheticEyeSpec { width: 80, height: 80, center: (25.0, 27.0), radius: r, ..Default::default() };
        let moved = SyntheticEyeSpec { center: (25.0 + dx as f64, 27.0 + dy as f64), ..base.clone() };
        let a = hough_circles(&render_synthetic_eye(&base), 5, 20, 200.0, 0.3).unwrap()[0];
        let b = hough_circles(&render_synthetic_eye(&moved), 5, 20, 200.0, 0.3).unwrap()[0];
        assert!((b.x as i64 - (a.x + dx) as i64).abs() <= 1 && (b.y as i64 - (a.y + dy) as i64).abs() <= 1, "{a:?} {b:?}");
        assert_eq!(a.r, b.r);
    }
}

#[test]
fn hough_is_deterministic() {
    let f = render_synthetic_eye(&hough_case(17));
    assert_eq!(hough_circles(&f, 5, 22, 200.0, 0.3).unwrap(), hough_circles(&f, 5, 22, 200.0, 0.3).unwrap());
    let blank = GrayFrame::filled(50, 50, 0);
    assert!(hough_circles(&blank, 5, 22, 1.0, 0.3).unwrap().is_empty());
}

fn noisy_stationary(seed: u64, n: usize, sigma: f64) -> Vec<PupilObservation> {
    let mut rng = SeedStream::new(seed, domain::TEST_DATA, 400);
    (0..n)
        .map(|t| PupilObservation {
            frame_index: t,
            eye: Eye::Right,
            center: (120.0 + rng.normal(0.0, sigma), 80.0 + rng.normal(0.0, sigma)),
            radius: 9.0,
            votes: 40,
            valid: true,
        })
        .collect()
}

fn rmse(points: impl Iterator<Item = (f64, f64)>, truth: (f64, f64)) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for (x, y) in points {
        s += (x - truth.0).powi(2) + (y - truth.1).powi(2);
        n += 1;
    }
    (s / n as f64).sqrt()
}

#[test]
fn smoothing_reduces_stationary_noise() {
    for seed in 0..10 {
        let obs = noisy_stationary(seed, 300, 3.0);
        let t = smooth_trace(&obs, &KalmanConfig::default(), 30.0).unwrap();
        let raw = rmse(obs[30..].iter().map(|o| o.center), (120.0, 80.0));
        let smooth = rmse(t.samples[30..].iter().map(|s| (s.x, s.y)), (120.0, 80.0));
        assert!(smooth <= 0.6 * raw, "seed {seed}: {smooth} vs {raw}");
    }
}

#[test]
fn smoothing_preserves_length_and_indices() {
    let mut obs = noisy_stationary(3, 120, 2.0);
    let mut rng = SeedStream::new(3, domain::TEST_DATA, 401);
    for o in obs.iter_mut() {
        o.frame_index *= 2;
        o.valid = rng.uniform() < 0.7;
    }
    obs[0].valid = true;
    let t = smooth_trace(&obs, &KalmanConfig::default(), 30.0).unwrap();
    assert_eq!(t.len(), obs.len());
    assert!(t.samples.iter().zip(&obs).all(|(s, o)| s.frame_index == o.frame_index));
    assert!(t.samples.iter().all(|s| s.x.is_finite() && s.y.is_finite()));
    let again = smooth_trace(&obs, &KalmanConfig::default(), 30.0).unwrap();
    assert_eq!(format!("{t:?}"), format!("{again:?}"));
}
