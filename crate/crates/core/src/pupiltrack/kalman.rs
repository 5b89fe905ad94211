use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use super::TrackError;

/// Noise scales and the missing-measurement policy of the smoother.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KalmanConfig {
    /// White-acceleration process noise scale.
    pub q: f64,
    /// Measurement noise variance in px².
    pub r: f64,
    /// Longest run of missing frames bridged by prediction.
    pub max_gap: usize,
    /// Initial covariance is `init_cov · I`.
    pub init_cov: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self { q: 1e-2, r: 4.0, max_gap: 10, init_cov: 100.0 }
    }
}

/// Constant-velocity state `[px, py, vx, vy]` with unit time step.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub x: Vector4<f64>,
    pub p: Matrix4<f64>,
    pub q: f64,
    pub r: f64,
}

fn transition() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// `q · G Gᵀ` with `G = [½, ½, 1, 1]` per axis.
fn process_noise(q: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.25, 0.0, 0.5, 0.0, //
        0.0, 0.25, 0.0, 0.5, //
        0.5, 0.0, 1.0, 0.0, //
        0.0, 0.5, 0.0, 1.0,
    ) * q
}

fn observation() -> Matrix2x4<f64> {
    Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
}

impl KalmanState {
    /// At rest at `(x, y)` with covariance `init_cov · I`.
    pub fn new(x: f64, y: f64, cfg: &KalmanConfig) -> Self {
        Self { x: Vector4::new(x, y, 0.0, 0.0), p: Matrix4::identity() * cfg.init_cov, q: cfg.q, r: cfg.r }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x[0], self.x[1])
    }

    pub fn predict(&self) -> KalmanState {
        let f = transition();
        let p = f * self.p * f.transpose() + process_noise(self.q);
        KalmanState { x: f * self.x, p: symmetrize(p), ..self.clone() }
    }

    /// Measurement update in Joseph form, then symmetrized.
    pub fn update(&self, z: (f64, f64)) -> Result<KalmanState, TrackError> {
        if !z.0.is_finite() || !z.1.is_finite() {
            return Err(TrackError::NonFiniteMeasurement(z.0, z.1));
        }
        let h = observation();
        let r = Matrix2::identity() * self.r;
        let s = h * self.p * h.transpose() + r;
        let s_inv = s.try_inverse().ok_or(TrackError::NonFiniteMeasurement(z.0, z.1))?;
        let k = self.p * h.transpose() * s_inv;
        let innovation = Vector2::new(z.0, z.1) - h * self.x;
        let i_kh = Matrix4::identity() - k * h;
        let p = i_kh * self.p * i_kh.transpose() + k * r * k.transpose();
        Ok(KalmanState { x: self.x + k * innovation, p: symmetrize(p), ..self.clone() })
    }
}

fn symmetrize(p: Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

/// One filter step: predict, then update when a measurement is present.
/// Returns the new state and its position estimate.
pub fn kalman_step(state: &KalmanState, measurement: Option<(f64, f64)>) -> Result<(KalmanState, (f64, f64)), TrackError> {
    let predicted = state.predict();
    let next = match measurement {
        Some(z) => predicted.update(z)?,
        None => predicted,
    };
    let pos = next.position();
    Ok((next, pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domain, SeedStream};

    #[test]
    fn perfect_sensor_returns_measurement() {
        let cfg = KalmanConfig { r: 1e-12, ..Default::default() };
        let mut s = KalmanState::new(0.0, 0.0, &cfg);
        for z in [(5.0, -3.0), (17.5, 2.25), (-40.0, 100.0)] {
            let (next, pos) = kalman_step(&s, Some(z)).unwrap();
            assert!((pos.0 - z.0).abs() < 1e-6 && (pos.1 - z.1).abs() < 1e-6, "{pos:?}");
            s = next;
        }
    }

    #[test]
    fn constant_measurements_converge() {
        let cfg = KalmanConfig { q: 1e-3, r: 4.0, ..Default::default() };
        let mut s = KalmanState::new(0.0, 0.0, &cfg);
        let mut pos = (0.0, 0.0);
        for _ in 0..200 {
            (s, pos) = kalman_step(&s, Some((100.0, 50.0))).unwrap();
        }
        assert!((pos.0 - 100.0).abs() < 0.1 && (pos.1 - 50.0).abs() < 0.1, "{pos:?}");
    }

    #[test]
    fn constant_velocity_prediction() {
        let cfg = KalmanConfig { q: 1e-3, r: 1e-4, ..Default::default() };
        let mut s = KalmanState::new(0.0, 0.0, &cfg);
        for t in 1..=80 {
            let predicted = s.predict().position();
            let truth = (t as f64, 2.0 * t as f64);
            if t > 50 {
                let err = ((predicted.0 - truth.0).powi(2) + (predicted.1 - truth.1).powi(2)).sqrt();
                assert!(err < 0.05, "t={t} err={err}");
            }
            s = kalman_step(&s, Some(truth)).unwrap().0;
        }
    }

    #[test]
    fn missing_measurement_predicts_only() {
        let cfg = KalmanConfig::default();
        let mut s = KalmanState::new(10.0, 10.0, &cfg);
        s.x[2] = 2.0;
        let (next, pos) = kalman_step(&s, None).unwrap();
        assert_eq!(pos, (12.0, 10.0));
        assert!(next.p[(0, 0)] > s.p[(0, 0)]);
    }

    #[test]
    fn non_finite_measurement_rejected() {
        let s = KalmanState::new(0.0, 0.0, &KalmanConfig::default());
        assert!(kalman_step(&s, Some((f64::NAN, 1.0))).is_err());
        assert!(kalman_step(&s, Some((1.0, f64::INFINITY))).is_err());
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        let mut rng = SeedStream::new(5, domain::TEST_DATA, 10);
        let cfg = KalmanConfig::default();
        let mut s = KalmanState::new(0.0, 0.0, &cfg);
        for i in 0..100_000 {
            let z = if rng.uniform() < 0.8 { Some((rng.normal(0.0, 50.0), rng.normal(0.0, 50.0))) } else { None };
            s = kalman_step(&s, z).unwrap().0;
            assert_eq!(s.p, s.p.transpose());
            if i % 97 == 0 {
                let eig = s.p.symmetric_eigen().eigenvalues;
                assert!(eig.iter().all(|&e| e >= -1e-9), "step {i}: {eig:?}");
            }
        }
    }

    #[test]
    fn zero_process_noise_never_grows_position_variance() {
        let cfg = KalmanConfig { q: 0.0, r: 4.0, ..Default::default() };
        let mut s = KalmanState::new(3.0, 4.0, &cfg);
        let mut rng = SeedStream::new(2, domain::TEST_DATA, 11);
        let mut prev = (s.p[(0, 0)], s.p[(1, 1)]);
        for _ in 0..500 {
            s = kalman_step(&s, Some((rng.normal(3.0, 2.0), rng.normal(4.0, 2.0)))).unwrap().0;
            let now = (s.p[(0, 0)], s.p[(1, 1)]);
            assert!(now.0 <= prev.0 * (1.0 + 1e-12) && now.1 <= prev.1 * (1.0 + 1e-12), "{prev:?} -> {now:?}");
            prev = now;
        }
    }
}
