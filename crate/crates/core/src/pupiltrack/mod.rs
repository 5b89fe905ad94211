//! Pupil localization with a circular Hough transform and Kalman smoothing
//! of the per-eye pupil trajectory.

mod hough;
mod kalman;
mod pupil;
mod trace;

pub use hough::{hough_circles, Circle};
pub use kalman::{kalman_step, KalmanConfig, KalmanState};
pub use pupil::{detect_pupil, write_observations, Eye, PupilConfig, PupilObservation};
pub use trace::{read_trace, smooth_trace, write_trace, GazeSample, GazeTrace, DEFAULT_FPS};

#[derive(Debug, thiserror::Error)]
pub enum TrackError {
    #[error("invalid radius range [{r_min}, {r_max}] for a {width}x{height} frame")]
    InvalidRadius { r_min: usize, r_max: usize, width: usize, height: usize },
    #[error("non-finite measurement ({0}, {1})")]
    NonFiniteMeasurement(f64, f64),
    #[error("no valid pupil observation in the sequence")]
    NoValidObservation,
    #[error("observations are not strictly ordered by frame index or mix eyes")]
    Unordered,
    #[error("trace file: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace file line {line}: {message}")]
    Parse { line: u64, message: String },
}
