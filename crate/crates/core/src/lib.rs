//! Offline gaze-intention analysis.
//!
//! The crate turns grayscale webcam frames into per-eye pupil trajectories,
//! extracts fixation-count and movement-ratio features from them, and labels
//! the viewer's visual intention as [`Label::Text`] or [`Label::Image`] with
//! one of five classifiers.
//!
//! Modules, in pipeline order:
//!
//! - [`imaging`]: frames, image I/O and pixel preprocessing.
//! - [`detect`]: Haar-cascade face/eye detection and eye-region estimates.
//! - [`pupiltrack`]: circular Hough pupil localization and Kalman smoothing.
//! - [`gazefeat`]: fixation segmentation, the 8-feature vector, dataset CSV.
//! - [`learn`]: classifiers, cross-validation, metrics, feature importance.
//! - [`intent`]: inference, group relative interest, histograms and the
//!   end-to-end frame pipeline.

pub mod detect;
pub mod gazefeat;
pub mod imaging;
pub mod intent;
mod label;
pub mod learn;
pub mod pupiltrack;
pub mod rng;

pub use label::{Label, ParseLabelError};
