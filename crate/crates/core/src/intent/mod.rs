//! Intention inference, group relative interest, feature histograms and the
//! end-to-end frame pipeline.

mod histogram;
mod infer;
mod interest;
mod pipeline;
mod scene;

use std::path::PathBuf;

pub use histogram::{feature_histograms, write_histograms, write_importance, FeatureHistogram, HISTOGRAM_HEADER};
pub use infer::{infer, infer_timed, read_inferences, write_inferences, Inference, INFERENCE_HEADER};
pub use interest::{relative_interest, relative_interest_table, write_relative_interest, RelativeInterest, UNTAGGED_GROUP};
pub use pipeline::{list_frames, run_pipeline, Cascades, FrameRecord, PipelineConfig, PipelineOutput, RegionSource};
pub use scene::{render_face_scene, write_frames, FaceScene, FaceSceneSpec};

#[derive(Debug, thiserror::Error)]
pub enum IntentError {
    #[error("feature {index} is not finite")]
    NonFinite { index: usize },
    #[error("no inferences carry group `{0}`")]
    EmptyGroup(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("histograms need at least one bin")]
    NoBins,
    #[error("no face found in the first {0} frames")]
    NoFaceInCalibration(usize),
    #[error("no frame images in {0}")]
    NoFrames(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("inference file line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Imaging(#[from] crate::imaging::ImagingError),
    #[error(transparent)]
    Track(#[from] crate::pupiltrack::TrackError),
    #[error(transparent)]
    Feature(#[from] crate::gazefeat::FeatureError),
    #[error(transparent)]
    Learn(#[from] crate::learn::LearnError),
}
