//! Gaze features: dispersion-based fixations, fixation-count statistics,
//! the horizontal/vertical movement ratio, and the 8-column dataset.

mod dataset;
mod fixation;
mod ratio;
mod synth;

pub use dataset::{read_dataset, read_dataset_from, write_dataset, write_dataset_to, GazeDataset, DATASET_HEADER};
pub use fixation::{fixation_count_stats, segment_fixations, FixationConfig, FixationEvent};
pub use ratio::{movement_ratio, scan_counts, MrScope};
pub use synth::{dataset_trace_seed, synth_dataset, synth_trace, TraceKind};

use serde::{Deserialize, Serialize};

use crate::pupiltrack::GazeTrace;
use crate::Label;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("trace has {0} valid samples; at least 2 are needed")]
    TooFewValid(usize),
    #[error("dataset header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("dataset line {line}: {message}")]
    Cell { line: u64, message: String },
    #[error("dataset file: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Feature column names in dataset order.
pub const FEATURE_NAMES: [&str; 8] =
    ["MAX_FC_R", "MAX_FC_L", "MIN_FC_R", "MIN_FC_L", "AVG_FC_R", "AVG_FC_L", "MR_R", "MR_L"];

/// The eight gaze features of one recording, right eye first within each
/// pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub max_fc_r: u32,
    pub max_fc_l: u32,
    pub min_fc_r: u32,
    pub min_fc_l: u32,
    pub avg_fc_r: f64,
    pub avg_fc_l: f64,
    pub mr_r: f64,
    pub mr_l: f64,
    pub label: Option<Label>,
}

impl FeatureVector {
    /// Values in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> [f64; 8] {
        [
            self.max_fc_r as f64,
            self.max_fc_l as f64,
            self.min_fc_r as f64,
            self.min_fc_l as f64,
            self.avg_fc_r,
            self.avg_fc_l,
            self.mr_r,
            self.mr_l,
        ]
    }

    pub fn with_label(self, label: Label) -> Self {
        Self { label: Some(label), ..self }
    }
}

/// Everything [`extract_features`] needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub fixation: FixationConfig,
    /// Smallest per-axis displacement, in px, that counts as a scan.
    pub motion_threshold: f64,
    pub mr_scope: MrScope,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { fixation: FixationConfig::default(), motion_threshold: 1.0, mr_scope: MrScope::All }
    }
}

fn eye_features(trace: &GazeTrace, cfg: &FeatureConfig) -> Result<(u32, u32, f64, f64), FeatureError> {
    let events = segment_fixations(trace, &cfg.fixation);
    let (max, min, avg) = fixation_count_stats(&events);
    let exclude = match cfg.mr_scope {
        MrScope::All => None,
        MrScope::SaccadesOnly => Some(events.as_slice()),
    };
    let (h, v) = scan_counts(trace, cfg.motion_threshold, exclude)?;
    Ok((max, min, avg, h as f64 / v.max(1) as f64))
}

/// Per-eye fixation statistics and movement ratio in dataset column order.
/// The label is left unset.
pub fn extract_features(left: &GazeTrace, right: &GazeTrace, cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    let (max_l, min_l, avg_l, mr_l) = eye_features(left, cfg)?;
    let (max_r, min_r, avg_r, mr_r) = eye_features(right, cfg)?;
    Ok(FeatureVector {
        max_fc_r: max_r,
        max_fc_l: max_l,
        min_fc_r: min_r,
        min_fc_l: min_l,
        avg_fc_r: avg_r,
        avg_fc_l: avg_l,
        mr_r,
        mr_l,
        label: None,
    })
}
