use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::IntentError;
use crate::detect::{detect_objects, estimate_eye_regions, DetectParams, EyeRegionLayout, HaarCascade, Rect};
use crate::gazefeat::{extract_features, FeatureConfig, FeatureVector};
use crate::imaging::{load_frame, GrayFrame};
use crate::pupiltrack::{
    detect_pupil, smooth_trace, write_observations, write_trace, Eye, GazeTrace, KalmanConfig, PupilConfig,
    PupilObservation,
};

/// Face cascade plus optional per-eye cascades. `right_eye` is searched in
/// the image-left region (the subject's right eye), `left_eye` in the
/// image-right one.
#[derive(Debug, Clone)]
pub struct Cascades {
    pub face: HaarCascade,
    pub right_eye: Option<HaarCascade>,
    pub left_eye: Option<HaarCascade>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub face: DetectParams,
    pub eye: DetectParams,
    pub layout: EyeRegionLayout,
    pub pupil: PupilConfig,
    pub kalman: KalmanConfig,
    /// Fixation settings; their `fps` is replaced by `fps` below.
    pub features: FeatureConfig,
    pub fps: f64,
    /// A face must be found within this many leading frames.
    pub calibration_frames: usize,
    /// Where to write per-frame artifacts, if anywhere.
    pub dump_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            face: DetectParams { min_size: 60, ..DetectParams::default() },
            eye: DetectParams { min_neighbors: 2, ..DetectParams::default() },
            layout: EyeRegionLayout::default(),
            // Closed eyes still leave brow and lash edges; demand near-complete rings.
            pupil: PupilConfig { vote_ratio: 0.9, ..PupilConfig::default() },
            kalman: KalmanConfig::default(),
            features: FeatureConfig::default(),
            fps: 30.0,
            calibration_frames: 30,
            dump_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionSource {
    /// The eye cascade found the eye inside the estimated region.
    Detected,
    /// Geometric estimate from the face rectangle.
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_index: usize,
    /// Whether the face cascade fired on this frame; otherwise the nearest
    /// earlier face (or the first one) is reused.
    pub face_detected: bool,
    pub face: Rect,
    pub right_region: Rect,
    pub right_source: RegionSource,
    pub left_region: Rect,
    pub left_source: RegionSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub right: GazeTrace,
    pub left: GazeTrace,
    pub features: FeatureVector,
    pub observations: Vec<PupilObservation>,
    pub frames: Vec<FrameRecord>,
}

/// PGM and PNG files in `dir`, sorted by file name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>, IntentError> {
    let io = |e| IntentError::Io { path: dir.to_path_buf(), source: e };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        let ext = p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if p.is_file() && matches!(ext.as_deref(), Some("pgm" | "png")) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(IntentError::NoFrames(dir.to_path_buf()));
    }
    out.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(out)
}

fn largest(rects: &[Rect]) -> Option<Rect> {
    // First maximum: detections arrive in a deterministic order.
    rects.iter().fold(None, |best: Option<Rect>, r| match best {
        Some(b) if b.area() >= r.area() => Some(b),
        _ => Some(*r),
    })
}

fn refine_region(frame: &GrayFrame, region: Rect, cascade: Option<&HaarCascade>, params: &DetectParams) -> (Rect, RegionSource) {
    let Some(c) = cascade else {
        return (region, RegionSource::Estimated);
    };
    let Ok(crop) = frame.crop(&region) else {
        return (region, RegionSource::Estimated);
    };
    match largest(&detect_objects(&crop, c, params)) {
        Some(r) => (r.offset(region.x, region.y), RegionSource::Detected),
        None => (region, RegionSource::Estimated),
    }
}

fn clamp_to(r: Rect, frame: &GrayFrame) -> Rect {
    let x = r.x.min(frame.width() - 1);
    let y = r.y.min(frame.height() - 1);
    Rect::new(x, y, r.width.min(frame.width() - x).max(1), r.height.min(frame.height() - y).max(1))
}

/// Frames → faces → eye regions → pupils → smoothed traces → features.
///
/// Faces are searched in every frame; a miss reuses the most recent earlier
/// face, and frames before the first hit use that first face. The first hit
/// must fall within `calibration_frames`. Frames are processed in parallel;
/// the output does not depend on scheduling.
pub fn run_pipeline(frames_dir: &Path, cascades: &Cascades, cfg: &PipelineConfig) -> Result<PipelineOutput, IntentError> {
    let paths = list_frames(frames_dir)?;
    let detected: Vec<Option<Rect>> = paths
        .par_iter()
        .map(|p| Ok(largest(&detect_objects(&load_frame(p)?, &cascades.face, &cfg.face))))
        .collect::<Result<_, IntentError>>()?;
    let first = detected.iter().position(Option::is_some);
    let first = match first {
        Some(i) if i < cfg.calibration_frames => detected[i].expect("position found it"),
        _ => return Err(IntentError::NoFaceInCalibration(cfg.calibration_frames.min(paths.len()))),
    };
    let mut faces = Vec::with_capacity(paths.len());
    let mut last = first;
    for d in &detected {
        if let Some(f) = d {
            last = *f;
        }
        faces.push(last);
    }

    let per_frame: Vec<(FrameRecord, [PupilObservation; 2])> = paths
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let frame = load_frame(p)?;
            let (img_left, img_right) = estimate_eye_regions(&faces[i], &cfg.layout);
            let (right_region, right_source) =
                refine_region(&frame, clamp_to(img_left, &frame), cascades.right_eye.as_ref(), &cfg.eye);
            let (left_region, left_source) =
                refine_region(&frame, clamp_to(img_right, &frame), cascades.left_eye.as_ref(), &cfg.eye);
            let right = detect_pupil(&frame, &right_region, &cfg.pupil).tagged(i, Eye::Right);
            let left = detect_pupil(&frame, &left_region, &cfg.pupil).tagged(i, Eye::Left);
            let rec = FrameRecord {
                frame_index: i,
                face_detected: detected[i].is_some(),
                face: faces[i],
                right_region,
                right_source,
                left_region,
                left_source,
            };
            Ok((rec, [right, left]))
        })
        .collect::<Result<_, IntentError>>()?;

    let frames: Vec<FrameRecord> = per_frame.iter().map(|(r, _)| r.clone()).collect();
    let right_obs: Vec<PupilObservation> = per_frame.iter().map(|(_, o)| o[0].clone()).collect();
    let left_obs: Vec<PupilObservation> = per_frame.iter().map(|(_, o)| o[1].clone()).collect();
    let (right, left) = rayon::join(
        || smooth_trace(&right_obs, &cfg.kalman, cfg.fps),
        || smooth_trace(&left_obs, &cfg.kalman, cfg.fps),
    );
    let (right, left) = (right?, left?);
    let mut fcfg = cfg.features.clone();
    fcfg.fixation.fps = cfg.fps;
    let features = extract_features(&left, &right, &fcfg)?;
    let observations: Vec<PupilObservation> = right_obs.into_iter().zip(left_obs).flat_map(|(r, l)| [r, l]).collect();
    let out = PipelineOutput { right, left, features, observations, frames };
    if let Some(dir) = &cfg.dump_dir {
        dump(&out, dir)?;
    }
    Ok(out)
}

fn create(path: PathBuf) -> Result<BufWriter<File>, IntentError> {
    File::create(&path).map(BufWriter::new).map_err(|e| IntentError::Io { path, source: e })
}

/// `faces.csv`, `observations.csv`, `trace_right.csv`, `trace_left.csv`.
fn dump(out: &PipelineOutput, dir: &Path) -> Result<(), IntentError> {
    std::fs::create_dir_all(dir).map_err(|e| IntentError::Io { path: dir.to_path_buf(), source: e })?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(dir.join("faces.csv"))?);
    w.write_record([
        "frame", "detected", "x", "y", "width", "height", "right_x", "right_y", "right_w", "right_h", "right_src", "left_x",
        "left_y", "left_w", "left_h", "left_src",
    ])?;
    let src = |s: RegionSource| match s {
        RegionSource::Detected => "detected",
        RegionSource::Estimated => "estimated",
    };
    for f in &out.frames {
        let (r, l) = (f.right_region, f.left_region);
        w.write_record([
            f.frame_index.to_string(),
            (f.face_detected as u8).to_string(),
            f.face.x.to_string(),
            f.face.y.to_string(),
            f.face.width.to_string(),
            f.face.height.to_string(),
            r.x.to_string(),
            r.y.to_string(),
            r.width.to_string(),
            r.height.to_string(),
            src(f.right_source).to_string(),
            l.x.to_string(),
            l.y.to_string(),
            l.width.to_string(),
            l.height.to_string(),
            src(f.left_source).to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    write_observations(&out.observations, create(dir.join("observations.csv"))?)?;
    write_trace(&out.right, create(dir.join("trace_right.csv"))?)?;
    write_trace(&out.left, create(dir.join("trace_left.csv"))?)?;
    Ok(())
}
