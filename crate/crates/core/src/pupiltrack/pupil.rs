use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{hough_circles, TrackError};
use crate::detect::Rect;
use crate::imaging::{equalize_histogram, pyramid_down, threshold_invert, GrayFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Eye {
    Left,
    Right,
}

impl Eye {
    pub fn as_str(self) -> &'static str {
        match self {
            Eye::Left => "LEFT",
            Eye::Right => "RIGHT",
        }
    }
}

impl std::fmt::Display for Eye {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Preprocessing and Hough settings for [`detect_pupil`]. Radii are given at
/// eye-crop scale and divided down for each pyramid level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilConfig {
    /// Binary threshold applied to the inverted, equalized crop.
    pub threshold: u8,
    pub pyramid_levels: u32,
    pub r_min: usize,
    pub r_max: usize,
    pub edge_threshold: f32,
    pub vote_ratio: f64,
}

impl Default for PupilConfig {
    fn default() -> Self {
        Self { threshold: 200, pyramid_levels: 1, r_min: 6, r_max: 25, edge_threshold: 200.0, vote_ratio: 0.35 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PupilObservation {
    pub frame_index: usize,
    pub eye: Eye,
    /// Full-frame coordinates.
    pub center: (f64, f64),
    pub radius: f64,
    pub votes: u32,
    pub valid: bool,
}

impl PupilObservation {
    pub fn invalid(frame_index: usize, eye: Eye, region: &Rect) -> Self {
        Self { frame_index, eye, center: region.center(), radius: 0.0, votes: 0, valid: false }
    }

    pub fn tagged(self, frame_index: usize, eye: Eye) -> Self {
        Self { frame_index, eye, ..self }
    }
}

/// Locates the pupil inside `region`: crop, equalize, invert and threshold,
/// `pyramid_levels` reductions, then the Hough candidate with the most votes
/// per unit circumference, mapped back to full-frame coordinates. The
/// observation is invalid (frame index 0, left eye; see
/// [`PupilObservation::tagged`]) when there is no candidate, when the region
/// leaves the frame, or when it is too small for the radius range.
pub fn detect_pupil(frame: &GrayFrame, region: &Rect, cfg: &PupilConfig) -> PupilObservation {
    let invalid = PupilObservation::invalid(0, Eye::Left, region);
    let Ok(crop) = frame.crop(region) else {
        return invalid;
    };
    let mut img = threshold_invert(&equalize_histogram(&crop), cfg.threshold);
    let mut scale = 1usize;
    for _ in 0..cfg.pyramid_levels {
        match pyramid_down(&img) {
            Ok(next) => img = next,
            Err(_) => return invalid,
        }
        scale *= 2;
    }
    let r_min = (cfg.r_min as f64 / scale as f64).round().max(3.0) as usize;
    let r_max = ((cfg.r_max as f64 / scale as f64).round() as usize).min(img.width().min(img.height()) / 2);
    let Ok(circles) = hough_circles(&img, r_min, r_max, cfg.edge_threshold, cfg.vote_ratio) else {
        return invalid;
    };
    // Rank by support relative to circumference so that a large ring
    // grazing several unrelated edges does not beat a complete small one.
    let support = |c: &super::Circle| c.votes as f64 / (2.0 * std::f64::consts::PI * c.r as f64);
    let best = circles.iter().fold(None, |best: Option<&super::Circle>, c| match best {
        Some(b) if support(b) >= support(c) => Some(b),
        _ => Some(c),
    });
    match best {
        Some(c) => PupilObservation {
            frame_index: 0,
            eye: Eye::Left,
            center: ((region.x + c.x * scale) as f64, (region.y + c.y * scale) as f64),
            radius: (c.r * scale) as f64,
            votes: c.votes,
            valid: true,
        },
        None => invalid,
    }
}

/// Debug dump: CSV `frame,eye,x,y,radius,votes,valid`.
pub fn write_observations<W: Write>(obs: &[PupilObservation], out: W) -> Result<(), TrackError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["frame", "eye", "x", "y", "radius", "votes", "valid"])?;
    for o in obs {
        w.write_record([
            o.frame_index.to_string(),
            o.eye.to_string(),
            o.center.0.to_string(),
            o.center.1.to_string(),
            o.radius.to_string(),
            o.votes.to_string(),
            (o.valid as u8).to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
