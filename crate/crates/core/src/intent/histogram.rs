use std::io::Write;

use serde::{Deserialize, Serialize};

use super::IntentError;
use crate::gazefeat::{GazeDataset, FEATURE_NAMES};
use crate::Label;

pub const HISTOGRAM_HEADER: [&str; 6] = ["feature", "class", "bin", "lo", "hi", "count"];

/// Equal-width histogram of one feature for one class. Rows without a
/// label are collected under `class: None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureHistogram {
    pub feature: String,
    pub class: Option<Label>,
    /// `bins + 1` edges spanning the feature's pooled range.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Bins span each feature's min–max over all rows; a constant feature gets
/// the range `[v, v + 1]`. The maximum falls in the last bin.
pub fn feature_histograms(ds: &GazeDataset, bins: usize) -> Result<Vec<FeatureHistogram>, IntentError> {
    if ds.is_empty() {
        return Err(IntentError::EmptyDataset);
    }
    if bins == 0 {
        return Err(IntentError::NoBins);
    }
    let rows = ds.features();
    let mut classes: Vec<Option<Label>> = Vec::new();
    for c in [Some(Label::Text), Some(Label::Image), None] {
        if ds.rows.iter().any(|r| r.label == c) {
            classes.push(c);
        }
    }
    let mut out = Vec::new();
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
        let mut hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + 1.0;
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| if b == bins { hi } else { lo + b as f64 * width }).collect();
        for &c in &classes {
            let mut counts = vec![0; bins];
            for (r, fv) in rows.iter().zip(&ds.rows) {
                if fv.label == c {
                    let b = (((r[j] - lo) / width).floor() as usize).min(bins - 1);
                    counts[b] += 1;
                }
            }
            out.push(FeatureHistogram { feature: name.to_string(), class: c, edges: edges.clone(), counts });
        }
    }
    Ok(out)
}

/// CSV `feature,class,bin,lo,hi,count`, one line per bin. Unlabeled rows
/// appear with an empty class.
pub fn write_histograms<W: Write>(hists: &[FeatureHistogram], out: W) -> Result<(), IntentError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HISTOGRAM_HEADER)?;
    for h in hists {
        let class = h.class.map_or("", |l| l.as_str());
        for (b, count) in h.counts.iter().enumerate() {
            w.write_record([
                h.feature.clone(),
                class.to_string(),
                b.to_string(),
                h.edges[b].to_string(),
                h.edges[b + 1].to_string(),
                count.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// CSV `feature,importance`.
pub fn write_importance<W: Write>(importance: &[f64], out: W) -> Result<(), IntentError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["feature", "importance"])?;
    for (name, v) in FEATURE_NAMES.iter().zip(importance) {
        w.write_record([name.to_string(), v.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
