use std::io::{Read, Write};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::IntentError;
use crate::gazefeat::FeatureVector;
use crate::learn::TrainedModel;
use crate::Label;

pub const INFERENCE_HEADER: [&str; 4] = ["source", "label", "score", "group"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub source: String,
    pub label: Label,
    /// Decision value (SVM, LR) or TEXT probability (GNB, RF, KNN).
    pub score: f64,
    pub group: Option<String>,
}

/// Standardizes and classifies one feature vector; any label on `fv` is
/// ignored.
pub fn infer(model: &TrainedModel, fv: &FeatureVector, source: &str, group: Option<&str>) -> Result<Inference, IntentError> {
    let values = fv.values();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(IntentError::NonFinite { index });
    }
    let (label, score) = model.classify(&values)?;
    Ok(Inference { source: source.to_string(), label, score, group: group.map(str::to_string) })
}

/// [`infer`] plus its wall-clock time.
pub fn infer_timed(
    model: &TrainedModel,
    fv: &FeatureVector,
    source: &str,
    group: Option<&str>,
) -> Result<(Inference, Duration), IntentError> {
    let start = Instant::now();
    let out = infer(model, fv, source, group)?;
    Ok((out, start.elapsed()))
}

/// CSV `source,label,score,group`; an untagged inference leaves `group`
/// empty.
pub fn write_inferences<W: Write>(rows: &[Inference], out: W) -> Result<(), IntentError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(INFERENCE_HEADER)?;
    for r in rows {
        w.write_record([r.source.as_str(), r.label.as_str(), &r.score.to_string(), r.group.as_deref().unwrap_or("")])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_inferences<R: Read>(input: R) -> Result<Vec<Inference>, IntentError> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    if r.headers()?.iter().ne(INFERENCE_HEADER) {
        return Err(IntentError::Parse { line: 1, message: format!("expected header `{}`", INFERENCE_HEADER.join(",")) });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| IntentError::Parse { line, message };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", rec.len())));
        }
        let label: Label = rec[1].parse().map_err(|e: crate::ParseLabelError| bad(e.to_string()))?;
        let score: f64 = rec[2].parse().map_err(|_| bad(format!("bad score `{}`", &rec[2])))?;
        if !score.is_finite() {
            return Err(bad("score is not finite".into()));
        }
        let group = (!rec[3].is_empty()).then(|| rec[3].to_string());
        out.push(Inference { source: rec[0].to_string(), label, score, group });
    }
    Ok(out)
}
