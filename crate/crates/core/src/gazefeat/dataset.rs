use std::io::{Read, Write};
use std::path::Path;

use super::{FeatureError, FeatureVector, FEATURE_NAMES};
use crate::Label;

/// Exact header line of the dataset CSV.
pub const DATASET_HEADER: &str = "MAX_FC_R,MAX_FC_L,MIN_FC_R,MIN_FC_L,AVG_FC_R,AVG_FC_L,MR_R,MR_L,Label";

/// Feature rows plus where they came from. Provenance is not part of the
/// CSV; reading a file records its path as the source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GazeDataset {
    pub rows: Vec<FeatureVector>,
    pub source: String,
    pub seed: Option<u64>,
}

impl GazeDataset {
    pub fn new(rows: Vec<FeatureVector>) -> Self {
        Self { rows, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Feature rows in `FEATURE_NAMES` order.
    pub fn features(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values().to_vec()).collect()
    }

    /// Labels of every row, or `None` if any row is unlabeled.
    pub fn labels(&self) -> Option<Vec<Label>> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

/// Counts are written as integers, reals in shortest round-trip form, and an
/// unlabeled row leaves the Label cell empty.
pub fn write_dataset_to<W: Write>(ds: &GazeDataset, out: W) -> Result<(), FeatureError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(DATASET_HEADER.split(','))?;
    for r in &ds.rows {
        w.write_record([
            r.max_fc_r.to_string(),
            r.max_fc_l.to_string(),
            r.min_fc_r.to_string(),
            r.min_fc_l.to_string(),
            r.avg_fc_r.to_string(),
            r.avg_fc_l.to_string(),
            r.mr_r.to_string(),
            r.mr_l.to_string(),
            r.label.map_or(String::new(), |l| l.to_string()),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_dataset(ds: &GazeDataset, path: impl AsRef<Path>) -> Result<(), FeatureError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| FeatureError::Io { path: path.display().to_string(), source })?;
    write_dataset_to(ds, std::io::BufWriter::new(file))
}

pub fn read_dataset_from<R: Read>(input: R) -> Result<GazeDataset, FeatureError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.iter().map(str::trim).collect::<Vec<_>>().join(",");
    if header != DATASET_HEADER {
        return Err(FeatureError::Header { expected: DATASET_HEADER.to_string(), found: header });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |i: usize| rec[i].trim();
        let count = |i: usize| {
            cell(i).parse::<u32>().map_err(|_| FeatureError::Cell {
                line,
                message: format!("{} must be a non-negative integer, got {:?}", FEATURE_NAMES[i], cell(i)),
            })
        };
        let real = |i: usize| {
            cell(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| FeatureError::Cell {
                    line,
                    message: format!("{} must be a finite non-negative number, got {:?}", FEATURE_NAMES[i], cell(i)),
                })
        };
        let label = match cell(8) {
            "" => None,
            s => Some(s.parse::<Label>().map_err(|e| FeatureError::Cell { line, message: e.to_string() })?),
        };
        rows.push(FeatureVector {
            max_fc_r: count(0)?,
            max_fc_l: count(1)?,
            min_fc_r: count(2)?,
            min_fc_l: count(3)?,
            avg_fc_r: real(4)?,
            avg_fc_l: real(5)?,
            mr_r: real(6)?,
            mr_l: real(7)?,
            label,
        });
    }
    Ok(GazeDataset::new(rows))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<GazeDataset, FeatureError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| FeatureError::Io { path: path.display().to_string(), source })?;
    let mut ds = read_dataset_from(std::io::BufReader::new(file))?;
    ds.source = path.display().to_string();
    Ok(ds)
}
