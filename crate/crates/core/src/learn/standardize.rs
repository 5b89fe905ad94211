use serde::{Deserialize, Serialize};

use super::LearnError;

/// Per-feature z-score parameters. Zero-variance features keep std 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Self { means: vec![0.0; dim], stds: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.means.iter().zip(&self.stds)).map(|(x, (m, s))| (x - m) / s).collect()
    }

    pub fn apply(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply_row(r)).collect()
    }
}

/// Checks that rows are non-empty, rectangular and finite; returns the
/// feature count.
pub(crate) fn check_rows(rows: &[Vec<f64>]) -> Result<usize, LearnError> {
    let dim = rows.first().ok_or(LearnError::Empty)?.len();
    if dim == 0 {
        return Err(LearnError::Empty);
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(LearnError::Ragged { row: i, expected: dim, found: r.len() });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite { row: i });
        }
    }
    Ok(dim)
}

/// Mean and population standard deviation of each column.
pub fn standardize_fit(rows: &[Vec<f64>]) -> Result<Standardizer, LearnError> {
    let dim = check_rows(rows)?;
    let n = rows.len() as f64;
    let mut means = vec![0.0; dim];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut stds = vec![0.0; dim];
    for r in rows {
        for ((s, x), m) in stds.iter_mut().zip(r).zip(&means) {
            *s += (x - m) * (x - m);
        }
    }
    for s in stds.iter_mut() {
        *s = (*s / n).sqrt();
        if !(*s > 0.0) {
            *s = 1.0;
        }
    }
    Ok(Standardizer { means, stds })
}

pub fn standardize_apply(rows: &[Vec<f64>], st: &Standardizer) -> Vec<Vec<f64>> {
    st.apply(rows)
}
