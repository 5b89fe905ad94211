use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(rows: Vec<Vec<f64>>, labels: Vec<Label>, k: usize) -> Result<Self, LearnError> {
        if k == 0 {
            return Err(LearnError::InvalidParam("k must be at least 1".into()));
        }
        if k > rows.len() {
            return Err(LearnError::KTooLarge { k, n: rows.len() });
        }
        Ok(Self { k, rows, labels })
    }

    /// Distance ties go to the lower row index; an even vote split goes to
    /// the nearest neighbour. Score is the TEXT fraction of the neighbours.
    pub fn classify(&self, z: &[f64]) -> (Label, f64) {
        let mut order: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near = &order[..self.k];
        let text = near.iter().filter(|(_, i)| self.labels[*i].is_positive()).count();
        let label = match (2 * text).cmp(&self.k) {
            std::cmp::Ordering::Greater => Label::Text,
            std::cmp::Ordering::Less => Label::Image,
            std::cmp::Ordering::Equal => self.labels[near[0].1],
        };
        (label, text as f64 / self.k as f64)
    }
}
