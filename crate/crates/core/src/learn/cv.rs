use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::rng::{domain, SeedStream};
use crate::Label;

/// Repeated stratified k-fold assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvPlan {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    /// `assignments[repeat][row]` is the fold holding `row` out.
    pub assignments: Vec<Vec<usize>>,
}

impl CvPlan {
    pub fn n_rows(&self) -> usize {
        self.assignments.first().map_or(0, Vec::len)
    }

    /// `(train, test)` row indices of one fold, both ascending.
    pub fn split(&self, repeat: usize, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let a = &self.assignments[repeat];
        let (test, train): (Vec<usize>, Vec<usize>) = (0..a.len()).partition(|&i| a[i] == fold);
        (train, test)
    }

    /// All `(repeat, fold)` pairs in order.
    pub fn folds(&self) -> Vec<(usize, usize)> {
        (0..self.repeats).flat_map(|r| (0..self.k).map(move |f| (r, f))).collect()
    }
}

/// Each repeat shuffles the members of each class with stream
/// `(seed, CV_REPEAT, repeat)`, TEXT first, then deals them round-robin
/// into folds. The deal position carries over from TEXT to IMAGE.
pub fn make_cv_plan(labels: &[Label], k: usize, repeats: usize, seed: u64) -> Result<CvPlan, LearnError> {
    if k == 0 || repeats == 0 {
        return Err(LearnError::InvalidParam(format!("cv needs k ≥ 1 and repeats ≥ 1, got {k}x{repeats}")));
    }
    if labels.is_empty() {
        return Err(LearnError::Empty);
    }
    let members: Vec<Vec<usize>> =
        Label::ALL.iter().map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect()).collect();
    for (c, m) in Label::ALL.iter().zip(&members) {
        if !m.is_empty() && m.len() < k {
            return Err(LearnError::ClassTooSmall { label: *c, count: m.len(), k });
        }
    }
    let mut assignments = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let mut rng = SeedStream::new(seed, domain::CV_REPEAT, r as u64);
        let mut fold_of = vec![0; labels.len()];
        let mut pos = 0;
        for m in &members {
            let mut m = m.clone();
            rng.shuffle(&mut m);
            for i in m {
                fold_of[i] = pos % k;
                pos += 1;
            }
        }
        assignments.push(fold_of);
    }
    Ok(CvPlan { k, repeats, seed, assignments })
}
