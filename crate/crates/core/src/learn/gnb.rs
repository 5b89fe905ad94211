use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::Label;

/// Gaussian naive Bayes. Index 0 of every per-class array is TEXT, 1 is
/// IMAGE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub var_smoothing: f64,
}

fn class_index(l: Label) -> usize {
    if l.is_positive() {
        0
    } else {
        1
    }
}

impl GnbModel {
    /// Class variances are floored at `var_smoothing` times the largest
    /// pooled feature variance (or `var_smoothing` itself if every feature
    /// is constant).
    pub fn fit(rows: &[Vec<f64>], labels: &[Label], var_smoothing: f64) -> Result<Self, LearnError> {
        if !(var_smoothing >= 0.0) || !var_smoothing.is_finite() {
            return Err(LearnError::InvalidParam(format!("var_smoothing must be ≥ 0, got {var_smoothing}")));
        }
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let mut count = [0usize; 2];
        let mut means = [vec![0.0; dim], vec![0.0; dim]];
        for (r, &l) in rows.iter().zip(labels) {
            let c = class_index(l);
            count[c] += 1;
            for (m, x) in means[c].iter_mut().zip(r) {
                *m += x;
            }
        }
        if count.contains(&0) {
            return Err(LearnError::SingleClass);
        }
        for c in 0..2 {
            means[c].iter_mut().for_each(|m| *m /= count[c] as f64);
        }
        let mut variances = [vec![0.0; dim], vec![0.0; dim]];
        for (r, &l) in rows.iter().zip(labels) {
            let c = class_index(l);
            for ((v, x), m) in variances[c].iter_mut().zip(r).zip(&means[c]) {
                *v += (x - m) * (x - m);
            }
        }
        let pooled_max = (0..dim)
            .map(|j| {
                let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
                rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        let floor = if pooled_max > 0.0 { var_smoothing * pooled_max } else { var_smoothing };
        for c in 0..2 {
            for v in variances[c].iter_mut() {
                *v = (*v / count[c] as f64).max(floor);
            }
        }
        Ok(Self { priors: [count[0] as f64 / n, count[1] as f64 / n], means, variances, var_smoothing })
    }

    fn log_joint(&self, c: usize, z: &[f64]) -> f64 {
        let mut s = self.priors[c].ln();
        for ((x, m), v) in z.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            if *v > 0.0 {
                s -= 0.5 * (2.0 * std::f64::consts::PI * v).ln() + (x - m) * (x - m) / (2.0 * v);
            } else if x != m {
                return f64::NEG_INFINITY;
            }
        }
        s
    }

    /// Posterior probability of TEXT.
    pub fn probability(&self, z: &[f64]) -> f64 {
        let a = self.log_joint(0, z);
        let b = self.log_joint(1, z);
        if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            return self.priors[0];
        }
        1.0 / (1.0 + (b - a).exp())
    }
}
