use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::Label;

/// Binary confusion counts with TEXT as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[Label], truth: &[Label]) -> Result<Self, LearnError> {
        if predicted.len() != truth.len() {
            return Err(LearnError::LengthMismatch { rows: predicted.len(), labels: truth.len() });
        }
        let mut c = Confusion::default();
        for (p, t) in predicted.iter().zip(truth) {
            match (p.is_positive(), t.is_positive()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, o: &Confusion) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
    }

    /// True positive rate, `TP / (TP + FN)`.
    pub fn tpr(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// False positive rate, `FP / (FP + TN)`.
    pub fn fpr(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Macro average over the two classes.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub roc: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC from a threshold sweep from +∞ down, one point per distinct score.
/// Without both classes the curve is the diagonal.
pub fn roc_curve(scores: &[f64], labels: &[Label]) -> Result<Vec<RocPoint>, LearnError> {
    if scores.len() != labels.len() {
        return Err(LearnError::LengthMismatch { rows: scores.len(), labels: labels.len() });
    }
    if let Some(row) = scores.iter().position(|s| !s.is_finite()) {
        return Err(LearnError::NonFinite { row });
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    let neg = labels.len() - pos;
    let origin = RocPoint { fpr: 0.0, tpr: 0.0 };
    if pos == 0 || neg == 0 {
        return Ok(vec![origin, RocPoint { fpr: 1.0, tpr: 1.0 }]);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut pts = vec![origin];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        pts.push(RocPoint { fpr: fp as f64 / neg as f64, tpr: tp as f64 / pos as f64 });
    }
    Ok(pts)
}

/// Trapezoid area under ROC points sorted by FPR.
pub fn auc(points: &[RocPoint]) -> f64 {
    points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0).sum()
}

pub fn metrics(conf: &Confusion, scores: &[f64], labels: &[Label]) -> Result<Metrics, LearnError> {
    if conf.total() == 0 {
        return Err(LearnError::Empty);
    }
    let roc = roc_curve(scores, labels)?;
    let p_text = ratio(conf.tp, conf.tp + conf.fp);
    let p_image = ratio(conf.tn, conf.tn + conf.fn_);
    let r_text = conf.tpr();
    let r_image = ratio(conf.tn, conf.tn + conf.fp);
    Ok(Metrics {
        accuracy: (conf.tp + conf.tn) as f64 / conf.total() as f64,
        precision: (p_text + p_image) / 2.0,
        recall: (r_text + r_image) / 2.0,
        f1: (f1(p_text, r_text) + f1(p_image, r_image)) / 2.0,
        tpr: conf.tpr(),
        fpr: conf.fpr(),
        auc: auc(&roc),
        roc,
    })
}
