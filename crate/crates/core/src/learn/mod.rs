//! Binary classifiers over standardized feature rows, repeated stratified
//! cross-validation, metrics and forest feature importance.
//!
//! Every model standardizes its inputs with statistics fitted on the
//! training rows only. TEXT is the positive class throughout.

mod cv;
mod eval;
mod forest;
mod gnb;
mod knn;
mod linear;
mod logreg;
mod metrics;
mod standardize;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Label;

pub use cv::{make_cv_plan, CvPlan};
pub use eval::{evaluate, grid_search, EvalReport, FoldResult, GridPoint, GridSearch, MeanRocPoint, Summary};
pub use forest::{gini_importance, Forest, Node, Split, Tree};
pub use gnb::GnbModel;
pub use knn::KnnModel;
pub use linear::LinearModel;
pub use logreg::{fit_logreg, logreg_gradient, logreg_objective, LogregFit};
pub use metrics::{auc, metrics, roc_curve, Confusion, Metrics, RocPoint};
pub use standardize::{standardize_apply, standardize_fit, Standardizer};
pub use svm::{fit_svm, SvmFit};

#[derive(Debug, thiserror::Error)]
pub enum LearnError {
    #[error("no training rows")]
    Empty,
    #[error("row {row} has {found} features, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row} contains a non-finite value")]
    NonFinite { row: usize },
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("k = {k} exceeds the {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("optimizer did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("class {label} has {count} rows, smaller than k = {k}")]
    ClassTooSmall { label: Label, count: usize, k: usize },
    #[error("operation needs a {expected} model, got {found}")]
    WrongFamily { expected: &'static str, found: Family },
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("dataset rows are unlabeled")]
    Unlabeled,
    #[error("cv plan covers {plan} rows but the dataset has {rows}")]
    PlanMismatch { plan: usize, rows: usize },
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    Knn,
    Gnb,
    Logreg,
    SvmLinear,
    RandomForest,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::SvmLinear, Family::Logreg, Family::RandomForest, Family::Gnb, Family::Knn];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Knn => "KNN",
            Family::Gnb => "GNB",
            Family::Logreg => "LOGREG",
            Family::SvmLinear => "SVM_LINEAR",
            Family::RandomForest => "RANDOM_FOREST",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "knn" => Ok(Family::Knn),
            "gnb" | "nb" => Ok(Family::Gnb),
            "logreg" | "lr" => Ok(Family::Logreg),
            "svm" | "svm_linear" => Ok(Family::SvmLinear),
            "rf" | "forest" | "random_forest" => Ok(Family::RandomForest),
            _ => Err(LearnError::UnknownFamily(s.to_string())),
        }
    }
}

/// Hyper-parameters of one model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Params {
    Knn { k: usize },
    Gnb { var_smoothing: f64 },
    Logreg { c: f64, tol: f64, max_iter: usize },
    SvmLinear { c: f64, tol: f64, max_iter: usize },
    RandomForest { n_trees: usize, max_features: usize, seed: u64 },
}

/// Penalty values searched for the linear families.
pub const C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

impl Params {
    pub fn family(&self) -> Family {
        match self {
            Params::Knn { .. } => Family::Knn,
            Params::Gnb { .. } => Family::Gnb,
            Params::Logreg { .. } => Family::Logreg,
            Params::SvmLinear { .. } => Family::SvmLinear,
            Params::RandomForest { .. } => Family::RandomForest,
        }
    }

    /// Defaults: k = 5, C = 1, 200 trees with 2 features per split.
    pub fn default_for(family: Family, seed: u64) -> Self {
        match family {
            Family::Knn => Params::Knn { k: 5 },
            Family::Gnb => Params::Gnb { var_smoothing: 1e-9 },
            Family::Logreg => Params::Logreg { c: 1.0, tol: 1e-6, max_iter: 100 },
            Family::SvmLinear => Params::SvmLinear { c: 1.0, tol: 1e-3, max_iter: 1_000_000 },
            Family::RandomForest => Params::RandomForest { n_trees: 200, max_features: 2, seed },
        }
    }

    /// The search grid: `C_GRID` for SVM and LR, the single default point
    /// otherwise.
    pub fn default_grid(family: Family, seed: u64) -> Vec<Params> {
        let base = Params::default_for(family, seed);
        match base {
            Params::Logreg { tol, max_iter, .. } => {
                C_GRID.iter().map(|&c| Params::Logreg { c, tol, max_iter }).collect()
            }
            Params::SvmLinear { tol, max_iter, .. } => {
                C_GRID.iter().map(|&c| Params::SvmLinear { c, tol, max_iter }).collect()
            }
            other => vec![other],
        }
    }

    /// Same parameters with `c` replaced, for the families that have one.
    pub fn with_c(&self, c: f64) -> Params {
        match *self {
            Params::Logreg { tol, max_iter, .. } => Params::Logreg { c, tol, max_iter },
            Params::SvmLinear { tol, max_iter, .. } => Params::SvmLinear { c, tol, max_iter },
            ref other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Payload {
    Knn(KnnModel),
    Gnb(GnbModel),
    Logreg(LinearModel),
    SvmLinear(LinearModel),
    RandomForest(Forest),
}

/// A fitted classifier together with its input standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub standardizer: Standardizer,
    pub payload: Payload,
}

impl TrainedModel {
    pub fn family(&self) -> Family {
        match self.payload {
            Payload::Knn(_) => Family::Knn,
            Payload::Gnb(_) => Family::Gnb,
            Payload::Logreg(_) => Family::Logreg,
            Payload::SvmLinear(_) => Family::SvmLinear,
            Payload::RandomForest(_) => Family::RandomForest,
        }
    }

    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    fn prepare(&self, row: &[f64]) -> Result<Vec<f64>, LearnError> {
        if row.len() != self.dim() {
            return Err(LearnError::Ragged { row: 0, expected: self.dim(), found: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite { row: 0 });
        }
        Ok(self.standardizer.apply_row(row))
    }

    /// Label and ranking score of one raw row. The score is the decision
    /// value for SVM and LR, and the TEXT probability (or neighbour
    /// fraction) for the others.
    pub fn classify(&self, row: &[f64]) -> Result<(Label, f64), LearnError> {
        let z = self.prepare(row)?;
        Ok(match &self.payload {
            Payload::Knn(m) => m.classify(&z),
            Payload::Gnb(m) => threshold_probability(m.probability(&z)),
            Payload::Logreg(m) | Payload::SvmLinear(m) => {
                let d = m.decision(&z);
                (if d > 0.0 { Label::Text } else { Label::Image }, d)
            }
            Payload::RandomForest(m) => threshold_probability(m.probability(&z)),
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<Label, LearnError> {
        Ok(self.classify(row)?.0)
    }

    pub fn score(&self, row: &[f64]) -> Result<f64, LearnError> {
        Ok(self.classify(row)?.1)
    }

    /// TEXT probability; not defined for the SVM.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64, LearnError> {
        let z = self.prepare(row)?;
        match &self.payload {
            Payload::Knn(m) => Ok(m.classify(&z).1),
            Payload::Gnb(m) => Ok(m.probability(&z)),
            Payload::Logreg(m) => Ok(linear::sigmoid(m.decision(&z))),
            Payload::RandomForest(m) => Ok(m.probability(&z)),
            Payload::SvmLinear(_) => {
                Err(LearnError::WrongFamily { expected: "probabilistic", found: Family::SvmLinear })
            }
        }
    }

    /// `w·z + b` on the standardized row, for the linear families.
    pub fn decision_function(&self, row: &[f64]) -> Result<f64, LearnError> {
        let z = self.prepare(row)?;
        match &self.payload {
            Payload::Logreg(m) | Payload::SvmLinear(m) => Ok(m.decision(&z)),
            _ => Err(LearnError::WrongFamily { expected: "linear", found: self.family() }),
        }
    }

    pub fn to_json(&self) -> Result<String, LearnError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        Ok(serde_json::from_str(text)?)
    }
}

fn threshold_probability(p: f64) -> (Label, f64) {
    (if p > 0.5 { Label::Text } else { Label::Image }, p)
}

pub(crate) fn check_training(rows: &[Vec<f64>], labels: &[Label]) -> Result<usize, LearnError> {
    let dim = standardize::check_rows(rows)?;
    if rows.len() != labels.len() {
        return Err(LearnError::LengthMismatch { rows: rows.len(), labels: labels.len() });
    }
    Ok(dim)
}

fn both_classes(labels: &[Label]) -> Result<(), LearnError> {
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    if pos == 0 || pos == labels.len() {
        return Err(LearnError::SingleClass);
    }
    Ok(())
}

fn c_param(c: f64) -> Result<(), LearnError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(LearnError::InvalidParam(format!("C must be positive and finite, got {c}")))
    }
}

pub fn train_knn(rows: &[Vec<f64>], labels: &[Label], k: usize) -> Result<TrainedModel, LearnError> {
    check_training(rows, labels)?;
    let standardizer = standardize_fit(rows)?;
    let model = KnnModel::fit(standardizer.apply(rows), labels.to_vec(), k)?;
    Ok(TrainedModel { standardizer, payload: Payload::Knn(model) })
}

pub fn train_gnb(rows: &[Vec<f64>], labels: &[Label], var_smoothing: f64) -> Result<TrainedModel, LearnError> {
    check_training(rows, labels)?;
    both_classes(labels)?;
    let standardizer = standardize_fit(rows)?;
    let model = GnbModel::fit(&standardizer.apply(rows), labels, var_smoothing)?;
    Ok(TrainedModel { standardizer, payload: Payload::Gnb(model) })
}

pub fn train_logreg(
    rows: &[Vec<f64>],
    labels: &[Label],
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TrainedModel, LearnError> {
    check_training(rows, labels)?;
    both_classes(labels)?;
    c_param(c)?;
    let standardizer = standardize_fit(rows)?;
    let fit = fit_logreg(&standardizer.apply(rows), labels, c, tol, max_iter)?;
    Ok(TrainedModel { standardizer, payload: Payload::Logreg(fit.model) })
}

pub fn train_svm_linear(
    rows: &[Vec<f64>],
    labels: &[Label],
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<TrainedModel, LearnError> {
    check_training(rows, labels)?;
    both_classes(labels)?;
    c_param(c)?;
    let standardizer = standardize_fit(rows)?;
    let fit = fit_svm(&standardizer.apply(rows), labels, c, tol, max_iter)?;
    Ok(TrainedModel { standardizer, payload: Payload::SvmLinear(fit.model) })
}

/// Single-class input is accepted: every tree is then one leaf.
pub fn train_random_forest(
    rows: &[Vec<f64>],
    labels: &[Label],
    n_trees: usize,
    max_features: usize,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    check_training(rows, labels)?;
    let standardizer = standardize_fit(rows)?;
    let model = Forest::fit(&standardizer.apply(rows), labels, n_trees, max_features, seed)?;
    Ok(TrainedModel { standardizer, payload: Payload::RandomForest(model) })
}

pub fn train(params: &Params, rows: &[Vec<f64>], labels: &[Label]) -> Result<TrainedModel, LearnError> {
    match *params {
        Params::Knn { k } => train_knn(rows, labels, k),
        Params::Gnb { var_smoothing } => train_gnb(rows, labels, var_smoothing),
        Params::Logreg { c, tol, max_iter } => train_logreg(rows, labels, c, tol, max_iter),
        Params::SvmLinear { c, tol, max_iter } => train_svm_linear(rows, labels, c, tol, max_iter),
        Params::RandomForest { n_trees, max_features, seed } => {
            train_random_forest(rows, labels, n_trees, max_features, seed)
        }
    }
}
