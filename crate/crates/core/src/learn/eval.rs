use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{auc, metrics, roc_curve, Confusion, RocPoint};
use super::{train, CvPlan, Family, LearnError, Params};
use crate::Label;

/// Points of the vertically averaged ROC.
const MEAN_ROC_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
}

impl Summary {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / n;
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Summary { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub confusion: Confusion,
    pub roc: Vec<RocPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanRocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub family: Family,
    pub params: Params,
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub n_rows: usize,
    pub accuracy: Summary,
    pub auc: Summary,
    pub precision: Summary,
    pub recall: Summary,
    pub f1: Summary,
    /// Sum over all held-out folds.
    pub confusion: Confusion,
    /// ROC of all held-out scores pooled together.
    pub pooled_roc: Vec<RocPoint>,
    pub pooled_auc: f64,
    /// Per-fold TPR averaged at fixed FPR steps of 0.01.
    pub mean_roc: Vec<MeanRocPoint>,
    pub folds: Vec<FoldResult>,
    /// Wall-clock scoring time per held-out row; absent when timing is off.
    pub inference_ms_per_sample: Option<f64>,
}

struct FoldOutput {
    result: FoldResult,
    scores: Vec<f64>,
    truth: Vec<Label>,
    elapsed_ms: f64,
}

fn check_plan(rows: &[Vec<f64>], labels: &[Label], plan: &CvPlan) -> Result<(), LearnError> {
    super::check_training(rows, labels)?;
    if plan.n_rows() != rows.len() {
        return Err(LearnError::PlanMismatch { plan: plan.n_rows(), rows: rows.len() });
    }
    Ok(())
}

fn run_fold(
    params: &Params,
    rows: &[Vec<f64>],
    labels: &[Label],
    plan: &CvPlan,
    repeat: usize,
    fold: usize,
) -> Result<FoldOutput, LearnError> {
    let (train_idx, test_idx) = plan.split(repeat, fold);
    let pick_rows = |idx: &[usize]| idx.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>();
    let pick_labels = |idx: &[usize]| idx.iter().map(|&i| labels[i]).collect::<Vec<_>>();
    let train_rows = if train_idx.is_empty() { pick_rows(&test_idx) } else { pick_rows(&train_idx) };
    let train_labels = if train_idx.is_empty() { pick_labels(&test_idx) } else { pick_labels(&train_idx) };
    let model = train(params, &train_rows, &train_labels)?;
    let truth = pick_labels(&test_idx);
    let start = Instant::now();
    let out: Vec<(Label, f64)> = test_idx.iter().map(|&i| model.classify(&rows[i])).collect::<Result<_, _>>()?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (pred, scores): (Vec<Label>, Vec<f64>) = out.into_iter().unzip();
    let confusion = Confusion::from_predictions(&pred, &truth)?;
    let m = metrics(&confusion, &scores, &truth)?;
    Ok(FoldOutput {
        result: FoldResult {
            repeat,
            fold,
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            auc: m.auc,
            confusion,
            roc: m.roc,
        },
        scores,
        truth,
        elapsed_ms,
    })
}

fn run_folds(params: &Params, rows: &[Vec<f64>], labels: &[Label], plan: &CvPlan) -> Result<Vec<FoldOutput>, LearnError> {
    check_plan(rows, labels, plan)?;
    plan.folds().into_par_iter().map(|(r, f)| run_fold(params, rows, labels, plan, r, f)).collect()
}

/// TPR of a ROC polyline at `fpr`, taking the highest point on vertical runs.
fn interpolate(roc: &[RocPoint], fpr: f64) -> f64 {
    let i = roc.iter().rposition(|p| p.fpr <= fpr).unwrap_or(0);
    match roc.get(i + 1) {
        None => roc[i].tpr,
        Some(next) => {
            let a = roc[i];
            a.tpr + (next.tpr - a.tpr) * (fpr - a.fpr) / (next.fpr - a.fpr)
        }
    }
}

fn mean_roc(folds: &[FoldResult]) -> Vec<MeanRocPoint> {
    (0..MEAN_ROC_GRID)
        .map(|g| {
            let fpr = g as f64 / (MEAN_ROC_GRID - 1) as f64;
            let s = Summary::of(folds.iter().map(|f| interpolate(&f.roc, fpr)));
            MeanRocPoint { fpr, tpr: s.mean, std: s.std }
        })
        .collect()
}

/// Cross-validated evaluation. Each fold fits standardization and model on
/// its training rows only. Folds run in parallel; results are in plan
/// order. With `timing` off the report carries no wall-clock values and is
/// fully deterministic.
pub fn evaluate(
    params: &Params,
    rows: &[Vec<f64>],
    labels: &[Label],
    plan: &CvPlan,
    timing: bool,
) -> Result<EvalReport, LearnError> {
    let outs = run_folds(params, rows, labels, plan)?;
    let folds: Vec<FoldResult> = outs.iter().map(|o| o.result.clone()).collect();
    let mut confusion = Confusion::default();
    folds.iter().for_each(|f| confusion.add(&f.confusion));
    let scores: Vec<f64> = outs.iter().flat_map(|o| o.scores.iter().copied()).collect();
    let truth: Vec<Label> = outs.iter().flat_map(|o| o.truth.iter().copied()).collect();
    let pooled_roc = roc_curve(&scores, &truth)?;
    let inference_ms_per_sample = timing.then(|| outs.iter().map(|o| o.elapsed_ms).sum::<f64>() / truth.len() as f64);
    Ok(EvalReport {
        family: params.family(),
        params: params.clone(),
        k: plan.k,
        repeats: plan.repeats,
        seed: plan.seed,
        n_rows: rows.len(),
        accuracy: Summary::of(folds.iter().map(|f| f.accuracy)),
        auc: Summary::of(folds.iter().map(|f| f.auc)),
        precision: Summary::of(folds.iter().map(|f| f.precision)),
        recall: Summary::of(folds.iter().map(|f| f.recall)),
        f1: Summary::of(folds.iter().map(|f| f.f1)),
        confusion,
        pooled_auc: auc(&pooled_roc),
        pooled_roc,
        mean_roc: mean_roc(&folds),
        folds,
        inference_ms_per_sample,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: Params,
    pub accuracy: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub best: Params,
    pub best_index: usize,
    pub table: Vec<GridPoint>,
}

/// Exhaustive search by mean CV accuracy; the earliest grid point wins ties.
pub fn grid_search(grid: &[Params], rows: &[Vec<f64>], labels: &[Label], plan: &CvPlan) -> Result<GridSearch, LearnError> {
    if grid.is_empty() {
        return Err(LearnError::EmptyGrid);
    }
    let table: Vec<GridPoint> = grid
        .iter()
        .map(|p| {
            let outs = run_folds(p, rows, labels, plan)?;
            Ok(GridPoint { params: p.clone(), accuracy: Summary::of(outs.iter().map(|o| o.result.accuracy)) })
        })
        .collect::<Result<_, LearnError>>()?;
    let mut best_index = 0;
    for (i, g) in table.iter().enumerate() {
        if g.accuracy.mean > table[best_index].accuracy.mean {
            best_index = i;
        }
    }
    Ok(GridSearch { best: table[best_index].params.clone(), best_index, table })
}
