use super::linear::{dot, LinearModel};
use super::LearnError;
use crate::Label;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub model: LinearModel,
    /// Dual multipliers, one per training row, each in `[0, C]`.
    pub alpha: Vec<f64>,
    pub iterations: usize,
    /// Maximal KKT violation `m(α) − M(α)` at termination.
    pub gap: f64,
}

/// Soft-margin linear SVM through SMO on the dual with second-order
/// working-set selection. Stops when the maximal violating pair differs
/// by less than `tol`.
pub fn fit_svm(
    rows: &[Vec<f64>],
    labels: &[Label],
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<SvmFit, LearnError> {
    let n = rows.len();
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let k: Vec<Vec<f64>> = rows.iter().map(|a| rows.iter().map(|b| dot(a, b)).collect()).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |t: usize, a: &[f64]| (y[t] > 0.0 && a[t] < c) || (y[t] < 0.0 && a[t] > 0.0);
    let low = |t: usize, a: &[f64]| (y[t] > 0.0 && a[t] > 0.0) || (y[t] < 0.0 && a[t] < c);

    let mut iter = 0;
    let gap = loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if up(t, &alpha) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(t, &alpha) {
                continue;
            }
            gmax2 = gmax2.max(y[t] * grad[t]);
            if i == usize::MAX {
                continue;
            }
            let diff = gmax + y[t] * grad[t];
            if diff > 0.0 {
                let mut quad = k[i][i] + k[t][t] - 2.0 * k[i][t];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -diff * diff / quad;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        let gap = gmax + gmax2;
        if gap < tol || j == usize::MAX {
            break gap.max(0.0);
        }
        if iter >= max_iter {
            return Err(LearnError::NotConverged { iterations: iter, residual: gap });
        }
        iter += 1;

        let (ai, aj) = (alpha[i], alpha[j]);
        let mut quad = k[i][i] + k[j][j] - 2.0 * k[i][j];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k[i][t] * di + y[j] * k[j][t] * dj);
        }
    };

    // Bias from free multipliers, else the midpoint of the feasible range.
    let (mut sum, mut free) = (0.0, 0usize);
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            sum += yg;
            free += 1;
        } else if (alpha[t] >= c && y[t] < 0.0) || (alpha[t] <= 0.0 && y[t] > 0.0) {
            ub = ub.min(yg);
        } else {
            lb = lb.max(yg);
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };

    let d = rows[0].len();
    let mut w = vec![0.0; d];
    for (t, x) in rows.iter().enumerate() {
        if alpha[t] != 0.0 {
            for (wj, xj) in w.iter_mut().zip(x) {
                *wj += alpha[t] * y[t] * xj;
            }
        }
    }
    Ok(SvmFit { model: LinearModel { w, b: -rho, c }, alpha, iterations: iter, gap })
}
