use nalgebra::{DMatrix, DVector};

use super::linear::{dot, sigmoid, softplus, LinearModel};
use super::LearnError;
use crate::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct LogregFit {
    pub model: LinearModel,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// `½‖w‖² + C Σ ln(1 + exp(−yᵢ(w·xᵢ + b)))`; the bias is not penalized.
pub fn logreg_objective(w: &[f64], b: f64, rows: &[Vec<f64>], labels: &[Label], c: f64) -> f64 {
    let reg = 0.5 * dot(w, w);
    let loss: f64 = rows.iter().zip(labels).map(|(x, l)| softplus(-l.sign() * (dot(w, x) + b))).sum();
    reg + c * loss
}

/// Gradient of [`logreg_objective`] as `[∂w..., ∂b]`.
pub fn logreg_gradient(w: &[f64], b: f64, rows: &[Vec<f64>], labels: &[Label], c: f64) -> Vec<f64> {
    let d = w.len();
    let mut g: Vec<f64> = w.iter().copied().chain([0.0]).collect();
    for (x, l) in rows.iter().zip(labels) {
        let y = l.sign();
        let coef = -c * y * sigmoid(-y * (dot(w, x) + b));
        for j in 0..d {
            g[j] += coef * x[j];
        }
        g[d] += coef;
    }
    g
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Damped Newton iterations with Armijo backtracking, stopped when the
/// gradient norm reaches `tol`.
pub fn fit_logreg(
    rows: &[Vec<f64>],
    labels: &[Label],
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LogregFit, LearnError> {
    let d = rows[0].len();
    let mut theta = vec![0.0; d + 1];
    let mut f = logreg_objective(&theta[..d], 0.0, rows, labels, c);
    for iter in 0..=max_iter {
        let g = logreg_gradient(&theta[..d], theta[d], rows, labels, c);
        let gn = norm(&g);
        if gn <= tol {
            return Ok(LogregFit {
                model: LinearModel { w: theta[..d].to_vec(), b: theta[d], c },
                iterations: iter,
                grad_norm: gn,
            });
        }
        if iter == max_iter {
            return Err(LearnError::NotConverged { iterations: max_iter, residual: gn });
        }
        let mut h = DMatrix::<f64>::zeros(d + 1, d + 1);
        for j in 0..d {
            h[(j, j)] = 1.0;
        }
        let mut xt = vec![0.0; d + 1];
        for x in rows {
            let s = sigmoid(dot(&theta[..d], x) + theta[d]);
            let wgt = c * s * (1.0 - s);
            xt[..d].copy_from_slice(x);
            xt[d] = 1.0;
            for a in 0..=d {
                for b in 0..=d {
                    h[(a, b)] += wgt * xt[a] * xt[b];
                }
            }
        }
        let rhs = -DVector::from_column_slice(&g);
        let mut damping = 0.0;
        let step = loop {
            let mut hd = h.clone();
            for j in 0..=d {
                hd[(j, j)] += damping;
            }
            if let Some(ch) = hd.cholesky() {
                break ch.solve(&rhs);
            }
            damping = if damping == 0.0 { 1e-10 } else { damping * 10.0 };
        };
        let slope: f64 = step.iter().zip(&g).map(|(p, q)| p * q).sum();
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let cand: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, p)| a + t * p).collect();
            let fc = logreg_objective(&cand[..d], cand[d], rows, labels, c);
            if fc <= f + 1e-4 * t * slope + 1e-12 * f.abs() {
                theta = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(LearnError::NotConverged { iterations: iter, residual: gn });
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Image, Text};

    fn data() -> (Vec<Vec<f64>>, Vec<Label>) {
        let rows = vec![
            vec![0.2, 1.0],
            vec![-0.5, 0.3],
            vec![1.5, -0.2],
            vec![0.9, 0.8],
            vec![-1.2, -0.7],
            vec![0.1, -1.5],
        ];
        (rows, vec![Text, Image, Text, Text, Image, Image])
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (rows, labels) = data();
        let w = [0.3, -0.8];
        let b = 0.15;
        let g = logreg_gradient(&w, b, &rows, &labels, 2.0);
        let h = 1e-6;
        for j in 0..3 {
            let mut p = [w[0], w[1], b];
            let mut m = p;
            p[j] += h;
            m[j] -= h;
            let fd = (logreg_objective(&p[..2], p[2], &rows, &labels, 2.0)
                - logreg_objective(&m[..2], m[2], &rows, &labels, 2.0))
                / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-6 * (1.0 + g[j].abs()), "{j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn optimum_has_small_gradient() {
        let (rows, labels) = data();
        for c in [0.01, 1.0, 100.0] {
            let fit = fit_logreg(&rows, &labels, c, 1e-6, 100).unwrap();
            let g = logreg_gradient(&fit.model.w, fit.model.b, &rows, &labels, c);
            assert!(norm(&g) <= 1e-6);
            assert_eq!(norm(&g), fit.grad_norm);
        }
    }

    #[test]
    fn separable_large_c() {
        let rows: Vec<Vec<f64>> = [-3.0, -2.0, -1.5, 1.0, 2.5, 4.0].iter().map(|&x| vec![x]).collect();
        let labels = [Image, Image, Image, Text, Text, Text];
        let fit = fit_logreg(&rows, &labels, 1e4, 1e-6, 200).unwrap();
        for (x, l) in rows.iter().zip(&labels) {
            assert_eq!(fit.model.decision(x) > 0.0, l.is_positive());
        }
    }

    #[test]
    fn iteration_cap() {
        let (rows, labels) = data();
        assert!(matches!(fit_logreg(&rows, &labels, 1.0, 1e-6, 0), Err(LearnError::NotConverged { .. })));
    }
}
