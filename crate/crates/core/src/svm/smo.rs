use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// Stopping tolerance on the maximal KKT violation.
pub const KKT_TOLERANCE: f64 = 1e-3;

/// Iterations allowed per training sample.
pub const ITERATIONS_PER_SAMPLE: usize = 1_000_000;

/// Curvature floor for indefinite or degenerate pairs.
const TAU: f64 = 1e-12;

/// Gram matrices larger than this skip the eigenvalue check.
const PSD_CHECK_MAX: usize = 2000;

/// A trained two-class soft-margin SVM in dual form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBinarySvm {
    pub alpha: Vec<f64>,
    pub y: Vec<i8>,
    pub bias: f64,
    pub zeta: f64,
    pub iterations: usize,
}

impl TrainedBinarySvm {
    /// Indices with a positive dual coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.alpha.len()).filter(|&i| self.alpha[i] > 0.0).collect()
    }

    /// `h(x) = Σ αᵢ yᵢ k(xᵢ, x) + b`, where `k_row[i] = k(xᵢ, x)`.
    pub fn decision_value(&self, k_row: &[f64]) -> Result<f64> {
        if k_row.len() != self.alpha.len() {
            return Err(Error::input(format!(
                "kernel row has {} entries, the model was trained on {} samples",
                k_row.len(),
                self.alpha.len()
            )));
        }
        let sum: f64 = self
            .alpha
            .iter()
            .zip(&self.y)
            .zip(k_row)
            .filter(|((a, _), _)| **a > 0.0)
            .map(|((a, y), k)| a * f64::from(*y) * k)
            .sum();
        Ok(sum + self.bias)
    }

    /// `+1` when `h(x) >= 0`, else `−1`.
    pub fn predict(&self, k_row: &[f64]) -> Result<i8> {
        Ok(if self.decision_value(k_row)? >= 0.0 { 1 } else { -1 })
    }
}

/// Solves `max Σαᵢ − ½ Σ αᵢαⱼyᵢyⱼKᵢⱼ` subject to `Σαᵢyᵢ = 0`, `0 ≤ αᵢ ≤ ζ`.
///
/// Sequential minimal optimisation on the precomputed Gram matrix. Each step
/// picks the maximal violating index and pairs it with the index giving the
/// largest second-order decrease; the loop ends once the violation drops
/// under [`KKT_TOLERANCE`]. The bias averages `yⱼ − Σαᵢyᵢkᵢⱼ` over free
/// support vectors, or takes the midpoint of the feasible interval when
/// none is free.
pub fn train_binary(k: &GramMatrix, y: &[i8], zeta: f64) -> Result<TrainedBinarySvm> {
    let n = k.len();
    if y.len() != n {
        return Err(Error::input(format!("{} labels for a {n}x{n} Gram matrix", y.len())));
    }
    if y.iter().any(|&l| l != 1 && l != -1) {
        return Err(Error::input("binary labels must be +1 or -1"));
    }
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::input(format!("box bound must be positive, got {zeta}")));
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::Training("both classes must be present".into()));
    }
    if n <= PSD_CHECK_MAX && !k.is_psd(1e-8) {
        warn!("Gram matrix is not positive semidefinite; training proceeds");
    }

    let yf: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, y: f64| (y > 0.0 && a < zeta) || (y < 0.0 && a > 0.0);
    let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < zeta);

    let cap = ITERATIONS_PER_SAMPLE.saturating_mul(n);
    let mut iterations = 0;
    loop {
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if up(alpha[t], yf[t]) && -yf[t] * grad[t] >= g_max {
                g_max = -yf[t] * grad[t];
                i = t;
            }
        }
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], yf[t]) {
                continue;
            }
            let yg = yf[t] * grad[t];
            g_max2 = g_max2.max(yg);
            let b = g_max + yg;
            if i != usize::MAX && b > 0.0 {
                let mut a = k.get(i, i) + k.get(t, t) - 2.0 * k.get(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                if -(b * b) / a <= best {
                    best = -(b * b) / a;
                    j = t;
                }
            }
        }
        if g_max + g_max2 < KKT_TOLERANCE || i == usize::MAX || j == usize::MAX {
            break;
        }
        if iterations >= cap {
            warn!("reached the iteration cap of {cap}; returning the current solution");
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut a = k.get(i, i) + k.get(j, j) - 2.0 * k.get(i, j);
        if a <= 0.0 {
            a = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / a;
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
                if alpha[i] > zeta {
                    alpha[i] = zeta;
                    alpha[j] = zeta - diff;
                }
            } else if alpha[j] > zeta {
                alpha[j] = zeta;
                alpha[i] = zeta + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / a;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > zeta {
                if alpha[i] > zeta {
                    alpha[i] = zeta;
                    alpha[j] = sum - zeta;
                }
                if alpha[j] > zeta {
                    alpha[j] = zeta;
                    alpha[i] = sum - zeta;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += yf[t] * (yf[i] * k.get(t, i) * di + yf[j] * k.get(t, j) * dj);
        }
    }

    let bias = -rho(&alpha, &yf, &grad, zeta);
    Ok(TrainedBinarySvm {
        alpha,
        y: y.to_vec(),
        bias,
        zeta,
        iterations,
    })
}

fn rho(alpha: &[f64], y: &[f64], grad: &[f64], zeta: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= zeta {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}
