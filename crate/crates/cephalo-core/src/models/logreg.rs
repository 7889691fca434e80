//! Multinomial softmax regression trained by full-batch gradient descent with
//! a backtracking (Armijo) line search; deterministic zero initialization.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use alloc::{format, vec};

use super::{
    softmax, GrowthLabel, ModelError, ModelParams, TrainMeta, TrainedModel,
};

/// Gradient-norm convergence tolerance.
pub const LOGREG_GRAD_TOL: f64 = 1e-8;
/// Secondary stop: an accepted step that improves the loss by less than this
/// relative amount means the optimum is resolved to machine precision.
pub const LOGREG_PROGRESS_TOL: f64 = 1e-14;
const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Fitted softmax-regression parameters; weights row-major `[classes x features]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogregModel {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl LogregModel {
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut logits = vec![0.0; self.n_classes];
        for c in 0..self.n_classes {
            let row = &self.weights[c * self.n_features..(c + 1) * self.n_features];
            logits[c] = self.biases[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        softmax(&mut logits);
        logits
    }

    fn mean_loss(&self, x: &[Vec<f64>], y_idx: &[usize]) -> f64 {
        let mut total = 0.0;
        for (row, &t) in x.iter().zip(y_idx) {
            total -= self.proba(row)[t].max(1e-300).ln();
        }
        total / x.len() as f64
    }

    /// Gradient of the mean cross-entropy w.r.t. weights and biases.
    fn gradient(&self, x: &[Vec<f64>], y_idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let scale = 1.0 / x.len() as f64;
        let mut gw = vec![0.0; self.weights.len()];
        let mut gb = vec![0.0; self.n_classes];
        for (row, &t) in x.iter().zip(y_idx) {
            let mut p = self.proba(row);
            p[t] -= 1.0;
            for c in 0..self.n_classes {
                let delta = p[c] * scale;
                gb[c] += delta;
                let grow = &mut gw[c * self.n_features..(c + 1) * self.n_features];
                for (g, v) in grow.iter_mut().zip(row) {
                    *g += delta * v;
                }
            }
        }
        (gw, gb)
    }
}

pub(super) fn fit_logreg(
    max_iter: usize,
    x: &[Vec<f64>],
    y_idx: &[usize],
    classes: Vec<GrowthLabel>,
    d: usize,
) -> Result<TrainedModel, ModelError> {
    let c = classes.len();
    let mut model = LogregModel {
        weights: vec![0.0; c * d],
        biases: vec![0.0; c],
        n_features: d,
        n_classes: c,
    };
    let mut loss = model.mean_loss(x, y_idx);
    let mut step = 1.0f64;
    let mut iterations = 0usize;
    for _ in 0..max_iter {
        let (gw, gb) = model.gradient(x, y_idx);
        let grad_sq: f64 =
            gw.iter().map(|g| g * g).sum::<f64>() + gb.iter().map(|g| g * g).sum::<f64>();
        if grad_sq.sqrt() < LOGREG_GRAD_TOL {
            break;
        }
        iterations += 1;
        let loss_before = loss;
        // backtracking line search along the negative gradient
        step = (step * 2.0).min(1e6);
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let mut candidate = model.clone();
            for (w, g) in candidate.weights.iter_mut().zip(&gw) {
                *w -= step * g;
            }
            for (b, g) in candidate.biases.iter_mut().zip(&gb) {
                *b -= step * g;
            }
            let candidate_loss = candidate.mean_loss(x, y_idx);
            if candidate_loss <= loss - ARMIJO_C * step * grad_sq {
                model = candidate;
                loss = candidate_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !loss.is_finite() {
            return Err(ModelError::Divergence(format!(
                "non-finite loss at iteration {iterations}"
            )));
        }
        if !accepted {
            break; // line search exhausted: numerical floor reached
        }
        if loss_before - loss <= LOGREG_PROGRESS_TOL * (1.0 + loss_before.abs()) {
            break;
        }
    }
    Ok(TrainedModel {
        classes,
        n_features: d,
        params: ModelParams::Logreg(model),
        meta: TrainMeta {
            epochs_run: iterations,
            final_train_loss: loss,
            ..TrainMeta::default()
        },
    })
}

/// Training accuracy helper shared by tests.
#[cfg(test)]
pub(crate) fn training_accuracy(model: &TrainedModel, x: &[Vec<f64>], y: &[GrowthLabel]) -> f64 {
    let pred = model.predict(x).unwrap();
    pred.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}
