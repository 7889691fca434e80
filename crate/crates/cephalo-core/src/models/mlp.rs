//! Dense feed-forward network: ReLU on every layer before the output, softmax
//! at the output, full-batch Adam, stratified validation split, and
//! patience-based early stopping that restores the best epoch's parameters.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use rand::Rng;

use super::{
    cross_entropy, softmax, ClassifierConfig, GrowthLabel, ModelError, ModelParams, TrainMeta,
    TrainedModel,
};
use crate::rng;

/// One affine layer, weights row-major `[fan_out x fan_in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub fan_in: usize,
    pub fan_out: usize,
}

impl Layer {
    fn he_uniform(fan_in: usize, fan_out: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Layer {
        let limit = (6.0 / fan_in as f64).sqrt();
        Layer {
            weights: (0..fan_in * fan_out)
                .map(|_| rng.gen_range(-limit..limit))
                .collect(),
            biases: vec![0.0; fan_out],
            fan_in,
            fan_out,
        }
    }

    fn affine(&self, input: &[f64], out: &mut [f64]) {
        for o in 0..self.fan_out {
            let row = &self.weights[o * self.fan_in..(o + 1) * self.fan_in];
            out[o] = self.biases[o] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
        }
    }
}

/// Fitted network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
    pub n_features: usize,
}

impl MlpModel {
    fn init(
        n_features: usize,
        hidden: &[usize],
        n_classes: usize,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> MlpModel {
        let mut dims = vec![n_features];
        dims.extend_from_slice(hidden);
        dims.push(n_classes);
        let layers = dims
            .windows(2)
            .map(|w| Layer::he_uniform(w[0], w[1], rng))
            .collect();
        MlpModel { layers, n_features }
    }

    /// Forward pass for one row; ReLU between layers, softmax at the end.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut current = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next = vec![0.0; layer.fan_out];
            layer.affine(&current, &mut next);
            if i < last {
                for v in &mut next {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            current = next;
        }
        softmax(&mut current);
        current
    }

    /// Forward pass retaining post-activation values per layer (input first).
    fn forward_batch(&self, x: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
        let last = self.layers.len() - 1;
        x.iter()
            .map(|row| {
                let mut acts = Vec::with_capacity(self.layers.len() + 1);
                acts.push(row.clone());
                for (i, layer) in self.layers.iter().enumerate() {
                    let mut next = vec![0.0; layer.fan_out];
                    layer.affine(acts.last().unwrap(), &mut next);
                    if i < last {
                        for v in &mut next {
                            if *v < 0.0 {
                                *v = 0.0;
                            }
                        }
                    } else {
                        softmax(&mut next);
                    }
                    acts.push(next);
                }
                acts
            })
            .collect()
    }

    fn proba_batch(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.proba(r)).collect()
    }

    /// Mean cross-entropy loss and its gradient w.r.t. every parameter.
    ///
    /// Gradients come back in layer order as (weight grads, bias grads).
    fn loss_and_grad(
        &self,
        x: &[Vec<f64>],
        y_idx: &[usize],
    ) -> (f64, Vec<(Vec<f64>, Vec<f64>)>) {
        let n = x.len();
        let scale = 1.0 / n as f64;
        let mut grads: Vec<(Vec<f64>, Vec<f64>)> = self
            .layers
            .iter()
            .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
            .collect();
        let activations = self.forward_batch(x);
        let mut loss = 0.0;
        for (acts, &target) in activations.iter().zip(y_idx) {
            let proba = acts.last().unwrap();
            loss -= proba[target].max(1e-300).ln();
            // softmax + CE: delta at the output is (p - onehot) / n
            let mut delta: Vec<f64> = proba.iter().map(|p| p * scale).collect();
            delta[target] -= scale;
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let input = &acts[l];
                let (gw, gb) = &mut grads[l];
                for o in 0..layer.fan_out {
                    gb[o] += delta[o];
                    let grow = &mut gw[o * layer.fan_in..(o + 1) * layer.fan_in];
                    for (g, inp) in grow.iter_mut().zip(input) {
                        *g += delta[o] * inp;
                    }
                }
                if l > 0 {
                    let mut prev = vec![0.0; layer.fan_in];
                    for o in 0..layer.fan_out {
                        let row = &layer.weights[o * layer.fan_in..(o + 1) * layer.fan_in];
                        for (p, w) in prev.iter_mut().zip(row) {
                            *p += delta[o] * w;
                        }
                    }
                    // ReLU gate: layer l-1's post-activation is acts[l]
                    for (p, a) in prev.iter_mut().zip(&acts[l]) {
                        if *a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        (loss * scale, grads)
    }
}

struct Adam {
    m: Vec<(Vec<f64>, Vec<f64>)>,
    v: Vec<(Vec<f64>, Vec<f64>)>,
    t: usize,
    lr: f64,
    beta1: f64,
    beta2: f64,
}

const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(model: &MlpModel, lr: f64, beta1: f64, beta2: f64) -> Adam {
        let zeros: Vec<(Vec<f64>, Vec<f64>)> = model
            .layers
            .iter()
            .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.biases.len()]))
            .collect();
        Adam {
            m: zeros.clone(),
            v: zeros,
            t: 0,
            lr,
            beta1,
            beta2,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &[(Vec<f64>, Vec<f64>)]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (l, layer) in model.layers.iter_mut().enumerate() {
            let (gw, gb) = &grads[l];
            let (mw, mb) = &mut self.m[l];
            let (vw, vb) = &mut self.v[l];
            for i in 0..layer.weights.len() {
                mw[i] = self.beta1 * mw[i] + (1.0 - self.beta1) * gw[i];
                vw[i] = self.beta2 * vw[i] + (1.0 - self.beta2) * gw[i] * gw[i];
                layer.weights[i] -=
                    self.lr * (mw[i] / bc1) / ((vw[i] / bc2).sqrt() + ADAM_EPS);
            }
            for i in 0..layer.biases.len() {
                mb[i] = self.beta1 * mb[i] + (1.0 - self.beta1) * gb[i];
                vb[i] = self.beta2 * vb[i] + (1.0 - self.beta2) * gb[i] * gb[i];
                layer.biases[i] -= self.lr * (mb[i] / bc1) / ((vb[i] / bc2).sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Stratified split indices: per class, a seeded shuffle sets aside
/// `round(fraction * n_c)` samples for validation.
fn stratified_split(
    y_idx: &[usize],
    fraction: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
    warnings: &mut Vec<String>,
    classes: &[GrowthLabel],
) -> (Vec<usize>, Vec<usize>) {
    let mut per_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y_idx.iter().enumerate() {
        per_class.entry(c).or_default().push(i);
    }
    let mut train = Vec::new();
    let mut val = Vec::new();
    for (c, mut members) in per_class {
        // Fisher-Yates with the shared stream
        for i in (1..members.len()).rev() {
            let j = rng.gen_range(0..=i);
            members.swap(i, j);
        }
        let n_val = (fraction * members.len() as f64).round() as usize;
        if n_val == 0 {
            warnings.push(format!(
                "class {} missing from the validation split ({} samples)",
                classes[c],
                members.len()
            ));
        }
        val.extend_from_slice(&members[..n_val]);
        train.extend_from_slice(&members[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

pub(super) fn fit_mlp(
    config: &ClassifierConfig,
    hidden: &[usize],
    x: &[Vec<f64>],
    y_idx: &[usize],
    classes: Vec<GrowthLabel>,
    d: usize,
) -> Result<TrainedModel, ModelError> {
    let protocol = &config.protocol;
    let mut stream = rng::stream(config.seed, &[]);
    let mut warnings = Vec::new();
    let (train_idx, val_idx) = stratified_split(
        y_idx,
        protocol.validation_fraction,
        &mut stream,
        &mut warnings,
        &classes,
    );
    let (train_idx, val_idx) = if train_idx.is_empty() || val_idx.is_empty() {
        warnings.push(format!(
            "validation split empty ({} samples); early stopping uses training loss",
            x.len()
        ));
        let all: Vec<usize> = (0..x.len()).collect();
        (all.clone(), all)
    } else {
        (train_idx, val_idx)
    };
    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| x[i].clone()).collect(),
            idx.iter().map(|&i| y_idx[i]).collect(),
        )
    };
    let (x_train, y_train) = gather(&train_idx);
    let (x_val, y_val) = gather(&val_idx);

    let mut model = MlpModel::init(d, hidden, classes.len(), &mut stream);
    let mut adam = Adam::new(&model, protocol.learning_rate, protocol.beta1, protocol.beta2);

    let mut best = model.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut stale = 0usize;
    let mut train_history = Vec::new();
    let mut val_history = Vec::new();
    let mut epochs_run = 0usize;
    for epoch in 1..=protocol.max_epochs {
        epochs_run = epoch;
        let (train_loss, grads) = model.loss_and_grad(&x_train, &y_train);
        if !train_loss.is_finite() {
            return Err(ModelError::Divergence(format!(
                "non-finite training loss at epoch {epoch}"
            )));
        }
        adam.step(&mut model, &grads);
        let val_loss = cross_entropy(&model.proba_batch(&x_val), &y_val);
        if !val_loss.is_finite() {
            return Err(ModelError::Divergence(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        train_history.push(train_loss);
        val_history.push(val_loss);
        if val_loss < best_val {
            best_val = val_loss;
            best = model.clone();
            best_epoch = epoch;
            stale = 0;
        } else {
            stale += 1;
            if stale >= protocol.patience {
                break;
            }
        }
    }
    // parameters from the best epoch are brought back
    let final_train_loss = train_history.last().copied().unwrap_or(f64::NAN);
    Ok(TrainedModel {
        classes,
        n_features: d,
        params: ModelParams::Mlp(best),
        meta: TrainMeta {
            epochs_run,
            best_epoch,
            best_val_loss: best_val,
            final_train_loss,
            train_loss_history: train_history,
            val_loss_history: val_history,
            val_indices: val_idx,
            warnings,
        },
    })
}

/// Flatten-view helpers for the finite-difference check.
fn param_count(model: &MlpModel) -> usize {
    model
        .layers
        .iter()
        .map(|l| l.weights.len() + l.biases.len())
        .sum()
}

fn param_mut(model: &mut MlpModel, flat: usize) -> &mut f64 {
    let mut offset = flat;
    for layer in &mut model.layers {
        if offset < layer.weights.len() {
            return &mut layer.weights[offset];
        }
        offset -= layer.weights.len();
        if offset < layer.biases.len() {
            return &mut layer.biases[offset];
        }
        offset -= layer.biases.len();
    }
    panic!("flat parameter index out of range");
}

fn grad_flat(grads: &[(Vec<f64>, Vec<f64>)]) -> Vec<f64> {
    let mut out = Vec::new();
    for (gw, gb) in grads {
        out.extend_from_slice(gw);
        out.extend_from_slice(gb);
    }
    out
}

/// Finite-difference step used by [`gradient_check`].
pub const GRADIENT_CHECK_STEP: f64 = 1e-5;

/// Smallest |pre-activation| over every hidden unit and sample.
fn min_abs_preactivation(model: &MlpModel, x: &[Vec<f64>]) -> f64 {
    let mut min = f64::INFINITY;
    let last = model.layers.len() - 1;
    for row in x {
        let mut current = row.clone();
        for (i, layer) in model.layers.iter().enumerate() {
            let mut next = vec![0.0; layer.fan_out];
            layer.affine(&current, &mut next);
            if i < last {
                for v in &next {
                    min = min.min(v.abs());
                }
                for v in &mut next {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            current = next;
        }
    }
    min
}

/// Compare analytic cross-entropy gradients against central finite
/// differences on a small random network and batch; returns the maximum
/// relative error over all parameters.
///
/// Applies to the gradient-trained kinds: an MLP config checks its own
/// architecture, a logreg config checks the zero-hidden-layer network (the
/// same softmax math).
pub fn gradient_check(config: &ClassifierConfig) -> Result<f64, ModelError> {
    let hidden = match &config.kind {
        super::ClassifierKind::Mlp { hidden } => hidden.clone(),
        super::ClassifierKind::Logreg { .. } => Vec::new(),
        other => {
            return Err(ModelError::InconsistentInput(format!(
                "gradient check applies to MLP and LR configs, not {}",
                other.describe()
            )))
        }
    };
    gradient_check_sized(config.seed, &hidden, 10, 4, 3)
}

pub(crate) fn gradient_check_sized(
    seed: u64,
    hidden: &[usize],
    n: usize,
    d: usize,
    c: usize,
) -> Result<f64, ModelError> {
    // A pre-activation within the finite-difference step of a ReLU kink makes
    // the central difference straddle the kink; resample until the fixture is
    // clear of them.
    let mut chosen = None;
    for attempt in 0..64u64 {
        let mut stream = rng::stream(seed, &[7, attempt]);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| stream.gen_range(-1.0..1.0)).collect())
            .collect();
        let y_idx: Vec<usize> = (0..n).map(|_| stream.gen_range(0..c)).collect();
        let mut model = MlpModel::init(d, hidden, c, &mut stream);
        for layer in &mut model.layers {
            for b in &mut layer.biases {
                *b = stream.gen_range(-0.5..0.5);
            }
        }
        if min_abs_preactivation(&model, &x) > 1e3 * GRADIENT_CHECK_STEP {
            chosen = Some((x, y_idx, model));
            break;
        }
    }
    let (x, y_idx, mut model) = chosen.ok_or_else(|| {
        ModelError::Divergence(alloc::string::String::from(
            "could not build a kink-free gradient-check fixture",
        ))
    })?;

    let (_, grads) = model.loss_and_grad(&x, &y_idx);
    let analytic = grad_flat(&grads);
    let mut max_rel = 0.0f64;
    for i in 0..param_count(&model) {
        let original = *param_mut(&mut model, i);
        *param_mut(&mut model, i) = original + GRADIENT_CHECK_STEP;
        let (loss_plus, _) = model.loss_and_grad(&x, &y_idx);
        *param_mut(&mut model, i) = original - GRADIENT_CHECK_STEP;
        let (loss_minus, _) = model.loss_and_grad(&x, &y_idx);
        *param_mut(&mut model, i) = original;
        let numeric = (loss_plus - loss_minus) / (2.0 * GRADIENT_CHECK_STEP);
        let rel = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}
