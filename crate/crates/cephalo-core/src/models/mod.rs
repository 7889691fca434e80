//! From-scratch classifiers behind one config/fit/predict interface: softmax
//! regression, MLP trained with Adam and early stopping, k-nearest neighbors,
//! CART decision trees, and bagged random forests.
//!
//! Every model is deterministic given `(config, data, seed)` and returns
//! probability rows that sum to one.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;
use thiserror::Error;

use crate::features::GrowthLabel;

mod knn;
mod logreg;
mod mlp;
mod tree;

pub use knn::KnnModel;
pub use logreg::LogregModel;
pub use mlp::{gradient_check, Layer, MlpModel};
pub use tree::{ForestModel, TreeModel, TreeNode};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("training data is empty")]
    Empty,
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error("{0} training is not implemented in this build")]
    NotImplemented(&'static str),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
}

/// MLP training protocol: stratified validation split, full-batch Adam on the
/// cross-entropy loss, and patience-based early stopping that restores the
/// best-epoch parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpProtocol {
    pub validation_fraction: f64,
    pub patience: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for MlpProtocol {
    fn default() -> Self {
        MlpProtocol {
            validation_fraction: 0.2,
            patience: 50,
            max_epochs: 10_000,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
        }
    }
}

/// Default iteration cap for softmax regression.
pub const LOGREG_DEFAULT_MAX_ITER: usize = 2000;

/// Which classifier to train, with its structural hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierKind {
    /// `hidden` lists hidden-layer widths; empty means a plain softmax layer.
    Mlp { hidden: Vec<usize> },
    Knn { k: usize },
    Logreg { max_iter: usize },
    Tree { max_depth: Option<usize> },
    /// `mtry = None` samples floor(sqrt(d)) features per split.
    Forest { n_trees: usize, mtry: Option<usize> },
    /// Declared for config compatibility; training returns `NotImplemented`.
    Svm,
    /// Declared for config compatibility; training returns `NotImplemented`.
    Xgboost,
}

impl ClassifierKind {
    /// Short display form mirroring the study's model notation.
    pub fn describe(&self) -> String {
        match self {
            ClassifierKind::Mlp { hidden } if hidden.is_empty() => String::from("MLP"),
            ClassifierKind::Mlp { hidden } => {
                let dims: Vec<String> = hidden.iter().map(|h| format!("{h}")).collect();
                format!("MLP({})", dims.join(", "))
            }
            ClassifierKind::Knn { k } => format!("NN({k})"),
            ClassifierKind::Logreg { .. } => String::from("LR"),
            ClassifierKind::Tree { .. } => String::from("DT"),
            ClassifierKind::Forest { n_trees, .. } => format!("RF({n_trees})"),
            ClassifierKind::Svm => String::from("SVM"),
            ClassifierKind::Xgboost => String::from("XGB"),
        }
    }
}

/// Classifier selection plus the seeded training protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub seed: u64,
    pub protocol: MlpProtocol,
}

impl ClassifierConfig {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierConfig {
            kind,
            seed: 0,
            protocol: MlpProtocol::default(),
        }
    }

    pub fn mlp(hidden: &[usize]) -> Self {
        ClassifierConfig::new(ClassifierKind::Mlp {
            hidden: hidden.to_vec(),
        })
    }

    pub fn knn(k: usize) -> Self {
        ClassifierConfig::new(ClassifierKind::Knn { k })
    }

    pub fn logreg() -> Self {
        ClassifierConfig::new(ClassifierKind::Logreg {
            max_iter: LOGREG_DEFAULT_MAX_ITER,
        })
    }

    pub fn tree() -> Self {
        ClassifierConfig::new(ClassifierKind::Tree { max_depth: None })
    }

    pub fn forest(n_trees: usize) -> Self {
        ClassifierConfig::new(ClassifierKind::Forest {
            n_trees,
            mtry: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Iterative-training bookkeeping; zeroed for models that fit in one pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainMeta {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub final_train_loss: f64,
    pub train_loss_history: Vec<f64>,
    pub val_loss_history: Vec<f64>,
    /// Row indices that formed the validation partition.
    pub val_indices: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Learned parameters per model kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Mlp(MlpModel),
    Logreg(LogregModel),
    Knn(KnnModel),
    Tree(TreeModel),
    Forest(ForestModel),
}

/// A fitted classifier: parameters, the class list, and training metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub classes: Vec<GrowthLabel>,
    pub n_features: usize,
    pub params: ModelParams,
    pub meta: TrainMeta,
}

/// Sorted distinct classes and per-sample class indices.
pub(crate) fn class_index(
    y: &[GrowthLabel],
) -> Result<(Vec<GrowthLabel>, Vec<usize>), ModelError> {
    if y.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut classes: Vec<GrowthLabel> = y.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    let idx = y
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    Ok((classes, idx))
}

pub(crate) fn check_matrix(x: &[Vec<f64>], y_len: usize) -> Result<usize, ModelError> {
    if x.is_empty() {
        return Err(ModelError::Empty);
    }
    if x.len() != y_len {
        return Err(ModelError::InconsistentInput(format!(
            "{} rows vs {} labels",
            x.len(),
            y_len
        )));
    }
    let d = x[0].len();
    if d == 0 {
        return Err(ModelError::InconsistentInput(String::from(
            "rows have zero features",
        )));
    }
    for r in x {
        if r.len() != d {
            return Err(ModelError::InconsistentInput(format!(
                "mixed row widths {d} vs {}",
                r.len()
            )));
        }
    }
    Ok(d)
}

/// Train the configured classifier.
pub fn fit(
    config: &ClassifierConfig,
    x: &[Vec<f64>],
    y: &[GrowthLabel],
) -> Result<TrainedModel, ModelError> {
    let d = check_matrix(x, y.len())?;
    let (classes, y_idx) = class_index(y)?;
    match &config.kind {
        ClassifierKind::Mlp { hidden } => mlp::fit_mlp(config, hidden, x, &y_idx, classes, d),
        ClassifierKind::Logreg { max_iter } => {
            logreg::fit_logreg(*max_iter, x, &y_idx, classes, d)
        }
        ClassifierKind::Knn { k } => knn::fit_knn(*k, x, &y_idx, classes, d),
        ClassifierKind::Tree { max_depth } => tree::fit_tree(*max_depth, x, &y_idx, classes, d),
        ClassifierKind::Forest { n_trees, mtry } => {
            tree::fit_forest(config.seed, *n_trees, *mtry, x, &y_idx, classes, d)
        }
        ClassifierKind::Svm => Err(ModelError::NotImplemented("SVM")),
        ClassifierKind::Xgboost => Err(ModelError::NotImplemented("XGBoost")),
    }
}

impl TrainedModel {
    fn check_dim(&self, x: &[Vec<f64>]) -> Result<(), ModelError> {
        for r in x {
            if r.len() != self.n_features {
                return Err(ModelError::DimensionMismatch {
                    expected: self.n_features,
                    got: r.len(),
                });
            }
        }
        Ok(())
    }

    /// Per-row class probabilities over [`TrainedModel::classes`]; rows sum
    /// to one.
    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, ModelError> {
        self.check_dim(x)?;
        let c = self.classes.len();
        Ok(match &self.params {
            ModelParams::Mlp(m) => x.iter().map(|r| m.proba(r)).collect(),
            ModelParams::Logreg(m) => x.iter().map(|r| m.proba(r)).collect(),
            ModelParams::Knn(m) => x.iter().map(|r| m.proba(r, c)).collect(),
            ModelParams::Tree(m) => x.iter().map(|r| m.proba(r)).collect(),
            ModelParams::Forest(m) => x.iter().map(|r| m.proba(r, c)).collect(),
        })
    }

    /// Hard labels: argmax of [`Self::predict_proba`], ties to the lowest
    /// class index; k-NN ties resolve to the tied class nearest in the
    /// neighbor ordering.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<GrowthLabel>, ModelError> {
        self.check_dim(x)?;
        if let ModelParams::Knn(m) = &self.params {
            return Ok(x
                .iter()
                .map(|r| self.classes[m.predict_index(r, self.classes.len())])
                .collect());
        }
        let proba = self.predict_proba(x)?;
        Ok(proba
            .iter()
            .map(|row| self.classes[argmax_lowest(row)])
            .collect())
    }
}

/// Index of the maximum value, lowest index on ties.
pub(crate) fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, v) in row.iter().enumerate().skip(1) {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax in place.
pub(crate) fn softmax(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    for l in logits.iter_mut() {
        *l /= sum;
    }
}

/// Mean cross-entropy of probability rows against class indices.
pub(crate) fn cross_entropy(proba: &[Vec<f64>], y_idx: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &t) in proba.iter().zip(y_idx) {
        total -= row[t].max(1e-300).ln();
    }
    total / proba.len() as f64
}
