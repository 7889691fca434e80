//! Evaluation harness: repeated stratified cross-validation, experiment
//! orchestration with leakage-safe per-fold preprocessing, Student's t
//! significance testing, staged forward feature selection, baselines, and
//! rater-agreement metrics.
//!
//! Every unit of work draws its RNG stream from `(master_seed, repeat, fold)`,
//! so results are independent of execution schedule and bit-reproducible.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use thiserror::Error;

use crate::augment::{augment, AugmentError, AugmentationPlan, LabeledSet, Method};
use crate::features::{Family, FeatureError, FeatureMatrix, GrowthLabel, Standardizer, Tag};
use crate::models::{fit, ClassifierConfig, ModelError};
use crate::rng::derive_seed;
use crate::stats::{self, StatsError, TTest};

/// Benchmark constants reported for the source growth study; stored for
/// report annotation only, since the original cohort is not distributable.
pub mod reference {
    /// Share of the most frequent class in the study cohort.
    pub const MFC_SHARE: f64 = 0.6823;
    /// Study cohort size.
    pub const COHORT_SIZE: usize = 639;
    /// Best two-feature logistic-regression accuracy on raw features.
    pub const BASELINE_ACCURACY_RAW: f64 = 0.7364;
    /// The same configuration on standardized features.
    pub const BASELINE_ACCURACY_STANDARDIZED: f64 = 0.7345;
    /// Peak accuracy reached with SMOTE-family augmentation.
    pub const BEST_AUGMENTED_ACCURACY: f64 = 0.7406;
    /// Accuracy of the first expert rater.
    pub const EXPERT_A_ACCURACY: f64 = 0.4033;
    /// Accuracy of the second expert rater.
    pub const EXPERT_B_ACCURACY: f64 = 0.4088;
    /// Fraction of instances both experts placed in the same class.
    pub const EXPERT_CONSISTENCY: f64 = 0.4696;
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("class {label} has {count} members, fewer than {folds} folds")]
    ClassTooSmall {
        label: GrowthLabel,
        count: usize,
        folds: usize,
    },
    #[error("feature matrix has no labels")]
    Unlabeled,
    #[error("no candidate features to select from")]
    EmptyCandidates,
    #[error("prediction lists differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("repeat {repeat}, fold {fold}: {message}")]
    Run {
        repeat: usize,
        fold: usize,
        message: String,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
}

/// Repeated stratified cross-validation shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CVConfig {
    pub folds: usize,
    pub repeats: usize,
    pub master_seed: u64,
}

impl CVConfig {
    pub fn new(folds: usize, repeats: usize, master_seed: u64) -> Self {
        CVConfig {
            folds,
            repeats,
            master_seed,
        }
    }

    fn validate(&self) -> Result<(), EvalError> {
        // folds = 1 is the degenerate resubstitution mode used for smoke tests
        if self.folds == 0 || self.repeats == 0 {
            return Err(EvalError::InvalidConfig(String::from(
                "folds and repeats must be >= 1",
            )));
        }
        Ok(())
    }
}

/// One train/test index split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split: within every class, a seeded shuffle deals members
/// round-robin across folds, so per-class counts differ by at most one.
pub fn stratified_kfold(
    labels: &[GrowthLabel],
    folds: usize,
    seed: u64,
) -> Result<Vec<Fold>, EvalError> {
    if folds < 2 {
        return Err(EvalError::InvalidConfig(format!(
            "stratified k-fold needs >= 2 folds, got {folds}"
        )));
    }
    if labels.len() < folds {
        return Err(EvalError::InvalidConfig(format!(
            "{} samples cannot fill {folds} folds",
            labels.len()
        )));
    }
    let mut per_class: BTreeMap<GrowthLabel, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        per_class.entry(l).or_default().push(i);
    }
    for (&label, members) in &per_class {
        if members.len() < folds {
            return Err(EvalError::ClassTooSmall {
                label,
                count: members.len(),
                folds,
            });
        }
    }
    let mut rng = crate::rng::stream(seed, &[]);
    use rand::Rng;
    let mut assignments: Vec<Vec<usize>> = vec![Vec::new(); folds];
    for (_, mut members) in per_class {
        for i in (1..members.len()).rev() {
            let j = rng.gen_range(0..=i);
            members.swap(i, j);
        }
        for (pos, idx) in members.into_iter().enumerate() {
            assignments[pos % folds].push(idx);
        }
    }
    let all: Vec<usize> = (0..labels.len()).collect();
    Ok(assignments
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train = all
                .iter()
                .copied()
                .filter(|i| test.binary_search(i).is_err())
                .collect();
            Fold { train, test }
        })
        .collect())
}

/// Accuracy of the trivial most-frequent-class predictor.
pub fn mfc_baseline(labels: &[GrowthLabel]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<GrowthLabel, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    max as f64 / labels.len() as f64
}

/// Majority class of a label list, ties to the lowest label.
fn majority(labels: &[GrowthLabel]) -> GrowthLabel {
    let mut counts: BTreeMap<GrowthLabel, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(l, _)| l)
        .unwrap_or(GrowthLabel::Mixed)
}

pub fn accuracy(pred: &[GrowthLabel], truth: &[GrowthLabel]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / pred.len() as f64
}

/// Two-sample two-tailed Student's t-test (equal variance); re-exported from
/// the stats module as the experiment-level significance gate.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    Ok(stats::t_test(a, b)?)
}

/// Welch's unequal-variance alternative, available behind an explicit call.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    Ok(stats::welch_t_test(a, b)?)
}

/// One experiment: a classifier on a feature subset under repeated stratified
/// CV, with optional per-fold standardization and training-fold augmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub classifier: ClassifierConfig,
    /// Column indices into the feature matrix.
    pub feature_columns: Vec<usize>,
    /// Applied to training folds only.
    pub plan: AugmentationPlan,
    pub standardize: bool,
    pub cv: CVConfig,
}

impl ExperimentConfig {
    pub fn new(classifier: ClassifierConfig, feature_columns: Vec<usize>, cv: CVConfig) -> Self {
        ExperimentConfig {
            classifier,
            feature_columns,
            plan: AugmentationPlan::default(),
            standardize: false,
            cv,
        }
    }
}

/// Accuracies from every repeat x fold, with their aggregate moments and the
/// exact configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1) over the run list.
    pub sd: f64,
    pub config: ExperimentConfig,
}

impl ExperimentResult {
    fn from_runs(runs: Vec<f64>, config: ExperimentConfig) -> Self {
        let mean = stats::mean(&runs);
        let sd = if runs.len() > 1 {
            stats::sample_sd(&runs)
        } else {
            0.0
        };
        ExperimentResult {
            runs,
            mean,
            sd,
            config,
        }
    }
}

fn gather(rows: &[Vec<f64>], labels: &[GrowthLabel], idx: &[usize]) -> (Vec<Vec<f64>>, Vec<GrowthLabel>) {
    (
        idx.iter().map(|&i| rows[i].clone()).collect(),
        idx.iter().map(|&i| labels[i]).collect(),
    )
}

fn run_annotate<T, E: core::fmt::Display>(
    result: Result<T, E>,
    repeat: usize,
    fold: usize,
) -> Result<T, EvalError> {
    result.map_err(|e| EvalError::Run {
        repeat,
        fold,
        message: e.to_string(),
    })
}

/// Execute the experiment: for every repeat and fold, fit the standardizer on
/// the training partition (when flagged), transform both partitions, augment
/// the training partition only, fit the classifier, and score accuracy on the
/// untouched test partition. Accuracies come back in repeat-major order.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &FeatureMatrix,
) -> Result<ExperimentResult, EvalError> {
    cfg.cv.validate()?;
    if cfg.feature_columns.is_empty() {
        return Err(EvalError::InvalidConfig(String::from(
            "feature subset is empty",
        )));
    }
    for &c in &cfg.feature_columns {
        if c >= data.n_cols() {
            return Err(EvalError::InvalidConfig(format!(
                "feature column {c} out of range ({} columns)",
                data.n_cols()
            )));
        }
    }
    let labels = data.label_vec()?;
    let rows = data.select_rows(&cfg.feature_columns);
    let mut runs = Vec::with_capacity(cfg.cv.folds * cfg.cv.repeats);
    for repeat in 0..cfg.cv.repeats {
        let folds = if cfg.cv.folds == 1 {
            // resubstitution smoke mode: train and test on everything
            let all: Vec<usize> = (0..labels.len()).collect();
            vec![Fold {
                train: all.clone(),
                test: all,
            }]
        } else {
            stratified_kfold(
                &labels,
                cfg.cv.folds,
                derive_seed(cfg.cv.master_seed, &[0, repeat as u64]),
            )?
        };
        for (fold_no, fold) in folds.iter().enumerate() {
            let (mut train_x, train_y) = gather(&rows, &labels, &fold.train);
            let (mut test_x, test_y) = gather(&rows, &labels, &fold.test);
            if cfg.standardize {
                let scaler = run_annotate(Standardizer::fit_rows(&train_x), repeat, fold_no)?;
                train_x = run_annotate(scaler.transform_rows(&train_x), repeat, fold_no)?;
                test_x = run_annotate(scaler.transform_rows(&test_x), repeat, fold_no)?;
            }
            let (train_x, train_y) = if cfg.plan.method != Method::None {
                let set = run_annotate(LabeledSet::from_originals(train_x, train_y), repeat, fold_no)?;
                let mut plan = cfg.plan.clone();
                plan.seed = derive_seed(
                    cfg.cv.master_seed,
                    &[1, repeat as u64, fold_no as u64, cfg.plan.seed],
                );
                let (augmented, _) = run_annotate(augment(&set, &plan), repeat, fold_no)?;
                (augmented.points, augmented.labels)
            } else {
                (train_x, train_y)
            };
            let mut classifier = cfg.classifier.clone();
            classifier.seed = derive_seed(
                cfg.cv.master_seed,
                &[2, repeat as u64, fold_no as u64, cfg.classifier.seed],
            );
            let model = run_annotate(fit(&classifier, &train_x, &train_y), repeat, fold_no)?;
            let pred = run_annotate(model.predict(&test_x), repeat, fold_no)?;
            runs.push(accuracy(&pred, &test_y));
        }
    }
    Ok(ExperimentResult::from_runs(runs, cfg.clone()))
}

/// Per-fold accuracies of the most-frequent-class predictor under the same
/// CV schedule; the baseline run list for significance tests.
pub fn mfc_baseline_runs(cv: &CVConfig, labels: &[GrowthLabel]) -> Result<Vec<f64>, EvalError> {
    cv.validate()?;
    let mut runs = Vec::with_capacity(cv.folds * cv.repeats);
    for repeat in 0..cv.repeats {
        let folds = if cv.folds == 1 {
            let all: Vec<usize> = (0..labels.len()).collect();
            vec![Fold {
                train: all.clone(),
                test: all,
            }]
        } else {
            stratified_kfold(labels, cv.folds, derive_seed(cv.master_seed, &[0, repeat as u64]))?
        };
        for fold in &folds {
            let train_labels: Vec<GrowthLabel> = fold.train.iter().map(|&i| labels[i]).collect();
            let majority_label = majority(&train_labels);
            let hit = fold
                .test
                .iter()
                .filter(|&&i| labels[i] == majority_label)
                .count();
            runs.push(hit as f64 / fold.test.len() as f64);
        }
    }
    Ok(runs)
}

/// One ranked row of a selection-stage table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub model: String,
    pub column: usize,
    pub column_name: String,
    pub family: Option<Family>,
    pub tag: Option<Tag>,
    pub mean: f64,
    pub sd: f64,
}

/// Outcome of one selection stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    /// 1-based stage number.
    pub stage: usize,
    /// Feature columns fixed before this stage ran.
    pub fixed: Vec<usize>,
    /// Top entries, best first.
    pub entries: Vec<RankedEntry>,
    /// Run list of the stage winner.
    pub best_runs: Vec<f64>,
    /// t-test p-value of this stage's winner against the previous stage's.
    pub p_vs_previous: Option<f64>,
    /// Whether the winner significantly beat the previous stage.
    pub significantly_better: Option<bool>,
}

/// Forward-selection settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub max_stages: usize,
    /// Rows kept per stage table.
    pub top_n: usize,
    /// Significance level of the stage-advancement gate.
    pub alpha: f64,
    /// Columns included in every candidate set (e.g. the age column).
    pub always_include: Vec<usize>,
    pub standardize: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            max_stages: 3,
            top_n: 10,
            alpha: 0.05,
            always_include: Vec::new(),
            standardize: false,
        }
    }
}

/// Staged forward feature selection.
///
/// Stage 1 evaluates every (model, single feature) pair; stage s fixes the
/// winning (s-1)-feature set and sweeps the remaining candidates across all
/// models. Selection stops after a stage whose best result is not
/// significantly better than the previous stage's best (t-test p >= alpha).
pub fn forward_selection(
    data: &FeatureMatrix,
    candidates: &[usize],
    menu: &[ClassifierConfig],
    cv: &CVConfig,
    sel: &SelectionConfig,
) -> Result<Vec<StageResult>, EvalError> {
    if candidates.is_empty() || menu.is_empty() {
        return Err(EvalError::EmptyCandidates);
    }
    let mut stages = Vec::new();
    let mut fixed: Vec<usize> = Vec::new();
    let mut previous_best: Option<Vec<f64>> = None;
    for stage in 1..=sel.max_stages {
        let pool: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|c| !fixed.contains(c))
            .collect();
        if pool.is_empty() {
            break;
        }
        let mut entries: Vec<(RankedEntry, Vec<f64>)> = Vec::new();
        for model_config in menu {
            for &candidate in &pool {
                let mut columns = sel.always_include.clone();
                columns.extend_from_slice(&fixed);
                columns.push(candidate);
                columns.dedup();
                let mut cfg = ExperimentConfig::new(model_config.clone(), columns, *cv);
                cfg.standardize = sel.standardize;
                let result = run_experiment(&cfg, data)?;
                let meta = &data.columns[candidate];
                entries.push((
                    RankedEntry {
                        model: model_config.kind.describe(),
                        column: candidate,
                        column_name: meta.name.clone(),
                        family: meta.family,
                        tag: meta.tag,
                        mean: result.mean,
                        sd: result.sd,
                    },
                    result.runs,
                ));
            }
        }
        entries.sort_by(|a, b| b.0.mean.total_cmp(&a.0.mean));
        let (best_entry, best_runs) = entries[0].clone();
        let (p_vs_previous, significantly_better) = match &previous_best {
            None => (None, None),
            Some(prev) => {
                let prev_mean = stats::mean(prev);
                match t_test(&best_runs, prev) {
                    Ok(test) => (
                        Some(test.p),
                        Some(best_entry.mean > prev_mean && test.p < sel.alpha),
                    ),
                    // both run lists constant: decide by the means alone
                    Err(EvalError::Stats(StatsError::DegenerateVariance(_))) => {
                        if best_entry.mean > prev_mean {
                            (Some(0.0), Some(true))
                        } else {
                            (Some(1.0), Some(false))
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        let stage_result = StageResult {
            stage,
            fixed: fixed.clone(),
            entries: entries
                .iter()
                .take(sel.top_n)
                .map(|(e, _)| e.clone())
                .collect(),
            best_runs: best_runs.clone(),
            p_vs_previous,
            significantly_better,
        };
        let stop = stage_result.significantly_better == Some(false);
        stages.push(stage_result);
        if stop {
            break;
        }
        fixed.push(best_entry.column);
        previous_best = Some(best_runs);
    }
    Ok(stages)
}

/// Agreement between two raters against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaterAgreement {
    pub accuracy_a: f64,
    pub accuracy_b: f64,
    /// Fraction of instances both raters placed in the same class.
    pub consistency: f64,
}

pub fn rater_agreement(
    pred_a: &[GrowthLabel],
    pred_b: &[GrowthLabel],
    truth: &[GrowthLabel],
) -> Result<RaterAgreement, EvalError> {
    if pred_a.len() != pred_b.len() || pred_a.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            a: pred_a.len(),
            b: pred_b.len().min(truth.len()),
        });
    }
    Ok(RaterAgreement {
        accuracy_a: accuracy(pred_a, truth),
        accuracy_b: accuracy(pred_b, truth),
        consistency: accuracy(pred_a, pred_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{ColumnMeta, GrowthClass};

    use GrowthLabel::{Horizontal as H, Mixed as M, Vertical as V};

    fn labels_639() -> Vec<GrowthLabel> {
        // 102 / 436 / 101, the study's class balance at n = 639
        let mut labels = vec![H; 102];
        labels.extend(vec![M; 436]);
        labels.extend(vec![V; 101]);
        labels
    }

    #[test]
    fn stratified_folds_partition_the_indices() {
        let labels = labels_639();
        let folds = stratified_kfold(&labels, 5, 7).unwrap();
        let mut seen = vec![false; labels.len()];
        for fold in &folds {
            for &i in &fold.test {
                assert!(!seen[i], "index {i} in two test folds");
                seen[i] = true;
            }
            // train is the complement
            assert_eq!(fold.train.len() + fold.test.len(), labels.len());
            for &i in &fold.train {
                assert!(fold.test.binary_search(&i).is_err());
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn per_class_counts_differ_by_at_most_one() {
        let labels = labels_639();
        let folds = stratified_kfold(&labels, 5, 3).unwrap();
        for class in [H, M, V] {
            let counts: Vec<usize> = folds
                .iter()
                .map(|f| f.test.iter().filter(|&&i| labels[i] == class).count())
                .collect();
            let min = counts.iter().min().unwrap();
            let max = counts.iter().max().unwrap();
            assert!(max - min <= 1, "class {class}: {counts:?}");
        }
        // each fold's Mixed share within one sample of the cohort's share
        for fold in &folds {
            let mixed = fold.test.iter().filter(|&&i| labels[i] == M).count() as f64;
            let expected = 0.6823 * fold.test.len() as f64;
            assert!((mixed - expected).abs() <= 1.0);
        }
    }

    #[test]
    fn single_class_labels_split_evenly() {
        let labels = vec![M; 13];
        let folds = stratified_kfold(&labels, 5, 1).unwrap();
        let sizes: Vec<usize> = folds.iter().map(|f| f.test.len()).collect();
        let min = sizes.iter().min().unwrap();
        let max = sizes.iter().max().unwrap();
        assert!(max - min <= 1, "{sizes:?}");
    }

    #[test]
    fn class_smaller_than_fold_count_errors() {
        let mut labels = vec![M; 20];
        labels.push(H);
        labels.push(H);
        let e = stratified_kfold(&labels, 5, 1);
        match e {
            Err(EvalError::ClassTooSmall { label, count, folds }) => {
                assert_eq!(label, H);
                assert_eq!(count, 2);
                assert_eq!(folds, 5);
            }
            other => panic!("expected class-too-small, got {other:?}"),
        }
    }

    #[test]
    fn mfc_baseline_values() {
        assert!((mfc_baseline(&[H, H, V]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((mfc_baseline(&[H, M, V]) - 1.0 / 3.0).abs() < 1e-12);
        let labels = labels_639();
        assert!((mfc_baseline(&labels) - 436.0 / 639.0).abs() < 1e-12);
    }

    /// A labeled two-column matrix where column 0 tracks the class and
    /// column 1 is noise.
    fn signal_matrix(n_per_class: usize) -> FeatureMatrix {
        let mut rng = crate::rng::stream(5, &[9]);
        use rand::Rng;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        for (label, center) in [(H, -3.0), (M, 0.0), (V, 3.0)] {
            for i in 0..n_per_class {
                rows.push(vec![
                    center + rng.gen_range(-2.0..2.0),
                    rng.gen_range(-1.0..1.0),
                ]);
                labels.push(GrowthClass {
                    label,
                    delta: center,
                });
                ids.push(format!("{label}{i}"));
            }
        }
        FeatureMatrix {
            columns: vec![
                ColumnMeta {
                    name: String::from("signal"),
                    family: Some(Family::Ceph),
                    tag: Some(Tag::Diff),
                },
                ColumnMeta {
                    name: String::from("noise"),
                    family: Some(Family::Trans),
                    tag: Some(Tag::Diff),
                },
            ],
            rows,
            subject_ids: ids,
            labels: Some(labels),
            thresholds: None,
        }
    }

    #[test]
    fn resubstitution_knn1_scores_one() {
        let data = signal_matrix(10);
        let cfg = ExperimentConfig::new(
            crate::models::ClassifierConfig::knn(1),
            vec![0, 1],
            CVConfig::new(1, 1, 3),
        );
        let result = run_experiment(&cfg, &data).unwrap();
        assert_eq!(result.runs, vec![1.0]);
    }

    #[test]
    fn run_count_is_folds_times_repeats() {
        let data = signal_matrix(10);
        for (folds, repeats, expect) in [(5, 20, 100), (5, 4, 20)] {
            let cfg = ExperimentConfig::new(
                crate::models::ClassifierConfig::knn(3),
                vec![0],
                CVConfig::new(folds, repeats, 11),
            );
            let result = run_experiment(&cfg, &data).unwrap();
            assert_eq!(result.runs.len(), expect);
        }
    }

    #[test]
    fn results_are_deterministic_and_moments_recomputable() {
        let data = signal_matrix(8);
        let mut cfg = ExperimentConfig::new(
            crate::models::ClassifierConfig::logreg(),
            vec![0, 1],
            CVConfig::new(4, 3, 21),
        );
        cfg.standardize = true;
        cfg.plan = AugmentationPlan::with_method(Method::Smote, 2.0, 5);
        let a = run_experiment(&cfg, &data).unwrap();
        let b = run_experiment(&cfg, &data).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean, stats::mean(&a.runs));
        assert_eq!(a.sd, stats::sample_sd(&a.runs));
    }

    #[test]
    fn signal_feature_beats_baseline_and_noise_does_not() {
        let data = signal_matrix(15);
        let cv = CVConfig::new(5, 4, 31);
        let labels = data.label_vec().unwrap();
        let baseline = mfc_baseline(&labels);
        let run = |col: usize| {
            let cfg = ExperimentConfig::new(
                crate::models::ClassifierConfig::logreg(),
                vec![col],
                cv,
            );
            run_experiment(&cfg, &data).unwrap().mean
        };
        assert!(run(0) > baseline + 0.3, "signal column should dominate");
        assert!(run(1) < baseline + 0.15, "noise column should hover near baseline");
    }

    #[test]
    fn fold_data_is_not_mutated_by_the_harness() {
        let data = signal_matrix(10);
        let snapshot = data.clone();
        let mut cfg = ExperimentConfig::new(
            crate::models::ClassifierConfig::logreg(),
            vec![0, 1],
            CVConfig::new(5, 2, 41),
        );
        cfg.standardize = true;
        cfg.plan = AugmentationPlan::with_method(Method::SmoteEnn, 3.0, 7);
        let _ = run_experiment(&cfg, &data).unwrap();
        assert_eq!(data, snapshot);
    }

    #[test]
    fn forward_selection_picks_the_signal_then_stops() {
        let data = signal_matrix(15);
        let cv = CVConfig::new(5, 4, 51);
        let menu = vec![
            crate::models::ClassifierConfig::logreg(),
            crate::models::ClassifierConfig::knn(5),
        ];
        let stages = forward_selection(
            &data,
            &[0, 1],
            &menu,
            &cv,
            &SelectionConfig::default(),
        )
        .unwrap();
        assert!(!stages.is_empty());
        assert_eq!(stages[0].entries[0].column, 0, "stage 1 must pick the signal");
        // stage 2 candidates exclude the fixed column
        if let Some(stage2) = stages.get(1) {
            assert_eq!(stage2.fixed, vec![0]);
            assert!(stage2.entries.iter().all(|e| e.column != 0));
            // noise cannot significantly improve on the signal
            assert_eq!(stage2.significantly_better, Some(false));
        }
    }

    #[test]
    fn rater_agreement_identity() {
        let truth = vec![H, M, V, M];
        let r = rater_agreement(&truth, &truth, &truth).unwrap();
        assert_eq!(r.accuracy_a, 1.0);
        assert_eq!(r.accuracy_b, 1.0);
        assert_eq!(r.consistency, 1.0);
    }

    #[test]
    fn rater_agreement_constructed_fixture_hits_published_rate() {
        // 181 instances with 85 agreements: consistency 85/181 = 0.4696...
        let n = 181;
        let agreements = 85;
        let truth = vec![M; n];
        let pred_a = vec![M; n];
        let mut pred_b = vec![M; agreements];
        pred_b.extend(vec![V; n - agreements]);
        let r = rater_agreement(&pred_a, &pred_b, &truth).unwrap();
        assert_eq!(r.consistency, 85.0 / 181.0);
        assert!((r.consistency - reference::EXPERT_CONSISTENCY).abs() < 5e-5);
    }

    #[test]
    fn rater_agreement_length_mismatch_errors() {
        let e = rater_agreement(&[H, M], &[H], &[H, M]);
        assert!(matches!(e, Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn mfc_runs_match_the_class_share() {
        let labels = labels_639();
        let cv = CVConfig::new(5, 2, 61);
        let runs = mfc_baseline_runs(&cv, &labels).unwrap();
        assert_eq!(runs.len(), 10);
        for r in &runs {
            assert!((r - 436.0 / 639.0).abs() < 0.01, "mfc fold accuracy {r}");
        }
    }
}
