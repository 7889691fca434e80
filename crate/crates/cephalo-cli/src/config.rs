//! Flat JSON config documents. Unknown keys are rejected so typos fail fast;
//! every field has a default, so `{}` is always a valid config.

use std::path::Path;

use cephalo_core::augment::{AugmentationPlan, Method};
use cephalo_core::eval::{CVConfig, ExperimentConfig, SelectionConfig};
use cephalo_core::features::{BuildOptions, Family, FeatureMatrix, SdMode, Tag};
use cephalo_core::geometry::SizeMode;
use cephalo_core::models::{ClassifierConfig, ClassifierKind, LOGREG_DEFAULT_MAX_ITER};
use cephalo_core::synth::{AgeModel, CohortConfig};
use serde::Deserialize;

use crate::error::CliError;

pub fn load<T: serde::de::DeserializeOwned + Default>(
    path: Option<&Path>,
) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
            serde_json::from_str(&text).map_err(|e| CliError::file(path, e.to_string()))
        }
    }
}

/// Parse the model notation used in configs and stage tables: `mlp`,
/// `mlp:50,10`, `knn:5`, `logreg`, `tree`, `tree:4`, `forest:100`, `svm`,
/// `xgboost`.
pub fn parse_model(spec: &str) -> Result<ClassifierKind, CliError> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let parse_counts = |args: &str| -> Result<Vec<usize>, CliError> {
        args.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("bad model argument in {spec:?}")))
            })
            .collect()
    };
    match (name, args) {
        ("mlp", None) => Ok(ClassifierKind::Mlp { hidden: vec![] }),
        ("mlp", Some(a)) => Ok(ClassifierKind::Mlp {
            hidden: parse_counts(a)?,
        }),
        ("knn", Some(a)) => {
            let counts = parse_counts(a)?;
            match counts.as_slice() {
                [k] if *k >= 1 => Ok(ClassifierKind::Knn { k: *k }),
                _ => Err(CliError::Config(format!("knn takes one k, got {spec:?}"))),
            }
        }
        ("logreg", None) => Ok(ClassifierKind::Logreg {
            max_iter: LOGREG_DEFAULT_MAX_ITER,
        }),
        ("logreg", Some(a)) => {
            let counts = parse_counts(a)?;
            match counts.as_slice() {
                [n] if *n >= 1 => Ok(ClassifierKind::Logreg { max_iter: *n }),
                _ => Err(CliError::Config(format!("logreg takes one cap, got {spec:?}"))),
            }
        }
        ("tree", None) => Ok(ClassifierKind::Tree { max_depth: None }),
        ("tree", Some(a)) => {
            let counts = parse_counts(a)?;
            match counts.as_slice() {
                [d] => Ok(ClassifierKind::Tree {
                    max_depth: Some(*d),
                }),
                _ => Err(CliError::Config(format!("tree takes one depth, got {spec:?}"))),
            }
        }
        ("forest", Some(a)) => {
            let counts = parse_counts(a)?;
            match counts.as_slice() {
                [t] if *t >= 1 => Ok(ClassifierKind::Forest {
                    n_trees: *t,
                    mtry: None,
                }),
                _ => Err(CliError::Config(format!("forest takes one tree count, got {spec:?}"))),
            }
        }
        ("svm", None) => Ok(ClassifierKind::Svm),
        ("xgboost", None) | ("xgb", None) => Ok(ClassifierKind::Xgboost),
        _ => Err(CliError::Config(format!("unknown model {spec:?}"))),
    }
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    Method::parse(s).ok_or_else(|| CliError::Config(format!("unknown augmentation method {s:?}")))
}

/// Resolve feature references (encoded column names) to matrix indices.
pub fn resolve_columns(
    matrix: &FeatureMatrix,
    refs: &[String],
) -> Result<Vec<usize>, CliError> {
    refs.iter()
        .map(|r| {
            // match either the encoded form or a bare age reference
            matrix
                .columns
                .iter()
                .position(|meta| crate::csv_io::encode_column(meta).ok().as_deref() == Some(r))
                .ok_or_else(|| CliError::Config(format!("unknown feature column {r:?}")))
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfigFile {
    pub n_subjects: usize,
    pub mixture_horizontal: f64,
    pub mixture_mixed: f64,
    pub mixture_vertical: f64,
    pub signal_strength: f64,
    pub base_angle_mean: f64,
    pub base_angle_sd: f64,
    pub delta_mean: f64,
    pub delta_sd: f64,
    pub mid_delta_scale: f64,
    pub shape_sd: f64,
    pub growth_rate: f64,
    pub jitter_sd: f64,
    pub scale_jitter: f64,
    pub magnifications: Vec<f64>,
    pub missing_rate: f64,
    pub age9_mean: f64,
    pub age9_sd: f64,
    pub age9_min: f64,
    pub age9_max: f64,
    pub age12_mean: f64,
    pub age12_sd: f64,
    pub age12_min: f64,
    pub age12_max: f64,
    pub age18_mean: f64,
    pub age18_sd: f64,
    pub age18_min: f64,
    pub age18_max: f64,
    pub seed: u64,
}

impl Default for SynthConfigFile {
    fn default() -> Self {
        let c = CohortConfig::default();
        SynthConfigFile {
            n_subjects: c.n_subjects,
            mixture_horizontal: c.mixture[0],
            mixture_mixed: c.mixture[1],
            mixture_vertical: c.mixture[2],
            signal_strength: c.signal_strength,
            base_angle_mean: c.base_angle_mean,
            base_angle_sd: c.base_angle_sd,
            delta_mean: c.delta_mean,
            delta_sd: c.delta_sd,
            mid_delta_scale: c.mid_delta_scale,
            shape_sd: c.shape_sd,
            growth_rate: c.growth_rate,
            jitter_sd: c.jitter_sd,
            scale_jitter: c.scale_jitter,
            magnifications: c.magnifications.clone(),
            missing_rate: c.missing_rate,
            age9_mean: c.age_nine.mean,
            age9_sd: c.age_nine.sd,
            age9_min: c.age_nine.min,
            age9_max: c.age_nine.max,
            age12_mean: c.age_twelve.mean,
            age12_sd: c.age_twelve.sd,
            age12_min: c.age_twelve.min,
            age12_max: c.age_twelve.max,
            age18_mean: c.age_eighteen.mean,
            age18_sd: c.age_eighteen.sd,
            age18_min: c.age_eighteen.min,
            age18_max: c.age_eighteen.max,
            seed: c.seed,
        }
    }
}

impl SynthConfigFile {
    pub fn to_cohort_config(&self, seed_override: Option<u64>) -> CohortConfig {
        CohortConfig {
            n_subjects: self.n_subjects,
            age_nine: AgeModel {
                mean: self.age9_mean,
                sd: self.age9_sd,
                min: self.age9_min,
                max: self.age9_max,
            },
            age_twelve: AgeModel {
                mean: self.age12_mean,
                sd: self.age12_sd,
                min: self.age12_min,
                max: self.age12_max,
            },
            age_eighteen: AgeModel {
                mean: self.age18_mean,
                sd: self.age18_sd,
                min: self.age18_min,
                max: self.age18_max,
            },
            mixture: [
                self.mixture_horizontal,
                self.mixture_mixed,
                self.mixture_vertical,
            ],
            signal_strength: self.signal_strength,
            base_angle_mean: self.base_angle_mean,
            base_angle_sd: self.base_angle_sd,
            delta_mean: self.delta_mean,
            delta_sd: self.delta_sd,
            mid_delta_scale: self.mid_delta_scale,
            shape_sd: self.shape_sd,
            growth_rate: self.growth_rate,
            jitter_sd: self.jitter_sd,
            scale_jitter: self.scale_jitter,
            magnifications: self.magnifications.clone(),
            missing_rate: self.missing_rate,
            seed: seed_override.unwrap_or(self.seed),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturesConfigFile {
    /// Any of `ceph`, `proc`, `trans`.
    pub families: Vec<String>,
    /// Any of `9`, `12`, `12-9`.
    pub tags: Vec<String>,
    pub labeled: bool,
    /// `population` or `sample`.
    pub sd_mode: String,
    /// `sum-of-distances` or `centroid-size`.
    pub size_mode: String,
    pub gpa_tol: f64,
    pub gpa_max_iter: usize,
}

impl Default for FeaturesConfigFile {
    fn default() -> Self {
        FeaturesConfigFile {
            families: vec!["ceph".into(), "proc".into(), "trans".into()],
            tags: vec!["9".into(), "12".into(), "12-9".into()],
            labeled: true,
            sd_mode: "population".into(),
            size_mode: "sum-of-distances".into(),
            gpa_tol: cephalo_core::geometry::GPA_DEFAULT_TOL,
            gpa_max_iter: cephalo_core::geometry::GPA_DEFAULT_MAX_ITER,
        }
    }
}

impl FeaturesConfigFile {
    pub fn families(&self) -> Result<Vec<Family>, CliError> {
        self.families
            .iter()
            .map(|f| {
                Family::parse(f).ok_or_else(|| CliError::Config(format!("unknown family {f:?}")))
            })
            .collect()
    }

    pub fn tags(&self) -> Result<Vec<Tag>, CliError> {
        self.tags
            .iter()
            .map(|t| Tag::parse(t).ok_or_else(|| CliError::Config(format!("unknown tag {t:?}"))))
            .collect()
    }

    pub fn build_options(&self) -> Result<BuildOptions, CliError> {
        let sd_mode = match self.sd_mode.as_str() {
            "population" => SdMode::Population,
            "sample" => SdMode::Sample,
            other => return Err(CliError::Config(format!("unknown sd_mode {other:?}"))),
        };
        let size_mode = match self.size_mode.as_str() {
            "sum-of-distances" => SizeMode::SumOfDistances,
            "centroid-size" => SizeMode::CentroidSize,
            other => return Err(CliError::Config(format!("unknown size_mode {other:?}"))),
        };
        Ok(BuildOptions {
            labeled: self.labeled,
            sd_mode,
            size_mode,
            gpa_tol: self.gpa_tol,
            gpa_max_iter: self.gpa_max_iter,
        })
    }
}

/// Augmentation-plan fields shared by the evaluate/augment configs.
#[derive(Debug, Clone)]
pub struct PlanFields {
    pub method: String,
    pub factor: f64,
    pub k_neighbors: usize,
    pub m_neighbors: usize,
    pub enn_k: usize,
    pub clusters: usize,
    pub noise_sigma: f64,
    pub svm_extrapolate: bool,
}

impl PlanFields {
    pub fn to_plan(&self, seed: u64) -> Result<AugmentationPlan, CliError> {
        let plan = AugmentationPlan {
            method: parse_method(&self.method)?,
            factor: self.factor,
            k_neighbors: self.k_neighbors,
            m_neighbors: self.m_neighbors,
            enn_k: self.enn_k,
            clusters: self.clusters,
            noise_sigma: self.noise_sigma,
            svm_extrapolate: self.svm_extrapolate,
            seed,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateConfigFile {
    pub model: String,
    /// Encoded column names, e.g. `ceph|SN-MP|12-9` or `age`.
    pub features: Vec<String>,
    pub standardize: bool,
    pub folds: usize,
    pub repeats: usize,
    pub method: String,
    pub factor: f64,
    pub k_neighbors: usize,
    pub m_neighbors: usize,
    pub enn_k: usize,
    pub clusters: usize,
    pub noise_sigma: f64,
    pub svm_extrapolate: bool,
    pub seed: u64,
}

impl Default for EvaluateConfigFile {
    fn default() -> Self {
        let p = AugmentationPlan::default();
        EvaluateConfigFile {
            model: "logreg".into(),
            features: vec![],
            standardize: false,
            folds: 5,
            repeats: 20,
            method: "none".into(),
            factor: p.factor,
            k_neighbors: p.k_neighbors,
            m_neighbors: p.m_neighbors,
            enn_k: p.enn_k,
            clusters: p.clusters,
            noise_sigma: p.noise_sigma,
            svm_extrapolate: p.svm_extrapolate,
            seed: 0,
        }
    }
}

impl EvaluateConfigFile {
    pub fn plan_fields(&self) -> PlanFields {
        PlanFields {
            method: self.method.clone(),
            factor: self.factor,
            k_neighbors: self.k_neighbors,
            m_neighbors: self.m_neighbors,
            enn_k: self.enn_k,
            clusters: self.clusters,
            noise_sigma: self.noise_sigma,
            svm_extrapolate: self.svm_extrapolate,
        }
    }

    pub fn to_experiment(
        &self,
        matrix: &FeatureMatrix,
        seed_override: Option<u64>,
    ) -> Result<ExperimentConfig, CliError> {
        if self.features.is_empty() {
            return Err(CliError::Config(String::from(
                "features list must name at least one column",
            )));
        }
        let seed = seed_override.unwrap_or(self.seed);
        let classifier = ClassifierConfig::new(parse_model(&self.model)?);
        let mut cfg = ExperimentConfig::new(
            classifier,
            resolve_columns(matrix, &self.features)?,
            CVConfig::new(self.folds, self.repeats, seed),
        );
        cfg.standardize = self.standardize;
        cfg.plan = self.plan_fields().to_plan(seed)?;
        Ok(cfg)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectConfigFile {
    pub models: Vec<String>,
    /// Candidate columns; empty means every non-age column.
    pub candidates: Vec<String>,
    /// Columns included in every evaluated set; defaults to the age column.
    pub always_include: Vec<String>,
    pub max_stages: usize,
    pub top_n: usize,
    pub alpha: f64,
    pub standardize: bool,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SelectConfigFile {
    fn default() -> Self {
        let s = SelectionConfig::default();
        SelectConfigFile {
            models: vec!["logreg".into(), "knn:5".into()],
            candidates: vec![],
            always_include: vec!["age".into()],
            max_stages: s.max_stages,
            top_n: s.top_n,
            alpha: s.alpha,
            standardize: s.standardize,
            folds: 5,
            repeats: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfigFile {
    /// Feature columns to augment; at least two (the first two become the
    /// scatter axes).
    pub features: Vec<String>,
    pub standardize: bool,
    pub method: String,
    pub factor: f64,
    pub k_neighbors: usize,
    pub m_neighbors: usize,
    pub enn_k: usize,
    pub clusters: usize,
    pub noise_sigma: f64,
    pub svm_extrapolate: bool,
    pub seed: u64,
}

impl Default for AugmentConfigFile {
    fn default() -> Self {
        let p = AugmentationPlan::default();
        AugmentConfigFile {
            features: vec![],
            standardize: true,
            method: "smote".into(),
            factor: 10.0,
            k_neighbors: p.k_neighbors,
            m_neighbors: p.m_neighbors,
            enn_k: p.enn_k,
            clusters: p.clusters,
            noise_sigma: p.noise_sigma,
            svm_extrapolate: p.svm_extrapolate,
            seed: 0,
        }
    }
}

impl AugmentConfigFile {
    pub fn plan_fields(&self) -> PlanFields {
        PlanFields {
            method: self.method.clone(),
            factor: self.factor,
            k_neighbors: self.k_neighbors,
            m_neighbors: self.m_neighbors,
            enn_k: self.enn_k,
            clusters: self.clusters,
            noise_sigma: self.noise_sigma,
            svm_extrapolate: self.svm_extrapolate,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfigFile {
    pub model: String,
    pub features: Vec<String>,
    pub standardize: bool,
    pub methods: Vec<String>,
    pub factors: Vec<f64>,
    pub k_neighbors: usize,
    pub m_neighbors: usize,
    pub enn_k: usize,
    pub clusters: usize,
    pub noise_sigma: f64,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SweepConfigFile {
    fn default() -> Self {
        let p = AugmentationPlan::default();
        SweepConfigFile {
            model: "logreg".into(),
            features: vec![],
            standardize: true,
            methods: vec![
                "smote".into(),
                "borderline".into(),
                "svm-smote".into(),
                "adasyn".into(),
                "kmeans-smote".into(),
                "smote-tomek".into(),
                "smote-enn".into(),
            ],
            factors: vec![1.0, 5.0, 10.0, 20.0, 30.0],
            k_neighbors: p.k_neighbors,
            m_neighbors: p.m_neighbors,
            enn_k: p.enn_k,
            clusters: p.clusters,
            noise_sigma: p.noise_sigma,
            folds: 5,
            repeats: 20,
            seed: 0,
        }
    }
}

impl SweepConfigFile {
    pub fn methods(&self) -> Result<Vec<Method>, CliError> {
        self.methods.iter().map(|m| parse_method(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_grammar() {
        assert_eq!(parse_model("mlp").unwrap(), ClassifierKind::Mlp { hidden: vec![] });
        assert_eq!(
            parse_model("mlp:50,10").unwrap(),
            ClassifierKind::Mlp {
                hidden: vec![50, 10]
            }
        );
        assert_eq!(parse_model("knn:5").unwrap(), ClassifierKind::Knn { k: 5 });
        assert_eq!(
            parse_model("logreg").unwrap(),
            ClassifierKind::Logreg { max_iter: 2000 }
        );
        assert_eq!(
            parse_model("forest:100").unwrap(),
            ClassifierKind::Forest {
                n_trees: 100,
                mtry: None
            }
        );
        assert_eq!(parse_model("svm").unwrap(), ClassifierKind::Svm);
        assert!(parse_model("perceptron").is_err());
        assert!(parse_model("knn").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<SynthConfigFile>(r#"{"n_subjcts": 10}"#);
        assert!(err.is_err());
        let ok = serde_json::from_str::<SynthConfigFile>(r#"{"n_subjects": 10}"#).unwrap();
        assert_eq!(ok.n_subjects, 10);
        assert_eq!(ok.mixture_mixed, 0.682);
    }

    #[test]
    fn empty_config_is_all_defaults() {
        let cfg: EvaluateConfigFile = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.folds, 5);
        assert_eq!(cfg.repeats, 20);
        assert_eq!(cfg.method, "none");
    }

    #[test]
    fn plan_fields_sit_inline_in_evaluate_config() {
        let cfg: EvaluateConfigFile = serde_json::from_str(
            r#"{"model": "knn:3", "method": "smote", "factor": 10.0, "repeats": 2}"#,
        )
        .unwrap();
        assert_eq!(cfg.method, "smote");
        assert_eq!(cfg.factor, 10.0);
        let plan = cfg.plan_fields().to_plan(7).unwrap();
        assert_eq!(plan.method, Method::Smote);
    }
}
