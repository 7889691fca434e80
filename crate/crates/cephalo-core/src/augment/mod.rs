//! Tabular data augmentation: SMOTE and its selective variants, post-SMOTE
//! cleaning, and Gaussian-noise injection.
//!
//! All methods share the same factor semantics: every class is enlarged by
//! the same factor, so `round((factor - 1) * n_c)` synthetic points are added
//! per class and the original class proportions are preserved (cleaners may
//! remove points afterwards). Originals are never mutated; synthetic points
//! carry [`Origin::Synthetic`].
//!
//! A run is a pure function of `(set, plan)`: one ChaCha stream is seeded from
//! the plan and consumed in a fixed iteration order, so identical inputs give
//! bit-identical outputs.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use thiserror::Error;

use crate::features::GrowthLabel;
use crate::rng;

mod clean;
mod kmeans;
mod noise;
mod smote;
mod svm;

pub use clean::{enn_clean, smote_enn, smote_tomek, tomek_clean};
pub use kmeans::kmeans_smote;
pub use noise::gaussian_noise;
pub use smote::{adasyn, borderline_smote, smote};
pub use svm::svm_smote;

#[derive(Debug, Error, PartialEq)]
pub enum AugmentError {
    #[error("invalid augmentation plan: {0}")]
    InvalidPlan(String),
    #[error("labeled set is empty")]
    EmptySet,
    #[error("labeled set is inconsistent: {0}")]
    InconsistentSet(String),
    #[error("need at least two classes, found {0}")]
    NeedTwoClasses(usize),
    #[error("need more than {k} points for ENN, got {n}")]
    TooFewForEnn { n: usize, k: usize },
}

/// Augmentation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    None,
    Smote,
    Borderline,
    SvmSmote,
    Adasyn,
    KmeansSmote,
    SmoteTomek,
    SmoteEnn,
    Gaussian,
}

impl Method {
    /// The seven SMOTE-family oversamplers (everything except `None` and
    /// `Gaussian`).
    pub const SMOTE_FAMILY: [Method; 7] = [
        Method::Smote,
        Method::Borderline,
        Method::SvmSmote,
        Method::Adasyn,
        Method::KmeansSmote,
        Method::SmoteTomek,
        Method::SmoteEnn,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::Smote => "smote",
            Method::Borderline => "borderline",
            Method::SvmSmote => "svm-smote",
            Method::Adasyn => "adasyn",
            Method::KmeansSmote => "kmeans-smote",
            Method::SmoteTomek => "smote-tomek",
            Method::SmoteEnn => "smote-enn",
            Method::Gaussian => "gaussian",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "none" => Some(Method::None),
            "smote" => Some(Method::Smote),
            "borderline" => Some(Method::Borderline),
            "svm-smote" => Some(Method::SvmSmote),
            "adasyn" => Some(Method::Adasyn),
            "kmeans-smote" => Some(Method::KmeansSmote),
            "smote-tomek" => Some(Method::SmoteTomek),
            "smote-enn" => Some(Method::SmoteEnn),
            "gaussian" => Some(Method::Gaussian),
            _ => None,
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// How one augmentation run is parameterized.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationPlan {
    pub method: Method,
    /// How many times larger the generated dataset is than the original one;
    /// factor 1 means no synthesis.
    pub factor: f64,
    /// Same-class neighbors used for interpolation.
    pub k_neighbors: usize,
    /// Whole-set neighbors used for danger/safety detection.
    pub m_neighbors: usize,
    /// Neighborhood size of the ENN cleaner.
    pub enn_k: usize,
    /// k-means cluster count for the cluster-density variant.
    pub clusters: usize,
    /// Per-coordinate noise scale of the Gaussian method.
    pub noise_sigma: f64,
    /// Allow outward steps from safe seeds in SVM-SMOTE. Off by default so
    /// every synthetic point stays on a segment between class members.
    pub svm_extrapolate: bool,
    pub seed: u64,
}

impl Default for AugmentationPlan {
    fn default() -> Self {
        AugmentationPlan {
            method: Method::None,
            factor: 1.0,
            k_neighbors: 5,
            m_neighbors: 10,
            enn_k: 3,
            clusters: 8,
            noise_sigma: 0.0,
            svm_extrapolate: false,
            seed: 0,
        }
    }
}

impl AugmentationPlan {
    pub fn with_method(method: Method, factor: f64, seed: u64) -> Self {
        AugmentationPlan {
            method,
            factor,
            seed,
            ..AugmentationPlan::default()
        }
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        if !(self.factor >= 1.0) {
            return Err(AugmentError::InvalidPlan(format!(
                "factor must be >= 1, got {}",
                self.factor
            )));
        }
        if self.k_neighbors == 0 || self.m_neighbors == 0 || self.enn_k == 0 || self.clusters == 0
        {
            return Err(AugmentError::InvalidPlan(String::from(
                "neighbor and cluster counts must be >= 1",
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(AugmentError::InvalidPlan(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Whether a point came from the source data or was synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Original,
    Synthetic,
}

impl Origin {
    pub fn label(self) -> &'static str {
        match self {
            Origin::Original => "original",
            Origin::Synthetic => "synthetic",
        }
    }

    pub fn parse(s: &str) -> Option<Origin> {
        match s {
            "original" => Some(Origin::Original),
            "synthetic" => Some(Origin::Synthetic),
            _ => None,
        }
    }
}

/// Feature vectors with class labels and per-point origin flags.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<GrowthLabel>,
    pub origin: Vec<Origin>,
}

impl LabeledSet {
    /// Wrap source data; every point is flagged [`Origin::Original`].
    pub fn from_originals(
        points: Vec<Vec<f64>>,
        labels: Vec<GrowthLabel>,
    ) -> Result<LabeledSet, AugmentError> {
        let n = points.len();
        let origin = vec![Origin::Original; n];
        let set = LabeledSet {
            points,
            labels,
            origin,
        };
        set.check()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn check(&self) -> Result<(), AugmentError> {
        if self.points.is_empty() {
            return Err(AugmentError::EmptySet);
        }
        if self.labels.len() != self.points.len() || self.origin.len() != self.points.len() {
            return Err(AugmentError::InconsistentSet(format!(
                "{} points, {} labels, {} origin flags",
                self.points.len(),
                self.labels.len(),
                self.origin.len()
            )));
        }
        let d = self.dim();
        if let Some(bad) = self.points.iter().find(|p| p.len() != d) {
            return Err(AugmentError::InconsistentSet(format!(
                "mixed dimensions: {d} vs {}",
                bad.len()
            )));
        }
        Ok(())
    }

    /// Indices per class, in label order.
    pub fn class_indices(&self) -> BTreeMap<GrowthLabel, Vec<usize>> {
        let mut map: BTreeMap<GrowthLabel, Vec<usize>> = BTreeMap::new();
        for (i, &l) in self.labels.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        map
    }

    pub fn class_counts(&self) -> BTreeMap<GrowthLabel, usize> {
        self.class_indices()
            .into_iter()
            .map(|(l, idx)| (l, idx.len()))
            .collect()
    }

    pub(crate) fn push_synthetic(&mut self, point: Vec<f64>, label: GrowthLabel) {
        self.points.push(point);
        self.labels.push(label);
        self.origin.push(Origin::Synthetic);
    }
}

/// A per-class deviation from the nominal algorithm, e.g. a fallback to plain
/// SMOTE when no seeds qualified.
#[derive(Debug, Clone, PartialEq)]
pub struct Fallback {
    pub label: GrowthLabel,
    pub reason: String,
}

/// Bookkeeping for one augmentation run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentReport {
    pub original_counts: BTreeMap<GrowthLabel, usize>,
    pub synthesized: BTreeMap<GrowthLabel, usize>,
    /// Class counts after synthesis, before any cleaning.
    pub pre_clean_counts: BTreeMap<GrowthLabel, usize>,
    /// Points removed per class by Tomek/ENN cleaning.
    pub removed: BTreeMap<GrowthLabel, usize>,
    pub fallbacks: Vec<Fallback>,
    pub warnings: Vec<String>,
}

impl AugmentReport {
    pub(crate) fn new(set: &LabeledSet) -> Self {
        AugmentReport {
            original_counts: set.class_counts(),
            ..AugmentReport::default()
        }
    }

    pub(crate) fn finish_synthesis(&mut self, set: &LabeledSet) {
        self.pre_clean_counts = set.class_counts();
    }
}

/// Run the plan's method on the set.
pub fn augment(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    match plan.method {
        Method::None => {
            let mut report = AugmentReport::new(set);
            report.finish_synthesis(set);
            Ok((set.clone(), report))
        }
        Method::Smote => smote(set, plan),
        Method::Borderline => borderline_smote(set, plan),
        Method::SvmSmote => svm_smote(set, plan),
        Method::Adasyn => adasyn(set, plan),
        Method::KmeansSmote => kmeans_smote(set, plan),
        Method::SmoteTomek => smote_tomek(set, plan),
        Method::SmoteEnn => smote_enn(set, plan),
        Method::Gaussian => gaussian_noise(set, plan),
    }
}

/// Number of synthetic points a class of size `n` receives.
pub fn synthesis_quota(factor: f64, n: usize) -> usize {
    ((factor - 1.0) * n as f64).round() as usize
}

pub(crate) fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    distance_sq(a, b).sqrt()
}

/// Indices of the `k` nearest candidates to `query` by Euclidean distance,
/// ties broken by index. `query_idx` (if among candidates) is excluded.
pub(crate) fn k_nearest(
    points: &[Vec<f64>],
    query_idx: usize,
    candidates: &[usize],
    k: usize,
) -> Vec<usize> {
    let query = &points[query_idx];
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&i| i != query_idx)
        .map(|&i| (distance_sq(&points[i], query), i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, i)| i).collect()
}

/// Largest-remainder apportionment of `total` units proportional to `weights`.
///
/// Weights must be non-negative and not all zero; the returned allocations sum
/// to `total` exactly.
pub(crate) fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    debug_assert!(sum > 0.0, "weights must not all be zero");
    let shares: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut alloc: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = alloc.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(total - assigned) {
        alloc[i] += 1;
    }
    alloc
}

/// `s + u * (nbr - s)`, the SMOTE interpolation step.
pub(crate) fn interpolate(s: &[f64], nbr: &[f64], u: f64) -> Vec<f64> {
    s.iter().zip(nbr).map(|(a, b)| a + u * (b - a)).collect()
}

/// SMOTE-style synthesis for one class: draw a seed from `seeds`, interpolate
/// toward one of the seed's `k` nearest neighbors among `class_members`.
///
/// When the only available neighbor is the seed itself (singleton class), the
/// seed is duplicated and a warning is recorded.
pub(crate) fn synthesize_for_class(
    out: &mut LabeledSet,
    points: &[Vec<f64>],
    label: GrowthLabel,
    seeds: &[usize],
    class_members: &[usize],
    count: usize,
    k: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    warnings: &mut Vec<String>,
) {
    use rand::Rng;
    if count == 0 || seeds.is_empty() {
        return;
    }
    if class_members.len() == 1 {
        warnings.push(format!(
            "class {label} has a single sample; synthesizing duplicates"
        ));
        for _ in 0..count {
            // consume the same draws as the regular path to keep streams aligned
            let _ = rng.gen_range(0..seeds.len());
            let _: f64 = rng.gen();
            out.push_synthetic(points[class_members[0]].clone(), label);
        }
        return;
    }
    let k = k.min(class_members.len() - 1).max(1);
    // neighbor lists are computed lazily per distinct seed
    let mut neighbor_cache: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for _ in 0..count {
        let seed = seeds[rng.gen_range(0..seeds.len())];
        let neighbors = neighbor_cache
            .entry(seed)
            .or_insert_with(|| k_nearest(points, seed, class_members, k));
        let nbr = neighbors[rng.gen_range(0..neighbors.len())];
        let u: f64 = rng.gen();
        out.push_synthetic(interpolate(&points[seed], &points[nbr], u), label);
    }
}

// One stream per run, independent of the method, so the SMOTE phase of the
// Tomek/ENN compositions generates exactly what a plain SMOTE run would.
pub(crate) fn plan_rng(plan: &AugmentationPlan) -> rand_chacha::ChaCha8Rng {
    rng::stream(plan.seed, &[])
}
