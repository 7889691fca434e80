//! SVM-SMOTE: an internal linear soft-margin classifier locates each class's
//! borderline, and only its support vectors seed synthesis.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};
use rand::Rng;

use super::{
    k_nearest, plan_rng, synthesis_quota, AugmentError, AugmentReport, AugmentationPlan,
    Fallback, LabeledSet,
};
use crate::features::Standardizer;


/// Margin slack: a point is a support vector when `y * f(x) <= 1 + tol`.
pub const SVM_SUPPORT_TOL: f64 = 1e-6;
/// L2 regularization strength of the internal classifier.
pub const SVM_LAMBDA: f64 = 1e-3;
/// Full-batch subgradient epochs.
pub const SVM_EPOCHS: usize = 1000;

struct LinearSvm {
    weights: Vec<f64>,
    bias: f64,
}

impl LinearSvm {
    fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Full-batch subgradient descent on the L2-regularized hinge loss, with
/// suffix averaging over the second half of the epochs for a stable iterate.
fn train_binary_svm(points: &[Vec<f64>], targets: &[f64]) -> LinearSvm {
    let d = points[0].len();
    let n = points.len() as f64;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut w_acc = vec![0.0; d];
    let mut b_acc = 0.0;
    let mut averaged = 0usize;
    for epoch in 0..SVM_EPOCHS {
        let step = 1.0 / (SVM_LAMBDA * (epoch as f64 + 2.0));
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (x, &y) in points.iter().zip(targets) {
            let f = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + b;
            if y * f < 1.0 {
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g -= y * xi;
                }
                gb -= y;
            }
        }
        for (wi, gi) in w.iter_mut().zip(&gw) {
            *wi -= step * (SVM_LAMBDA * *wi + gi / n);
        }
        b -= step * (gb / n);
        if epoch >= SVM_EPOCHS / 2 {
            for (acc, wi) in w_acc.iter_mut().zip(&w) {
                *acc += wi;
            }
            b_acc += b;
            averaged += 1;
        }
    }
    let scale = 1.0 / averaged as f64;
    LinearSvm {
        weights: w_acc.into_iter().map(|x| x * scale).collect(),
        bias: b_acc * scale,
    }
}

/// SVM-SMOTE: per class, a one-vs-rest linear soft-margin model is trained on
/// internally standardized features, and the class's support vectors
/// (margin-violating or on-margin points) become the synthesis seeds.
///
/// Seeds interpolate toward same-class neighbors. When
/// [`AugmentationPlan::svm_extrapolate`] is set, a seed whose whole-set
/// neighborhood is majority same-class steps outward instead
/// (`s + u * (s - nbr)`), which can leave the class's convex hull; it is off
/// by default. A class with no support vectors falls back to plain SMOTE,
/// recorded in the report.
pub fn svm_smote(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    let by_class = set.class_indices();
    if by_class.len() < 2 {
        return Err(AugmentError::NeedTwoClasses(by_class.len()));
    }
    let n = set.len();
    let all: Vec<usize> = (0..n).collect();
    let m = plan.m_neighbors.min(n.saturating_sub(1)).max(1);

    // decision geometry is computed in standardized space
    let standardizer =
        Standardizer::fit_rows(&set.points).map_err(|e| AugmentError::InconsistentSet(e.to_string()))?;
    let scaled = standardizer
        .transform_rows(&set.points)
        .map_err(|e| AugmentError::InconsistentSet(e.to_string()))?;

    let mut rng = plan_rng(plan);
    let mut report = AugmentReport::new(set);
    let mut out = set.clone();
    for (&label, members) in &by_class {
        let quota = synthesis_quota(plan.factor, members.len());
        report.synthesized.insert(label, quota);
        if quota == 0 {
            continue;
        }
        let targets: Vec<f64> = set
            .labels
            .iter()
            .map(|&l| if l == label { 1.0 } else { -1.0 })
            .collect();
        let svm = train_binary_svm(&scaled, &targets);
        let support: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| svm.decision(&scaled[i]) <= 1.0 + SVM_SUPPORT_TOL)
            .collect();
        let seeds = if support.is_empty() {
            report.fallbacks.push(Fallback {
                label,
                reason: "no support vectors; plain SMOTE used for this class".to_string(),
            });
            members.clone()
        } else {
            support
        };
        synthesize_svm(
            &mut out,
            set,
            label,
            &seeds,
            members,
            quota,
            plan,
            m,
            &all,
            &mut rng,
            &mut report,
        );
    }
    report.finish_synthesis(&out);
    Ok((out, report))
}

#[allow(clippy::too_many_arguments)]
fn synthesize_svm(
    out: &mut LabeledSet,
    set: &LabeledSet,
    label: crate::features::GrowthLabel,
    seeds: &[usize],
    members: &[usize],
    quota: usize,
    plan: &AugmentationPlan,
    m: usize,
    all: &[usize],
    rng: &mut rand_chacha::ChaCha8Rng,
    report: &mut AugmentReport,
) {
    if members.len() == 1 {
        report.warnings.push(format!(
            "class {label} has a single sample; synthesizing duplicates"
        ));
        for _ in 0..quota {
            let _ = rng.gen_range(0..seeds.len());
            let _: f64 = rng.gen();
            out.push_synthetic(set.points[members[0]].clone(), label);
        }
        return;
    }
    let k = plan.k_neighbors.min(members.len() - 1).max(1);
    for _ in 0..quota {
        let seed = seeds[rng.gen_range(0..seeds.len())];
        let neighbors = k_nearest(&set.points, seed, members, k);
        let nbr = neighbors[rng.gen_range(0..neighbors.len())];
        let u: f64 = rng.gen();
        let point = if plan.svm_extrapolate && is_safe(set, seed, label, m, all) {
            // outward step, away from the neighbor
            set.points[seed]
                .iter()
                .zip(&set.points[nbr])
                .map(|(s, n)| s + u * (s - n))
                .collect()
        } else {
            super::interpolate(&set.points[seed], &set.points[nbr], u)
        };
        out.push_synthetic(point, label);
    }
}

/// A seed is safe when the majority of its whole-set neighborhood shares its class.
fn is_safe(set: &LabeledSet, idx: usize, label: crate::features::GrowthLabel, m: usize, all: &[usize]) -> bool {
    let neighbors = k_nearest(&set.points, idx, all, m);
    let same = neighbors.iter().filter(|&&j| set.labels[j] == label).count();
    2 * same > neighbors.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::Method;
    use crate::features::GrowthLabel;

    /// Two distant blobs plus two planted points that violate the margin.
    /// The blobs sit far outside the margin band; only the planted points
    /// qualify as support vectors.
    fn margin_fixture() -> (LabeledSet, Vec<usize>) {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            points.push(vec![-8.0 - 0.05 * i as f64, (i % 3) as f64 * 0.1]);
            labels.push(GrowthLabel::Horizontal);
        }
        for i in 0..10 {
            points.push(vec![8.0 + 0.05 * i as f64, (i % 3) as f64 * 0.1]);
            labels.push(GrowthLabel::Vertical);
        }
        // margin violators straddling the boundary at x = 0
        points.push(vec![0.5, 0.0]);
        labels.push(GrowthLabel::Horizontal); // on the wrong side
        points.push(vec![-0.5, 0.0]);
        labels.push(GrowthLabel::Vertical); // on the wrong side
        let planted = vec![20, 21];
        (LabeledSet::from_originals(points, labels).unwrap(), planted)
    }

    #[test]
    fn seeds_are_only_near_margin_points() {
        let (set, planted) = margin_fixture();
        let mut plan = AugmentationPlan::with_method(Method::SvmSmote, 2.0, 7);
        plan.k_neighbors = 3;
        let (out, report) = svm_smote(&set, &plan).unwrap();
        assert!(report.fallbacks.is_empty(), "fallbacks: {:?}", report.fallbacks);
        // every synthetic point lies on a segment from a planted violator
        // toward one of its same-class neighbors; for class H the violator is
        // at x = 0.5 and neighbors are at x <= -8, so synthetics stay within
        // [-8.45, 0.5]; blobs themselves never seed (they sit at |f| >> 1).
        for i in set.len()..out.len() {
            let x = out.points[i][0];
            match out.labels[i] {
                GrowthLabel::Horizontal => {
                    assert!(x <= 0.5 + 1e-9 && x >= -8.45 - 1e-9, "H synthetic at {x}");
                    // seeded at the violator: segment passes through it
                }
                GrowthLabel::Vertical => {
                    assert!(x >= -0.5 - 1e-9 && x <= 8.45 + 1e-9, "V synthetic at {x}");
                }
                GrowthLabel::Mixed => unreachable!(),
            }
        }
        let _ = planted;
    }

    #[test]
    fn factor_one_is_identity() {
        let (set, _) = margin_fixture();
        let plan = AugmentationPlan::with_method(Method::SvmSmote, 1.0, 3);
        let (out, _) = svm_smote(&set, &plan).unwrap();
        assert_eq!(out, set);
    }

    #[test]
    fn quota_conservation_per_class() {
        let (set, _) = margin_fixture();
        let plan = AugmentationPlan::with_method(Method::SvmSmote, 3.0, 11);
        let (out, _) = svm_smote(&set, &plan).unwrap();
        let counts = out.class_counts();
        // 11 H originals and 11 V originals, factor 3 -> 33 each
        assert_eq!(counts[&GrowthLabel::Horizontal], 33);
        assert_eq!(counts[&GrowthLabel::Vertical], 33);
    }

    #[test]
    fn single_class_is_an_error() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![1.0]],
            vec![GrowthLabel::Mixed, GrowthLabel::Mixed],
        )
        .unwrap();
        let plan = AugmentationPlan::with_method(Method::SvmSmote, 2.0, 1);
        assert!(matches!(
            svm_smote(&set, &plan),
            Err(AugmentError::NeedTwoClasses(1))
        ));
    }

    #[test]
    fn separable_blobs_without_violators_fall_back_or_seed_near_margin() {
        // No planted violators: depending on convergence the nearest blob
        // points may or may not sit inside the margin band; either a fallback
        // is recorded or synthesis happens, but counts always hold.
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..12 {
            points.push(vec![-5.0 - 0.1 * i as f64]);
            labels.push(GrowthLabel::Horizontal);
        }
        for i in 0..12 {
            points.push(vec![5.0 + 0.1 * i as f64]);
            labels.push(GrowthLabel::Vertical);
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let plan = AugmentationPlan::with_method(Method::SvmSmote, 2.0, 5);
        let (out, _) = svm_smote(&set, &plan).unwrap();
        assert_eq!(out.len(), 48);
    }
}
