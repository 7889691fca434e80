//! Plain SMOTE plus the two k-NN-based selective variants: Borderline-SMOTE
//! (borderline-1) and ADASYN.

use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::{
    k_nearest, largest_remainder, plan_rng, synthesis_quota, synthesize_for_class,
    AugmentError, AugmentReport, AugmentationPlan, Fallback, LabeledSet,
};

/// Classic SMOTE: per class, synthesize points on segments between a random
/// class member and one of its `k` nearest same-class neighbors.
pub fn smote(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    let mut rng = plan_rng(plan);
    let mut report = AugmentReport::new(set);
    let mut out = set.clone();
    for (label, members) in set.class_indices() {
        let quota = synthesis_quota(plan.factor, members.len());
        synthesize_for_class(
            &mut out,
            &set.points,
            label,
            &members,
            &members,
            quota,
            plan.k_neighbors,
            &mut rng,
            &mut report.warnings,
        );
        report.synthesized.insert(label, quota);
    }
    report.finish_synthesis(&out);
    Ok((out, report))
}

/// Danger status of one sample under the borderline rule.
///
/// With `m'` other-class members among the `m` whole-set nearest neighbors:
/// safe when `m' < m/2`, danger when `m/2 <= m' < m`, noise when `m' = m`.
fn is_danger(other: usize, m: usize) -> bool {
    2 * other >= m && other < m
}

/// Borderline-SMOTE (borderline-1): only samples on the decision boundary
/// seed synthesis; interpolation stays within the seed's own class.
///
/// A class with no danger samples falls back to plain SMOTE for that class,
/// recorded in the report.
pub fn borderline_smote(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    let n = set.len();
    let all: Vec<usize> = (0..n).collect();
    let m = plan.m_neighbors.min(n.saturating_sub(1)).max(1);

    let mut rng = plan_rng(plan);
    let mut report = AugmentReport::new(set);
    let mut out = set.clone();
    for (label, members) in set.class_indices() {
        let quota = synthesis_quota(plan.factor, members.len());
        let danger: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| {
                let neighbors = k_nearest(&set.points, i, &all, m);
                let other = neighbors
                    .iter()
                    .filter(|&&j| set.labels[j] != label)
                    .count();
                is_danger(other, m)
            })
            .collect();
        let seeds = if danger.is_empty() {
            report.fallbacks.push(Fallback {
                label,
                reason: "no danger samples; plain SMOTE used for this class".to_string(),
            });
            members.clone()
        } else {
            danger
        };
        synthesize_for_class(
            &mut out,
            &set.points,
            label,
            &seeds,
            &members,
            quota,
            plan.k_neighbors,
            &mut rng,
            &mut report.warnings,
        );
        report.synthesized.insert(label, quota);
    }
    report.finish_synthesis(&out);
    Ok((out, report))
}

/// ADASYN: the per-class quota is allocated across samples proportionally to
/// how many other-class points sit among each sample's whole-set neighbors,
/// concentrating synthesis in low-density (hard) regions.
///
/// Weights are apportioned with the largest-remainder rule so the class quota
/// is met exactly; a fully interior class (all weights zero) falls back to a
/// uniform allocation, recorded in the report.
pub fn adasyn(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    let n = set.len();
    let all: Vec<usize> = (0..n).collect();
    let k = plan.k_neighbors.min(n.saturating_sub(1)).max(1);

    let mut rng = plan_rng(plan);
    let mut report = AugmentReport::new(set);
    let mut out = set.clone();
    for (label, members) in set.class_indices() {
        let quota = synthesis_quota(plan.factor, members.len());
        report.synthesized.insert(label, quota);
        if quota == 0 {
            continue;
        }
        let weights: Vec<f64> = members
            .iter()
            .map(|&i| {
                let neighbors = k_nearest(&set.points, i, &all, k);
                let other = neighbors
                    .iter()
                    .filter(|&&j| set.labels[j] != label)
                    .count();
                other as f64 / k as f64
            })
            .collect();
        let allocations = if weights.iter().all(|&w| w == 0.0) {
            report.fallbacks.push(Fallback {
                label,
                reason: format!("class {label} is fully interior; uniform allocation used"),
            });
            largest_remainder(&vec![1.0; members.len()], quota)
        } else {
            largest_remainder(&weights, quota)
        };
        for (&seed, &g) in members.iter().zip(&allocations) {
            synthesize_for_class(
                &mut out,
                &set.points,
                label,
                &[seed],
                &members,
                g,
                plan.k_neighbors,
                &mut rng,
                &mut report.warnings,
            );
        }
    }
    report.finish_synthesis(&out);
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{Method, Origin};
    use crate::features::GrowthLabel;
    use rand::Rng;

    fn two_blob_set(per_class: usize, gap: f64, seed: u64) -> LabeledSet {
        let mut rng = crate::rng::stream(seed, &[1]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..per_class {
            let _ = i;
            points.push(vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]);
            labels.push(GrowthLabel::Horizontal);
        }
        for _ in 0..per_class {
            points.push(vec![gap + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]);
            labels.push(GrowthLabel::Vertical);
        }
        LabeledSet::from_originals(points, labels).unwrap()
    }

    #[test]
    fn factor_one_is_identity() {
        let set = two_blob_set(10, 5.0, 3);
        let plan = AugmentationPlan::with_method(Method::Smote, 1.0, 9);
        let (out, _) = smote(&set, &plan).unwrap();
        assert_eq!(out, set);
    }

    #[test]
    fn single_segment_synthesis_is_collinear_and_between() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![9.0, 9.0], vec![9.5, 9.0]],
            vec![
                GrowthLabel::Horizontal,
                GrowthLabel::Horizontal,
                GrowthLabel::Vertical,
                GrowthLabel::Vertical,
            ],
        )
        .unwrap();
        let mut plan = AugmentationPlan::with_method(Method::Smote, 1.5, 5);
        plan.k_neighbors = 1;
        let (out, _) = smote(&set, &plan).unwrap();
        for (i, p) in out.points.iter().enumerate().skip(set.len()) {
            match out.labels[i] {
                GrowthLabel::Horizontal => {
                    assert!(p[1].abs() < 1e-12, "off the segment: {p:?}");
                    assert!((0.0..=1.0).contains(&p[0]), "outside the segment: {p:?}");
                }
                GrowthLabel::Vertical => {
                    assert!((p[1] - 9.0).abs() < 1e-12);
                    assert!((9.0..=9.5).contains(&p[0]));
                }
                GrowthLabel::Mixed => unreachable!(),
            }
        }
    }

    #[test]
    fn per_class_counts_follow_the_factor_rule() {
        // sizes (100, 430, 100), factor 10 -> (1000, 4300, 1000)
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut rng = crate::rng::stream(5, &[2]);
        for (label, count, center) in [
            (GrowthLabel::Horizontal, 100, -10.0),
            (GrowthLabel::Mixed, 430, 0.0),
            (GrowthLabel::Vertical, 100, 10.0),
        ] {
            for _ in 0..count {
                points.push(vec![center + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
                labels.push(label);
            }
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let plan = AugmentationPlan::with_method(Method::Smote, 10.0, 17);
        let (out, report) = smote(&set, &plan).unwrap();
        let counts = out.class_counts();
        assert_eq!(counts[&GrowthLabel::Horizontal], 1000);
        assert_eq!(counts[&GrowthLabel::Mixed], 4300);
        assert_eq!(counts[&GrowthLabel::Vertical], 1000);
        assert_eq!(report.synthesized[&GrowthLabel::Mixed], 3870);
    }

    #[test]
    fn originals_are_preserved_verbatim() {
        let set = two_blob_set(20, 3.0, 11);
        let plan = AugmentationPlan::with_method(Method::Smote, 3.0, 23);
        let (out, _) = smote(&set, &plan).unwrap();
        for i in 0..set.len() {
            assert_eq!(out.points[i], set.points[i]);
            assert_eq!(out.labels[i], set.labels[i]);
            assert_eq!(out.origin[i], Origin::Original);
        }
        for i in set.len()..out.len() {
            assert_eq!(out.origin[i], Origin::Synthetic);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let set = two_blob_set(15, 2.0, 7);
        let plan = AugmentationPlan::with_method(Method::Smote, 4.0, 99);
        let (a, _) = smote(&set, &plan).unwrap();
        let (b, _) = smote(&set, &plan).unwrap();
        assert_eq!(a, b);
        let other = AugmentationPlan::with_method(Method::Smote, 4.0, 100);
        let (c, _) = smote(&set, &other).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn singleton_class_duplicates_with_warning() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![5.0], vec![6.0]],
            vec![GrowthLabel::Horizontal, GrowthLabel::Mixed, GrowthLabel::Mixed],
        )
        .unwrap();
        let plan = AugmentationPlan::with_method(Method::Smote, 3.0, 1);
        let (out, report) = smote(&set, &plan).unwrap();
        assert!(!report.warnings.is_empty());
        let h: Vec<&Vec<f64>> = out
            .points
            .iter()
            .zip(&out.labels)
            .filter(|(_, &l)| l == GrowthLabel::Horizontal)
            .map(|(p, _)| p)
            .collect();
        assert_eq!(h.len(), 3);
        assert!(h.iter().all(|p| p[0] == 0.0));
    }

    #[test]
    fn danger_rule_bounds() {
        // m' = 0 -> safe, m' = m -> noise, m/2 <= m' < m -> danger
        assert!(!is_danger(0, 10));
        assert!(!is_danger(4, 10));
        assert!(is_danger(5, 10));
        assert!(is_danger(9, 10));
        assert!(!is_danger(10, 10));
    }

    #[test]
    fn borderline_seeds_stay_in_the_frontier_neighborhood() {
        // Two blobs touching at one frontier pair per class: the frontier
        // points see 2 of 3 whole-set neighbors from the other class and are
        // the only danger samples; blob members see only their own class.
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..12 {
            points.push(vec![-10.0 + 0.01 * i as f64, 0.0]);
            labels.push(GrowthLabel::Horizontal);
        }
        points.push(vec![-0.4, 0.0]);
        points.push(vec![-0.4, 0.1]);
        labels.push(GrowthLabel::Horizontal);
        labels.push(GrowthLabel::Horizontal);
        for i in 0..12 {
            points.push(vec![10.0 + 0.01 * i as f64, 0.0]);
            labels.push(GrowthLabel::Vertical);
        }
        points.push(vec![0.4, 0.0]);
        points.push(vec![0.4, 0.1]);
        labels.push(GrowthLabel::Vertical);
        labels.push(GrowthLabel::Vertical);
        let set = LabeledSet::from_originals(points, labels).unwrap();

        let mut plan = AugmentationPlan::with_method(Method::Borderline, 2.0, 3);
        plan.m_neighbors = 3;
        // k = 1: each frontier point's nearest same-class neighbor is its
        // frontier twin, so synthesis stays on the frontier segment
        plan.k_neighbors = 1;
        let (out, report) = borderline_smote(&set, &plan).unwrap();
        assert!(report.fallbacks.is_empty(), "{:?}", report.fallbacks);
        // every synthetic point sits within the frontier neighborhood radius
        for i in set.len()..out.len() {
            let p = &out.points[i];
            let fx = match out.labels[i] {
                GrowthLabel::Horizontal => -0.4,
                GrowthLabel::Vertical => 0.4,
                GrowthLabel::Mixed => unreachable!(),
            };
            let r = ((p[0] - fx).powi(2) + (p[1] - 0.05).powi(2)).sqrt();
            assert!(r <= 0.06 + 1e-9, "synthetic {p:?} escaped the frontier");
        }
    }

    #[test]
    fn borderline_planted_outlier_is_noise_not_seed() {
        // A single H point surrounded entirely by V points is noise (m' = m):
        // with every other H far away, it must not seed synthesis near the V blob.
        let mut points = vec![vec![50.0, 0.0]]; // planted H outlier inside the V region
        let mut labels = vec![GrowthLabel::Horizontal];
        for i in 0..10 {
            points.push(vec![50.0 + 0.1 * (i as f64 + 1.0), 0.0]);
            labels.push(GrowthLabel::Vertical);
        }
        for i in 0..10 {
            points.push(vec![-50.0 - 0.1 * i as f64, 0.0]);
            labels.push(GrowthLabel::Horizontal);
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let mut plan = AugmentationPlan::with_method(Method::Borderline, 2.0, 5);
        plan.m_neighbors = 5;
        let (out, _) = borderline_smote(&set, &plan).unwrap();
        // no H synthetic anywhere near x = 50: the outlier never seeds
        for i in set.len()..out.len() {
            if out.labels[i] == GrowthLabel::Horizontal {
                assert!(out.points[i][0] < 0.0, "outlier seeded: {:?}", out.points[i]);
            }
        }
    }

    #[test]
    fn borderline_no_danger_falls_back_to_smote() {
        let set = two_blob_set(20, 100.0, 1); // far apart: nobody is danger
        let plan = AugmentationPlan::with_method(Method::Borderline, 2.0, 2);
        let (out, report) = borderline_smote(&set, &plan).unwrap();
        assert_eq!(report.fallbacks.len(), 2);
        assert_eq!(out.len(), 2 * set.len());
    }

    #[test]
    fn adasyn_allocations_follow_weights() {
        // planted two-seed scenario with known weights {1.0, 0.0} and G = 10
        let w = [1.0, 0.0];
        let alloc = largest_remainder(&w, 10);
        assert_eq!(alloc, vec![10, 0]);
    }

    #[test]
    fn adasyn_interior_sample_gets_no_synthesis() {
        // H cluster with one member adjacent to the V blob: that member carries
        // all the weight, interior members none.
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..6 {
            points.push(vec![-10.0 - 0.1 * i as f64]);
            labels.push(GrowthLabel::Horizontal);
        }
        points.push(vec![-0.1]); // boundary H
        labels.push(GrowthLabel::Horizontal);
        for i in 0..7 {
            points.push(vec![0.1 + 0.1 * i as f64]);
            labels.push(GrowthLabel::Vertical);
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let mut plan = AugmentationPlan::with_method(Method::Adasyn, 2.0, 13);
        plan.k_neighbors = 3;
        let (out, report) = adasyn(&set, &plan).unwrap();
        assert!(report.fallbacks.is_empty());
        // all H synthesis seeded at the boundary point: every H synthetic lies
        // on a segment from -0.1 toward its same-class neighbors (all < 0)
        for i in set.len()..out.len() {
            if out.labels[i] == GrowthLabel::Horizontal {
                let x = out.points[i][0];
                assert!(x <= -0.1 + 1e-12 && x >= -10.0, "unexpected H synthetic at {x}");
            }
        }
    }

    #[test]
    fn adasyn_quota_is_exact() {
        let set = two_blob_set(30, 1.0, 21);
        let plan = AugmentationPlan::with_method(Method::Adasyn, 3.0, 31);
        let (out, report) = adasyn(&set, &plan).unwrap();
        let counts = out.class_counts();
        assert_eq!(counts[&GrowthLabel::Horizontal], 90);
        assert_eq!(counts[&GrowthLabel::Vertical], 90);
        assert!(report.fallbacks.is_empty());
    }

    #[test]
    fn adasyn_fully_interior_class_falls_back_to_uniform() {
        let set = two_blob_set(10, 1000.0, 2);
        let plan = AugmentationPlan::with_method(Method::Adasyn, 2.0, 3);
        let (out, report) = adasyn(&set, &plan).unwrap();
        assert_eq!(report.fallbacks.len(), 2);
        assert_eq!(out.len(), 40);
    }
}
