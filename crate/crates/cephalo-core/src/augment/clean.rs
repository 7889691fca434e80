//! Post-oversampling cleaners: Tomek-link removal, edited nearest neighbors,
//! and their compositions with SMOTE.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{
    k_nearest, smote, AugmentError, AugmentReport, AugmentationPlan, LabeledSet,
};
use crate::features::GrowthLabel;

/// Nearest neighbor of every point (self excluded), ties broken by index.
fn nearest_neighbor(points: &[Vec<f64>]) -> Vec<usize> {
    let all: Vec<usize> = (0..points.len()).collect();
    (0..points.len())
        .map(|i| k_nearest(points, i, &all, 1)[0])
        .collect()
}

/// Remove the majority-class member of every Tomek link.
///
/// A Tomek link is a cross-class pair of mutual nearest neighbors. The member
/// whose class currently holds the larger count is removed; on a tie neither
/// is. Links are found on the input snapshot in a single pass.
pub fn tomek_clean(set: &LabeledSet) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    set.check()?;
    let counts = set.class_counts();
    if counts.len() < 2 {
        return Err(AugmentError::NeedTwoClasses(counts.len()));
    }
    let mut report = AugmentReport::new(set);
    report.finish_synthesis(set);

    let nn = nearest_neighbor(&set.points);
    let mut to_remove: BTreeSet<usize> = BTreeSet::new();
    for i in 0..set.len() {
        let j = nn[i];
        if j > i && nn[j] == i && set.labels[i] != set.labels[j] {
            let (ci, cj) = (counts[&set.labels[i]], counts[&set.labels[j]]);
            match ci.cmp(&cj) {
                core::cmp::Ordering::Greater => {
                    to_remove.insert(i);
                }
                core::cmp::Ordering::Less => {
                    to_remove.insert(j);
                }
                core::cmp::Ordering::Equal => {}
            }
        }
    }
    Ok((apply_removals(set, &to_remove, &mut report), report))
}

/// Edited nearest neighbors: remove every point whose class differs from the
/// majority class of its `enn_k` nearest neighbors. Neighborhoods are
/// computed on the pre-cleaning snapshot, so decisions do not depend on
/// evaluation order; ties for the majority count as a mismatch.
pub fn enn_clean(
    set: &LabeledSet,
    enn_k: usize,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    set.check()?;
    if set.len() <= enn_k {
        return Err(AugmentError::TooFewForEnn {
            n: set.len(),
            k: enn_k,
        });
    }
    let mut report = AugmentReport::new(set);
    report.finish_synthesis(set);

    let all: Vec<usize> = (0..set.len()).collect();
    let mut to_remove: BTreeSet<usize> = BTreeSet::new();
    for i in 0..set.len() {
        let neighbors = k_nearest(&set.points, i, &all, enn_k);
        let mut votes: BTreeMap<GrowthLabel, usize> = BTreeMap::new();
        for &j in &neighbors {
            *votes.entry(set.labels[j]).or_insert(0) += 1;
        }
        let max = votes.values().copied().max().unwrap_or(0);
        let winners: Vec<GrowthLabel> = votes
            .iter()
            .filter(|(_, &c)| c == max)
            .map(|(&l, _)| l)
            .collect();
        let keeps = winners.len() == 1 && winners[0] == set.labels[i];
        if !keeps {
            to_remove.insert(i);
        }
    }
    Ok((apply_removals(set, &to_remove, &mut report), report))
}

fn apply_removals(
    set: &LabeledSet,
    to_remove: &BTreeSet<usize>,
    report: &mut AugmentReport,
) -> LabeledSet {
    for &i in to_remove {
        *report.removed.entry(set.labels[i]).or_insert(0) += 1;
    }
    let mut out = LabeledSet {
        points: Vec::with_capacity(set.len() - to_remove.len()),
        labels: Vec::with_capacity(set.len() - to_remove.len()),
        origin: Vec::with_capacity(set.len() - to_remove.len()),
    };
    for i in 0..set.len() {
        if !to_remove.contains(&i) {
            out.points.push(set.points[i].clone());
            out.labels.push(set.labels[i]);
            out.origin.push(set.origin[i]);
        }
    }
    out
}

/// SMOTE followed by Tomek-link cleaning; the report carries synthesis counts
/// from the first phase and removal counts from the second.
pub fn smote_tomek(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    let (oversampled, mut report) = smote(set, plan)?;
    let (cleaned, clean_report) = tomek_clean(&oversampled)?;
    report.removed = clean_report.removed;
    Ok((cleaned, report))
}

/// SMOTE followed by edited-nearest-neighbor cleaning.
pub fn smote_enn(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    let (oversampled, mut report) = smote(set, plan)?;
    let (cleaned, clean_report) = enn_clean(&oversampled, plan.enn_k)?;
    report.removed = clean_report.removed;
    Ok((cleaned, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{Method, Origin};
    use rand::Rng;

    use GrowthLabel::{Horizontal as H, Vertical as V};

    #[test]
    fn distant_pure_blobs_have_no_links() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]],
            vec![H, H, V, V],
        )
        .unwrap();
        let (out, report) = tomek_clean(&set).unwrap();
        assert_eq!(out, set);
        assert!(report.removed.is_empty());
    }

    #[test]
    fn majority_member_of_link_is_removed() {
        // A = {(0,0), (0,1)}, B = {(0.1, 0)}: link between (0,0) and (0.1,0);
        // A is the majority, so (0,0) goes.
        let set = LabeledSet::from_originals(
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.1, 0.0]],
            vec![H, H, V],
        )
        .unwrap();
        let (out, report) = tomek_clean(&set).unwrap();
        assert_eq!(out.len(), 2);
        assert!(!out.points.contains(&vec![0.0, 0.0]));
        assert_eq!(report.removed[&H], 1);
    }

    #[test]
    fn tie_removes_neither() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![0.1], vec![5.0], vec![5.1]],
            vec![H, V, H, V],
        )
        .unwrap();
        let (out, _) = tomek_clean(&set).unwrap();
        assert_eq!(out.len(), 4);
    }

    /// Brute-force oracle: all cross-class mutual-NN pairs.
    fn tomek_links_oracle(points: &[Vec<f64>], labels: &[GrowthLabel]) -> Vec<(usize, usize)> {
        let n = points.len();
        let nn = |i: usize| -> usize {
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        };
        let mut links = Vec::new();
        for i in 0..n {
            let j = nn(i);
            if j > i && nn(j) == i && labels[i] != labels[j] {
                links.push((i, j));
            }
        }
        links
    }

    #[test]
    fn removals_match_brute_force_links_and_touch_nothing_else() {
        let mut rng = crate::rng::stream(61, &[0]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..60 {
            points.push(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            labels.push(H);
        }
        for _ in 0..40 {
            points.push(vec![rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5)]);
            labels.push(V);
        }
        let set = LabeledSet::from_originals(points.clone(), labels.clone()).unwrap();
        let (out, _) = tomek_clean(&set).unwrap();

        let links = tomek_links_oracle(&points, &labels);
        let mut expect_removed: BTreeSet<usize> = BTreeSet::new();
        for (i, j) in links {
            // H holds 60, V holds 40: remove the H member
            let (hi, _vi) = if labels[i] == H { (i, j) } else { (j, i) };
            expect_removed.insert(hi);
        }
        let expected: Vec<usize> = (0..set.len()).filter(|i| !expect_removed.contains(i)).collect();
        assert_eq!(out.len(), expected.len());
        for (kept, &orig_idx) in out.points.iter().zip(&expected) {
            assert_eq!(kept, &points[orig_idx]);
        }
    }

    #[test]
    fn homogeneous_set_is_enn_identity() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![H, H, H, H, H],
        )
        .unwrap();
        let (out, _) = enn_clean(&set, 3).unwrap();
        assert_eq!(out, set);
    }

    #[test]
    fn surrounded_point_is_removed() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, 0.1], vec![0.1, 0.1], vec![0.05, 0.05]],
            vec![H, H, H, H, V],
        )
        .unwrap();
        let (out, report) = enn_clean(&set, 3).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(report.removed[&V], 1);
        assert!(out.labels.iter().all(|&l| l == H));
    }

    /// Brute-force neighborhood-vote oracle for ENN.
    fn enn_keep_oracle(points: &[Vec<f64>], labels: &[GrowthLabel], k: usize) -> Vec<bool> {
        let n = points.len();
        (0..n)
            .map(|i| {
                let mut dists: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d: f64 = points[i]
                            .iter()
                            .zip(&points[j])
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        (d, j)
                    })
                    .collect();
                dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut votes: BTreeMap<GrowthLabel, usize> = BTreeMap::new();
                for &(_, j) in dists.iter().take(k) {
                    *votes.entry(labels[j]).or_insert(0) += 1;
                }
                let max = votes.values().copied().max().unwrap();
                let winners: Vec<_> = votes.iter().filter(|(_, &c)| c == max).collect();
                winners.len() == 1 && *winners[0].0 == labels[i]
            })
            .collect()
    }

    #[test]
    fn enn_matches_brute_force_oracle() {
        let mut rng = crate::rng::stream(67, &[0]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..50 {
            points.push(vec![rng.gen_range(-1.0..1.0)]);
            labels.push(H);
        }
        for _ in 0..50 {
            points.push(vec![rng.gen_range(-0.8..1.2)]);
            labels.push(V);
        }
        let set = LabeledSet::from_originals(points.clone(), labels.clone()).unwrap();
        let (out, _) = enn_clean(&set, 3).unwrap();
        let keep = enn_keep_oracle(&points, &labels, 3);
        let expected: Vec<&Vec<f64>> = points
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(p, _)| p)
            .collect();
        assert_eq!(out.len(), expected.len());
        for (got, want) in out.points.iter().zip(expected) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn enn_decisions_are_order_independent() {
        let mut rng = crate::rng::stream(71, &[0]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            points.push(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            labels.push(if i % 2 == 0 { H } else { V });
        }
        let set = LabeledSet::from_originals(points.clone(), labels.clone()).unwrap();
        let (out, _) = enn_clean(&set, 3).unwrap();

        // permute the input; surviving multisets must agree
        let perm: Vec<usize> = (0..40).rev().collect();
        let permuted = LabeledSet::from_originals(
            perm.iter().map(|&i| points[i].clone()).collect(),
            perm.iter().map(|&i| labels[i]).collect(),
        )
        .unwrap();
        let (out_p, _) = enn_clean(&permuted, 3).unwrap();
        let mut a: Vec<(Vec<u64>, GrowthLabel)> = out
            .points
            .iter()
            .zip(&out.labels)
            .map(|(p, &l)| (p.iter().map(|v| v.to_bits()).collect(), l))
            .collect();
        let mut b: Vec<(Vec<u64>, GrowthLabel)> = out_p
            .points
            .iter()
            .zip(&out_p.labels)
            .map(|(p, &l)| (p.iter().map(|v| v.to_bits()).collect(), l))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn enn_too_few_points_errors() {
        let set = LabeledSet::from_originals(vec![vec![0.0], vec![1.0]], vec![H, V]).unwrap();
        assert!(matches!(
            enn_clean(&set, 3),
            Err(AugmentError::TooFewForEnn { .. })
        ));
    }

    #[test]
    fn factor_one_on_separable_data_is_identity_end_to_end() {
        let set = LabeledSet::from_originals(
            vec![vec![0.0], vec![0.2], vec![0.4], vec![9.0], vec![9.2], vec![9.4]],
            vec![H, H, H, V, V, V],
        )
        .unwrap();
        for method in [Method::SmoteTomek, Method::SmoteEnn] {
            let plan = AugmentationPlan::with_method(method, 1.0, 5);
            let (out, _) = super::super::augment(&set, &plan).unwrap();
            assert_eq!(out, set, "{method} altered a clean separable set");
        }
    }

    #[test]
    fn output_size_is_smote_size_minus_removals() {
        let mut rng = crate::rng::stream(73, &[0]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..30 {
            points.push(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            labels.push(H);
        }
        for _ in 0..20 {
            points.push(vec![rng.gen_range(-0.7..1.3), rng.gen_range(-0.7..1.3)]);
            labels.push(V);
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let plan = AugmentationPlan::with_method(Method::SmoteEnn, 3.0, 79);
        let (smote_out, _) = smote(&set, &plan).unwrap();
        let (combined, report) = smote_enn(&set, &plan).unwrap();
        let removed: usize = report.removed.values().sum();
        assert_eq!(combined.len(), smote_out.len() - removed);
        assert!(removed > 0, "fixture should produce overlap removals");
    }

    #[test]
    fn cleaner_can_remove_synthetic_points_and_flags_survive() {
        // overlapping blobs force boundary synthesis that ENN then removes
        let mut rng = crate::rng::stream(83, &[0]);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..25 {
            points.push(vec![rng.gen_range(-1.0..0.6)]);
            labels.push(H);
        }
        for _ in 0..25 {
            points.push(vec![rng.gen_range(-0.6..1.0)]);
            labels.push(V);
        }
        let set = LabeledSet::from_originals(points, labels).unwrap();
        let plan = AugmentationPlan::with_method(Method::SmoteEnn, 4.0, 89);
        let (smote_out, _) = smote(&set, &plan).unwrap();
        let (combined, _) = smote_enn(&set, &plan).unwrap();
        let synth_before = smote_out
            .origin
            .iter()
            .filter(|&&o| o == Origin::Synthetic)
            .count();
        let synth_after = combined
            .origin
            .iter()
            .filter(|&&o| o == Origin::Synthetic)
            .count();
        assert!(synth_after < synth_before, "no synthetic point was cleaned");
        assert!(combined.origin.iter().any(|&o| o == Origin::Synthetic));
    }
}
