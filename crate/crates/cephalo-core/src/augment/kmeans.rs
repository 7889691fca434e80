//! K-means SMOTE: cluster the whole set, then synthesize inside clusters a
//! class dominates, weighting sparse clusters more heavily.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::ToString;
use alloc::vec::Vec;
use alloc::{format, vec};
use rand::Rng;

use super::{
    distance, distance_sq, largest_remainder, plan_rng, synthesis_quota, synthesize_for_class,
    AugmentError, AugmentReport, AugmentationPlan, Fallback, LabeledSet,
};

/// Lloyd iteration cap for the internal k-means.
const KMEANS_MAX_ITER: usize = 100;
/// A cluster is eligible for a class when that class exceeds this share of it.
const ELIGIBILITY_THRESHOLD: f64 = 0.5;

/// Seeded Lloyd k-means; returns per-point cluster assignments.
fn kmeans_assign(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<usize> {
    let n = points.len();
    let d = points[0].len();
    // initial centroids: k distinct points drawn without replacement
    let mut pool: Vec<usize> = (0..n).collect();
    let mut centroids: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let pick = rng.gen_range(0..pool.len());
            points[pool.swap_remove(pick)].clone()
        })
        .collect();
    let mut assign = vec![0usize; n];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let nearest = centroids
                .iter()
                .enumerate()
                .map(|(c, centroid)| (distance_sq(p, centroid), c))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, c)| c)
                .unwrap();
            if assign[i] != nearest {
                assign[i] = nearest;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // recompute centroids; an emptied cluster keeps its previous position
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assign[i]] += 1;
            for (s, v) in sums[assign[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    assign
}

/// Mean pairwise Euclidean distance among the given points; zero for fewer
/// than two points.
fn mean_pairwise_distance(points: &[Vec<f64>], members: &[usize]) -> f64 {
    let n = members.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += distance(&points[members[i]], &points[members[j]]);
            pairs += 1;
        }
    }
    total / pairs as f64
}

/// K-means SMOTE: per class, clusters where the class holds the majority
/// receive the class quota, split proportionally to a sparsity weight (mean
/// pairwise within-cluster distance of the class, raised to the feature-count
/// exponent). Synthesis runs SMOTE-style among the cluster's class members.
///
/// A class with no eligible cluster falls back to plain SMOTE, recorded in
/// the report.
pub fn kmeans_smote(
    set: &LabeledSet,
    plan: &AugmentationPlan,
) -> Result<(LabeledSet, AugmentReport), AugmentError> {
    plan.validate()?;
    set.check()?;
    let n = set.len();
    let k = plan.clusters.min(n);
    let dim = set.dim();

    let mut rng = plan_rng(plan);
    let assign = kmeans_assign(&set.points, k, &mut rng);
    let mut report = AugmentReport::new(set);
    let mut out = set.clone();
    for (label, members) in set.class_indices() {
        let quota = synthesis_quota(plan.factor, members.len());
        report.synthesized.insert(label, quota);
        if quota == 0 {
            continue;
        }
        // eligible clusters and the class members inside each
        let mut eligible: Vec<(usize, Vec<usize>)> = Vec::new();
        for c in 0..k {
            let cluster: Vec<usize> = (0..n).filter(|&i| assign[i] == c).collect();
            if cluster.is_empty() {
                continue;
            }
            let inside: Vec<usize> = cluster
                .iter()
                .copied()
                .filter(|&i| set.labels[i] == label)
                .collect();
            if inside.len() as f64 / cluster.len() as f64 > ELIGIBILITY_THRESHOLD {
                eligible.push((c, inside));
            }
        }
        if eligible.is_empty() {
            report.fallbacks.push(Fallback {
                label,
                reason: "no cluster dominated by this class; plain SMOTE used".to_string(),
            });
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
            continue;
        }
        // sparsity weights in log space: (mean pairwise distance)^dim
        let log_weights: Vec<f64> = eligible
            .iter()
            .map(|(_, inside)| {
                let mpd = mean_pairwise_distance(&set.points, inside);
                if mpd > 0.0 {
                    dim as f64 * mpd.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let max_log = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = if max_log.is_finite() {
            log_weights.iter().map(|lw| (lw - max_log).exp()).collect()
        } else {
            // all eligible clusters hold a single point: split evenly
            report.warnings.push(format!(
                "class {label}: all eligible clusters are singletons; uniform split"
            ));
            vec![1.0; eligible.len()]
        };
        let allocations = largest_remainder(&weights, quota);
        for ((_, inside), &g) in eligible.iter().zip(&allocations) {
            synthesize_for_class(
                &mut out,
                &set.points,
                label,
                inside,
                inside,
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
