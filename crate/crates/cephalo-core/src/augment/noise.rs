//! Gaussian-noise augmentation: perturbed copies of randomly drawn originals.

use alloc::vec::Vec;
use rand::Rng;

use super::{plan_rng, synthesis_quota, AugmentError, AugmentReport, AugmentationPlan, LabeledSet};
use crate::rng::standard_normal;

/// Append `round((factor - 1) * n_c)` noisy copies per class: each copy is a
/// uniformly drawn original with i.i.d. zero-mean Gaussian perturbation of
/// scale `noise_sigma` on every coordinate. Originals stay untouched; with
/// `noise_sigma = 0` the copies are exact.
pub fn gaussian_noise(
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
        report.synthesized.insert(label, quota);
        for _ in 0..quota {
            let src = members[rng.gen_range(0..members.len())];
            let point: Vec<f64> = set.points[src]
                .iter()
                .map(|v| v + plan.noise_sigma * standard_normal(&mut rng))
                .collect();
            out.push_synthetic(point, label);
        }
    }
    report.finish_synthesis(&out);
    Ok((out, report))
}
