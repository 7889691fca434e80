//! Seeded synthetic longitudinal cohort generator.
//!
//! The generator is an oracle, not an anatomical simulator: each subject gets
//! a latent growth class, an exact SN/MP trajectory hitting that class's band,
//! and a 12-minus-9 change correlated with the 9-to-18 change at a chosen
//! strength. Scale, magnification, and landmarking-jitter noises mimic the
//! heterogeneity of multi-collection radiograph archives. The emitted truth
//! table stays separate from the cohort so pipelines cannot leak it.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use rand::Rng;
use thiserror::Error;

use crate::features::{categorize_target, GrowthLabel, SdMode};
use crate::geometry::{names, sn_mp_angle, AgeGroup, Cephalogram, LandmarkRegistry, Point};
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid cohort config: {0}")]
    InvalidConfig(String),
    #[error("could not realize the class mixture within {rounds} refinement rounds")]
    Infeasible { rounds: usize },
    #[error("geometry construction failed: {0}")]
    Geometry(String),
}

/// Age distribution of one imaging group: normal draw clamped to the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeModel {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl AgeModel {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
        (self.mean + self.sd * crate::rng::standard_normal(rng)).clamp(self.min, self.max)
    }
}

/// Cohort generation parameters. Defaults mirror the source study's shape:
/// 639 subjects, a 15.9/68.2/15.9 class mixture, and the published age
/// statistics per group.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortConfig {
    pub n_subjects: usize,
    pub age_nine: AgeModel,
    pub age_twelve: AgeModel,
    pub age_eighteen: AgeModel,
    /// Horizontal / Mixed / Vertical shares; must sum to one.
    pub mixture: [f64; 3],
    /// Correlation knob in [0, 1] linking SN/MP(12-9) to SN/MP(18-9).
    pub signal_strength: f64,
    /// Subject baseline SN/MP angle distribution (degrees).
    pub base_angle_mean: f64,
    pub base_angle_sd: f64,
    /// SN/MP(18) - SN/MP(9) distribution (degrees).
    pub delta_mean: f64,
    pub delta_sd: f64,
    /// Scale of the 12-minus-9 change (degrees).
    pub mid_delta_scale: f64,
    /// Per-subject anatomical variation around the template (units).
    pub shape_sd: f64,
    /// Overall size growth per year of age.
    pub growth_rate: f64,
    /// Manual-landmarking noise SD per coordinate per image (units).
    pub jitter_sd: f64,
    /// Per-image uniform scale jitter half-width (relative).
    pub scale_jitter: f64,
    /// Per-collection magnification factors; subjects are assigned round-robin
    /// through a seeded shuffle.
    pub magnifications: Vec<f64>,
    /// Probability that a subject lacks one of the 12/18-year records.
    pub missing_rate: f64,
    pub seed: u64,
}

impl Default for CohortConfig {
    fn default() -> Self {
        CohortConfig {
            n_subjects: 639,
            age_nine: AgeModel {
                mean: 9.06,
                sd: 0.45,
                min: 6.00,
                max: 10.92,
            },
            age_twelve: AgeModel {
                mean: 12.07,
                sd: 0.39,
                min: 10.00,
                max: 13.75,
            },
            age_eighteen: AgeModel {
                mean: 17.41,
                sd: 1.71,
                min: 15.00,
                max: 28.42,
            },
            mixture: [0.159, 0.682, 0.159],
            signal_strength: 0.85,
            base_angle_mean: 32.0,
            base_angle_sd: 3.0,
            delta_mean: -1.0,
            delta_sd: 3.0,
            mid_delta_scale: 1.5,
            shape_sd: 2.0,
            growth_rate: 0.025,
            jitter_sd: 0.5,
            scale_jitter: 0.05,
            magnifications: vec![1.00, 1.06, 1.12, 0.94, 1.18],
            missing_rate: 0.0,
            seed: 0,
        }
    }
}

impl CohortConfig {
    fn validate(&self) -> Result<(), SynthError> {
        if self.n_subjects < 2 {
            return Err(SynthError::InvalidConfig(String::from(
                "need at least two subjects",
            )));
        }
        let total: f64 = self.mixture.iter().sum();
        if (total - 1.0).abs() > 1e-9 || self.mixture.iter().any(|&m| m < 0.0) {
            return Err(SynthError::InvalidConfig(format!(
                "mixture must be non-negative and sum to one, got {:?}",
                self.mixture
            )));
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return Err(SynthError::InvalidConfig(String::from(
                "signal_strength must lie in [0, 1]",
            )));
        }
        for (name, v) in [
            ("delta_sd", self.delta_sd),
            ("base_angle_sd", self.base_angle_sd),
            ("mid_delta_scale", self.mid_delta_scale),
            ("shape_sd", self.shape_sd),
            ("jitter_sd", self.jitter_sd),
            ("scale_jitter", self.scale_jitter),
        ] {
            if v < 0.0 {
                return Err(SynthError::InvalidConfig(format!("{name} must be >= 0")));
            }
        }
        if self.delta_sd == 0.0 {
            return Err(SynthError::InvalidConfig(String::from(
                "delta_sd must be positive",
            )));
        }
        if !(0.0..=1.0).contains(&self.missing_rate) {
            return Err(SynthError::InvalidConfig(String::from(
                "missing_rate must lie in [0, 1]",
            )));
        }
        if self.magnifications.is_empty() || self.magnifications.iter().any(|&m| m <= 0.0) {
            return Err(SynthError::InvalidConfig(String::from(
                "magnifications must be non-empty and positive",
            )));
        }
        Ok(())
    }
}

/// Ground truth for one subject, kept apart from the emitted cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub subject_id: String,
    pub label: GrowthLabel,
    /// Noise-free SN/MP(18) - SN/MP(9), degrees.
    pub delta: f64,
    /// Noise-free SN/MP(12) - SN/MP(9), degrees.
    pub mid_delta: f64,
}

/// Landmark template of a lateral cephalogram tracing, Sella at the origin,
/// anterior to the right, superior up; units are arbitrary image units.
fn template() -> [(&'static str, f64, f64); 20] {
    [
        (names::SELLA, 0.0, 0.0),
        (names::NASION, 68.0, 8.0),
        (names::ORBITALE, 60.0, -8.0),
        (names::PORION, -8.0, -10.0),
        (names::BASION, -12.0, -28.0),
        (names::ARTICULARE, -6.0, -30.0),
        (names::CONDYLION, -4.0, -24.0),
        (names::POST_ETHMOID, 20.0, 2.0),
        (names::ANTERIOR_NASAL_SPINE, 62.0, -28.0),
        (names::POSTERIOR_NASAL_SPINE, 30.0, -30.0),
        (names::POINT_A, 60.0, -34.0),
        (names::POINT_B, 56.0, -56.0),
        (names::POGONION, 54.0, -64.0),
        (names::GNATHION, 50.0, -68.0),
        (names::MENTON, 45.0, -70.0),
        (names::ANTEGONIAL_NOTCH, 22.0, -58.0),
        (names::GONION_INFERIOR, 12.0, -52.0),
        (names::PRE_GONION, 8.0, -48.0),
        (names::GONION_POSTERIOR, 2.0, -44.0),
        (names::RAMUS_POINT, 0.0, -36.0),
    ]
}

/// Landmarks that rotate with the mandible about Condylion.
const MANDIBLE: [&str; 9] = [
    names::POINT_B,
    names::POGONION,
    names::GNATHION,
    names::MENTON,
    names::ANTEGONIAL_NOTCH,
    names::GONION_INFERIOR,
    names::PRE_GONION,
    names::GONION_POSTERIOR,
    names::RAMUS_POINT,
];

/// The default 20-landmark registry emitted and consumed by this generator.
pub fn default_registry() -> LandmarkRegistry {
    LandmarkRegistry::all_required(template().iter().map(|(n, _, _)| *n))
}

/// Rotate the mandibular landmark set about Condylion so SN/MP hits
/// `target_deg` exactly.
fn set_sn_mp(c: &mut Cephalogram, target_deg: f64) -> Result<(), SynthError> {
    let current = sn_mp_angle(c).map_err(|e| SynthError::Geometry(format!("{e}")))?;
    let hinge = c
        .landmark(names::CONDYLION)
        .map_err(|e| SynthError::Geometry(format!("{e}")))?;
    for angle in [target_deg - current, current - target_deg] {
        let mut probe = c.clone();
        let (s, cos) = angle.to_radians().sin_cos();
        for lm in MANDIBLE {
            let p = probe
                .landmark(lm)
                .map_err(|e| SynthError::Geometry(format!("{e}")))?;
            let (dx, dy) = (p.x - hinge.x, p.y - hinge.y);
            probe.set_landmark(
                lm,
                Point::new(hinge.x + dx * cos - dy * s, hinge.y + dx * s + dy * cos),
            );
        }
        let achieved = sn_mp_angle(&probe).map_err(|e| SynthError::Geometry(format!("{e}")))?;
        if (achieved - target_deg).abs() < 1e-9 {
            *c = probe;
            return Ok(());
        }
    }
    Err(SynthError::Geometry(format!(
        "could not rotate SN/MP from {current:.3} to {target_deg:.3}"
    )))
}

/// Draw a standard-normal value confined to a class band with a guard margin.
fn draw_banded_z(
    label: GrowthLabel,
    guard: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> f64 {
    loop {
        let z = rng::standard_normal(rng);
        let ok = match label {
            GrowthLabel::Horizontal => z <= -1.0 - guard,
            GrowthLabel::Mixed => z.abs() <= 1.0 - guard,
            GrowthLabel::Vertical => z >= 1.0 + guard,
        };
        if ok {
            return z;
        }
    }
}

const REFINE_ROUNDS: usize = 40;

/// Generate the cohort and its hidden truth table.
///
/// Class quotas come from the mixture by largest-remainder rounding; per-class
/// deltas are drawn inside guard-banded z-ranges and refined until the
/// dataset-level banding of the realized deltas reproduces every intended
/// label exactly, so the truth table always agrees with
/// [`categorize_target`] on the noise-free deltas.
pub fn generate_cohort(
    cfg: &CohortConfig,
) -> Result<(Vec<Cephalogram>, Vec<TruthRow>), SynthError> {
    cfg.validate()?;
    let n = cfg.n_subjects;
    let width = format!("{}", n.max(1000) - 1).len();

    // class quotas by largest remainder
    let shares: Vec<f64> = cfg.mixture.iter().map(|m| m * n as f64).collect();
    let mut quota: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = quota.iter().sum();
    let mut order: Vec<usize> = vec![0, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().take(n - assigned) {
        quota[i] += 1;
    }

    // intended class per subject, distributed by a seeded shuffle
    let mut intended: Vec<GrowthLabel> = Vec::with_capacity(n);
    for (class, &q) in GrowthLabel::ALL.iter().zip(&quota) {
        intended.extend(core::iter::repeat(*class).take(q));
    }
    let mut shuffle_rng = rng::stream(cfg.seed, &[0xA55]);
    for i in (1..n).rev() {
        let j = shuffle_rng.gen_range(0..=i);
        intended.swap(i, j);
    }

    // draw z per subject, refining until realized banding matches intent
    let mut z: Vec<f64> = (0..n)
        .map(|i| {
            let mut subject_rng = rng::stream(cfg.seed, &[1, i as u64]);
            draw_banded_z(intended[i], 0.1, &mut subject_rng)
        })
        .collect();
    let mut settled = false;
    for round in 0..REFINE_ROUNDS {
        let deltas: Vec<f64> = z.iter().map(|zi| cfg.delta_mean + cfg.delta_sd * zi).collect();
        let (classes, _) = categorize_target(&deltas, SdMode::Population)
            .map_err(|_| SynthError::Infeasible { rounds: round })?;
        let mismatched: Vec<usize> = (0..n)
            .filter(|&i| classes[i].label != intended[i])
            .collect();
        if mismatched.is_empty() {
            settled = true;
            break;
        }
        let guard = 0.1 * 1.5f64.powi(round as i32 + 1);
        for &i in &mismatched {
            let mut subject_rng = rng::stream(cfg.seed, &[2, i as u64, round as u64]);
            z[i] = draw_banded_z(intended[i], guard.min(2.0), &mut subject_rng);
        }
    }
    if !settled {
        return Err(SynthError::Infeasible {
            rounds: REFINE_ROUNDS,
        });
    }

    // collection assignment for magnification factors
    let mut collection_rng = rng::stream(cfg.seed, &[0xC0]);
    let collections: Vec<usize> = (0..n)
        .map(|_| collection_rng.gen_range(0..cfg.magnifications.len()))
        .collect();

    let base_template = template();
    let mut cohort = Vec::with_capacity(n * 3);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let mut subject_rng = rng::stream(cfg.seed, &[3, i as u64]);
        let subject_id = format!("S{i:0width$}");
        let delta = cfg.delta_mean + cfg.delta_sd * z[i];
        let noise = rng::standard_normal(&mut subject_rng);
        let rho = cfg.signal_strength;
        let mid_delta = cfg.mid_delta_scale * (rho * z[i] + (1.0 - rho * rho).sqrt() * noise);
        let base_angle = (cfg.base_angle_mean + cfg.base_angle_sd * rng::standard_normal(&mut subject_rng))
            .clamp(22.0, 42.0);

        // per-subject anatomy, fixed across timestamps
        let offsets: Vec<(f64, f64)> = (0..base_template.len())
            .map(|_| {
                (
                    cfg.shape_sd * rng::standard_normal(&mut subject_rng),
                    cfg.shape_sd * rng::standard_normal(&mut subject_rng),
                )
            })
            .collect();

        let missing: Option<AgeGroup> = if cfg.missing_rate > 0.0
            && subject_rng.gen::<f64>() < cfg.missing_rate
        {
            Some(if subject_rng.gen::<bool>() {
                AgeGroup::Twelve
            } else {
                AgeGroup::Eighteen
            })
        } else {
            None
        };

        let magnification = cfg.magnifications[collections[i]];
        for (group, age_model, target) in [
            (AgeGroup::Nine, &cfg.age_nine, base_angle),
            (AgeGroup::Twelve, &cfg.age_twelve, base_angle + mid_delta),
            (AgeGroup::Eighteen, &cfg.age_eighteen, base_angle + delta),
        ] {
            let age = age_model.draw(&mut subject_rng);
            // draw the per-record noises regardless of retention so the
            // remaining records do not depend on the missingness coin
            let scale = magnification * (1.0 + cfg.scale_jitter * (2.0 * subject_rng.gen::<f64>() - 1.0));
            let (tx, ty) = (
                150.0 + 20.0 * (2.0 * subject_rng.gen::<f64>() - 1.0),
                200.0 + 20.0 * (2.0 * subject_rng.gen::<f64>() - 1.0),
            );
            let jitters: Vec<(f64, f64)> = (0..base_template.len())
                .map(|_| {
                    (
                        cfg.jitter_sd * rng::standard_normal(&mut subject_rng),
                        cfg.jitter_sd * rng::standard_normal(&mut subject_rng),
                    )
                })
                .collect();
            if missing == Some(group) {
                continue;
            }

            let mut record = Cephalogram::new(subject_id.clone(), group, age);
            let growth = 1.0 + cfg.growth_rate * (age - 9.0);
            for ((name, bx, by), (ox, oy)) in base_template.iter().zip(&offsets) {
                record.set_landmark(*name, Point::new((bx + ox) * growth, (by + oy) * growth));
            }
            set_sn_mp(&mut record, target)?;
            // angle-neutral noises after the rotation, landmark jitter last
            let landmark_list: Vec<(String, Point)> = record
                .landmarks()
                .map(|(n, p)| (String::from(n), p))
                .collect();
            for ((name, p), (jx, jy)) in landmark_list.into_iter().zip(&jitters) {
                record.set_landmark(
                    name,
                    Point::new(p.x * scale + tx + jx, p.y * scale + ty + jy),
                );
            }
            cohort.push(record);
        }
        truth.push(TruthRow {
            subject_id,
            label: intended[i],
            delta,
            mid_delta,
        });
    }
    Ok((cohort, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AgeBounds;

    fn noise_free(n: usize, seed: u64) -> CohortConfig {
        CohortConfig {
            n_subjects: n,
            jitter_sd: 0.0,
            scale_jitter: 0.0,
            magnifications: vec![1.0],
            seed,
            ..CohortConfig::default()
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = CohortConfig {
            n_subjects: 40,
            seed: 9,
            ..CohortConfig::default()
        };
        let a = generate_cohort(&cfg).unwrap();
        let b = generate_cohort(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_mixture_hits_the_study_counts() {
        let cfg = CohortConfig {
            seed: 5,
            ..CohortConfig::default()
        };
        let (_, truth) = generate_cohort(&cfg).unwrap();
        assert_eq!(truth.len(), 639);
        let count = |l: GrowthLabel| truth.iter().filter(|t| t.label == l).count() as i64;
        assert!((count(GrowthLabel::Horizontal) - 102).abs() <= 2);
        assert!((count(GrowthLabel::Mixed) - 436).abs() <= 2);
        assert!((count(GrowthLabel::Vertical) - 101).abs() <= 2);
    }

    #[test]
    fn noise_free_deltas_match_truth_exactly() {
        let cfg = noise_free(60, 11);
        let (cohort, truth) = generate_cohort(&cfg).unwrap();
        for row in &truth {
            let at = |g: AgeGroup| {
                cohort
                    .iter()
                    .find(|c| c.subject_id == row.subject_id && c.age_group == g)
                    .unwrap()
            };
            let measured = sn_mp_angle(at(AgeGroup::Eighteen)).unwrap()
                - sn_mp_angle(at(AgeGroup::Nine)).unwrap();
            assert!(
                (measured - row.delta).abs() < 1e-9,
                "subject {}: measured {measured}, truth {}",
                row.subject_id,
                row.delta
            );
            let mid = sn_mp_angle(at(AgeGroup::Twelve)).unwrap()
                - sn_mp_angle(at(AgeGroup::Nine)).unwrap();
            assert!((mid - row.mid_delta).abs() < 1e-9);
        }
    }

    #[test]
    fn truth_labels_equal_banding_of_noise_free_deltas() {
        let cfg = noise_free(120, 13);
        let (_, truth) = generate_cohort(&cfg).unwrap();
        let deltas: Vec<f64> = truth.iter().map(|t| t.delta).collect();
        let (classes, _) = categorize_target(&deltas, SdMode::Population).unwrap();
        for (row, class) in truth.iter().zip(&classes) {
            assert_eq!(row.label, class.label, "subject {}", row.subject_id);
        }
    }

    #[test]
    fn zero_signal_decorrelates_the_mid_delta() {
        let cfg = CohortConfig {
            n_subjects: 5000,
            signal_strength: 0.0,
            seed: 17,
            ..CohortConfig::default()
        };
        let (_, truth) = generate_cohort(&cfg).unwrap();
        let xs: Vec<f64> = truth.iter().map(|t| t.mid_delta).collect();
        let ys: Vec<f64> = truth.iter().map(|t| t.delta).collect();
        let r = pearson(&xs, &ys);
        assert!(r.abs() < 0.05, "correlation {r}");
    }

    #[test]
    fn high_signal_correlates_the_mid_delta() {
        let cfg = CohortConfig {
            n_subjects: 3000,
            signal_strength: 0.9,
            seed: 19,
            ..CohortConfig::default()
        };
        let (_, truth) = generate_cohort(&cfg).unwrap();
        let xs: Vec<f64> = truth.iter().map(|t| t.mid_delta).collect();
        let ys: Vec<f64> = truth.iter().map(|t| t.delta).collect();
        let r = pearson(&xs, &ys);
        assert!(r > 0.8, "correlation {r}");
    }

    fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            cov += (x - mx) * (y - my);
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
        }
        cov / (vx.sqrt() * vy.sqrt())
    }

    #[test]
    fn records_validate_against_the_default_registry() {
        let cfg = CohortConfig {
            n_subjects: 30,
            seed: 23,
            ..CohortConfig::default()
        };
        let (cohort, _) = generate_cohort(&cfg).unwrap();
        let registry = default_registry();
        let bounds = AgeBounds::default();
        assert_eq!(cohort.len(), 90);
        for record in &cohort {
            record.validate(&registry, &bounds).unwrap();
        }
    }

    #[test]
    fn missing_rate_drops_some_records() {
        let cfg = CohortConfig {
            n_subjects: 200,
            missing_rate: 0.3,
            seed: 29,
            ..CohortConfig::default()
        };
        let (cohort, truth) = generate_cohort(&cfg).unwrap();
        assert_eq!(truth.len(), 200);
        let dropped = 600 - cohort.len();
        assert!((30..90).contains(&dropped), "dropped {dropped} records");
        // nine-year records always survive
        let nines = cohort
            .iter()
            .filter(|c| c.age_group == AgeGroup::Nine)
            .count();
        assert_eq!(nines, 200);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = CohortConfig::default();
        cfg.mixture = [0.5, 0.2, 0.2];
        assert!(matches!(
            generate_cohort(&cfg),
            Err(SynthError::InvalidConfig(_))
        ));
        let mut cfg = CohortConfig::default();
        cfg.signal_strength = 1.5;
        assert!(generate_cohort(&cfg).is_err());
        let mut cfg = CohortConfig::default();
        cfg.magnifications = vec![];
        assert!(generate_cohort(&cfg).is_err());
    }

    #[test]
    fn subject_ids_are_stable_across_noise_settings() {
        let a = generate_cohort(&noise_free(25, 31)).unwrap().1;
        let b = generate_cohort(&CohortConfig {
            jitter_sd: 2.0,
            ..noise_free(25, 31)
        })
        .unwrap()
        .1;
        // truth (classes, deltas) is independent of the imaging noises
        assert_eq!(a, b);
    }
}
