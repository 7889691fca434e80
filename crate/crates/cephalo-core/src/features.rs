//! Feature engineering: the ceph/proc/trans feature families across timestamp
//! tags, growth-class target banding, and column standardization.
//!
//! A [`FeatureMatrix`] is built once per cohort and is immutable afterwards.
//! Class thresholds are fitted on the full labeled cohort and frozen with the
//! matrix; cross-validation folds reuse the frozen labels.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use thiserror::Error;

use crate::geometry::{
    angle_between_lines, names, procrustes_align, sn_mp_angle, AgeGroup, Cephalogram,
    GeometryError, LandmarkRegistry, Point, SizeMode, GPA_DEFAULT_MAX_ITER, GPA_DEFAULT_TOL,
};
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("feature spec error: {0}")]
    Spec(String),
    #[error("duplicate record for subject {subject} at group {group}")]
    DuplicateRecord { subject: String, group: AgeGroup },
    #[error("no rows left after applying timestamp requirements")]
    EmptyCohort,
    #[error("subject {subject}: {source}")]
    SubjectGeometry {
        subject: String,
        source: GeometryError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("need at least {needed} deltas to fit class bands, got {got}")]
    TooFewDeltas { needed: usize, got: usize },
    #[error("degenerate delta distribution: standard deviation is zero")]
    DegenerateDistribution,
    #[error("column count mismatch: standardizer has {fitted}, matrix has {got}")]
    ColumnMismatch { fitted: usize, got: usize },
    #[error("matrix has no labels")]
    Unlabeled,
}

/// Feature family, after the three attribute types of the study design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Ceph,
    Proc,
    Trans,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Ceph => "ceph",
            Family::Proc => "proc",
            Family::Trans => "trans",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "ceph" => Some(Family::Ceph),
            "proc" => Some(Family::Proc),
            "trans" => Some(Family::Trans),
            _ => None,
        }
    }
}

impl core::fmt::Display for Family {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Timestamp tag: a raw timestamp or the 12-minus-9 difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Nine,
    Twelve,
    Diff,
}

impl Tag {
    pub fn label(self) -> &'static str {
        match self {
            Tag::Nine => "9",
            Tag::Twelve => "12",
            Tag::Diff => "12-9",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        match s {
            "9" => Some(Tag::Nine),
            "12" => Some(Tag::Twelve),
            "12-9" => Some(Tag::Diff),
            _ => None,
        }
    }

    fn groups(self) -> &'static [AgeGroup] {
        match self {
            Tag::Nine => &[AgeGroup::Nine],
            Tag::Twelve => &[AgeGroup::Twelve],
            Tag::Diff => &[AgeGroup::Nine, AgeGroup::Twelve],
        }
    }
}

impl core::fmt::Display for Tag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Coordinate axis selector for proc/trans features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "X" => Some(Axis::X),
            "Y" => Some(Axis::Y),
            _ => None,
        }
    }

    pub fn of(self, p: Point) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

/// What a feature measures.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureDef {
    /// Angle in degrees between the undirected lines spanned by two landmark pairs.
    Angle {
        line1: (String, String),
        line2: (String, String),
    },
    /// Ratio of the distances spanned by two landmark pairs.
    Ratio {
        numerator: (String, String),
        denominator: (String, String),
    },
    /// One coordinate of one landmark (after the family's normalization).
    Coord { landmark: String, axis: Axis },
}

impl FeatureDef {
    fn landmark_names(&self) -> Vec<&str> {
        match self {
            FeatureDef::Angle { line1, line2 }
            | FeatureDef::Ratio {
                numerator: line1,
                denominator: line2,
            } => vec![&line1.0, &line1.1, &line2.0, &line2.1],
            FeatureDef::Coord { landmark, .. } => vec![landmark],
        }
    }
}

/// Declarative feature definition: family x tag x measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpec {
    pub name: String,
    pub family: Family,
    pub tag: Tag,
    pub definition: FeatureDef,
}

impl FeatureSpec {
    fn validate(&self, registry: &LandmarkRegistry) -> Result<(), FeatureError> {
        match (&self.family, &self.definition) {
            (Family::Ceph, FeatureDef::Coord { .. }) => {
                return Err(FeatureError::Spec(format!(
                    "{}: ceph features must be angles or ratios",
                    self.name
                )))
            }
            (Family::Proc | Family::Trans, FeatureDef::Angle { .. } | FeatureDef::Ratio { .. }) => {
                return Err(FeatureError::Spec(format!(
                    "{}: {} features must be coordinate selectors",
                    self.name, self.family
                )))
            }
            _ => {}
        }
        for lm in self.definition.landmark_names() {
            if !registry.contains(lm) {
                return Err(FeatureError::Spec(format!(
                    "{}: references unknown landmark {lm:?}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Three-valued growth direction label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrowthLabel {
    Horizontal,
    Mixed,
    Vertical,
}

impl GrowthLabel {
    pub const ALL: [GrowthLabel; 3] = [
        GrowthLabel::Horizontal,
        GrowthLabel::Mixed,
        GrowthLabel::Vertical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GrowthLabel::Horizontal => "Horizontal",
            GrowthLabel::Mixed => "Mixed",
            GrowthLabel::Vertical => "Vertical",
        }
    }

    pub fn parse(s: &str) -> Option<GrowthLabel> {
        match s {
            "Horizontal" => Some(GrowthLabel::Horizontal),
            "Mixed" => Some(GrowthLabel::Mixed),
            "Vertical" => Some(GrowthLabel::Vertical),
            _ => None,
        }
    }
}

impl core::fmt::Display for GrowthLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// A label together with the continuous delta it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthClass {
    pub label: GrowthLabel,
    pub delta: f64,
}

/// Which flavor of standard deviation drives the class bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdMode {
    #[default]
    Population,
    Sample,
}

/// The band edges that produced a set of labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
    pub sd_mode: SdMode,
}

impl Thresholds {
    pub fn classify(&self, delta: f64) -> GrowthLabel {
        if delta < self.lower {
            GrowthLabel::Horizontal
        } else if delta > self.upper {
            GrowthLabel::Vertical
        } else {
            GrowthLabel::Mixed
        }
    }
}

/// Band deltas into growth classes: below mean - sd is Horizontal, within one
/// sd of the mean (inclusive on both edges) is Mixed, above mean + sd is
/// Vertical.
pub fn categorize_target(
    deltas: &[f64],
    sd_mode: SdMode,
) -> Result<(Vec<GrowthClass>, Thresholds), FeatureError> {
    if deltas.len() < 2 {
        return Err(FeatureError::TooFewDeltas {
            needed: 2,
            got: deltas.len(),
        });
    }
    let mean = stats::mean(deltas);
    let sd = match sd_mode {
        SdMode::Population => stats::population_sd(deltas),
        SdMode::Sample => stats::sample_sd(deltas),
    };
    if sd == 0.0 || !sd.is_finite() {
        return Err(FeatureError::DegenerateDistribution);
    }
    let thresholds = Thresholds {
        mean,
        sd,
        lower: mean - sd,
        upper: mean + sd,
        sd_mode,
    };
    let classes = deltas
        .iter()
        .map(|&delta| GrowthClass {
            label: thresholds.classify(delta),
            delta,
        })
        .collect();
    Ok((classes, thresholds))
}

/// Metadata of one matrix column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMeta {
    pub name: String,
    /// `None` for the always-included age column.
    pub family: Option<Family>,
    pub tag: Option<Tag>,
}

impl ColumnMeta {
    pub fn age() -> Self {
        ColumnMeta {
            name: String::from("age"),
            family: None,
            tag: None,
        }
    }

    pub fn is_age(&self) -> bool {
        self.family.is_none()
    }
}

/// Realized numeric feature table with column metadata and optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<ColumnMeta>,
    /// Row-major values, one row per retained subject.
    pub rows: Vec<Vec<f64>>,
    pub subject_ids: Vec<String>,
    pub labels: Option<Vec<GrowthClass>>,
    pub thresholds: Option<Thresholds>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn age_column(&self) -> Option<usize> {
        self.columns.iter().position(|c| c.is_age())
    }

    /// Growth labels without the deltas they came from.
    pub fn label_vec(&self) -> Result<Vec<GrowthLabel>, FeatureError> {
        self.labels
            .as_ref()
            .map(|ls| ls.iter().map(|c| c.label).collect())
            .ok_or(FeatureError::Unlabeled)
    }

    pub fn raw_deltas(&self) -> Option<Vec<f64>> {
        self.labels
            .as_ref()
            .map(|ls| ls.iter().map(|c| c.delta).collect())
    }

    /// Extract the given columns as plain feature rows.
    pub fn select_rows(&self, columns: &[usize]) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| columns.iter().map(|&c| r[c]).collect())
            .collect()
    }
}

/// Per-subject reason a row was excluded from the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedSubject {
    pub subject_id: String,
    pub reason: String,
}

/// What the matrix build did: which subjects were dropped and the final shape.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildReport {
    pub dropped: Vec<DroppedSubject>,
    pub n_rows: usize,
    pub n_cols: usize,
}

/// Settings for [`build_feature_matrix`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Derive growth-class labels (requires the 9- and 18-year records).
    pub labeled: bool,
    pub sd_mode: SdMode,
    pub size_mode: SizeMode,
    pub gpa_tol: f64,
    pub gpa_max_iter: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            labeled: true,
            sd_mode: SdMode::default(),
            size_mode: SizeMode::default(),
            gpa_tol: GPA_DEFAULT_TOL,
            gpa_max_iter: GPA_DEFAULT_MAX_ITER,
        }
    }
}

struct SubjectRecords<'a> {
    id: &'a str,
    records: BTreeMap<AgeGroup, &'a Cephalogram>,
}

fn group_by_subject(cohort: &[Cephalogram]) -> Result<Vec<SubjectRecords<'_>>, FeatureError> {
    let mut map: BTreeMap<&str, BTreeMap<AgeGroup, &Cephalogram>> = BTreeMap::new();
    for c in cohort {
        let slot = map.entry(c.subject_id.as_str()).or_default();
        if slot.insert(c.age_group, c).is_some() {
            return Err(FeatureError::DuplicateRecord {
                subject: c.subject_id.clone(),
                group: c.age_group,
            });
        }
    }
    Ok(map
        .into_iter()
        .map(|(id, records)| SubjectRecords { id, records })
        .collect())
}

/// Build the feature matrix for a cohort.
///
/// Tag 9/12 columns are direct measurements at that timestamp, tag 12-9
/// columns are value(12) - value(9), and the age column holds the age at the
/// 9-year record. Subjects lacking a required timestamp (or a registry-required
/// landmark on one) are dropped and enumerated in the build report.
pub fn build_feature_matrix(
    cohort: &[Cephalogram],
    registry: &LandmarkRegistry,
    specs: &[FeatureSpec],
    opts: &BuildOptions,
) -> Result<(FeatureMatrix, BuildReport), FeatureError> {
    if specs.is_empty() {
        return Err(FeatureError::Spec(String::from("no feature specs given")));
    }
    for spec in specs {
        spec.validate(registry)?;
    }

    // Timestamps every retained subject must have.
    let mut required: BTreeSet<AgeGroup> = BTreeSet::new();
    required.insert(AgeGroup::Nine); // age column
    for spec in specs {
        required.extend(spec.tag.groups().iter().copied());
    }
    if opts.labeled {
        required.insert(AgeGroup::Eighteen);
    }

    let subjects = group_by_subject(cohort)?;
    let mut retained: Vec<&SubjectRecords> = Vec::new();
    let mut report = BuildReport::default();
    'subjects: for s in &subjects {
        for group in &required {
            match s.records.get(group) {
                None => {
                    report.dropped.push(DroppedSubject {
                        subject_id: s.id.to_string(),
                        reason: format!("missing {group}-year record"),
                    });
                    continue 'subjects;
                }
                Some(rec) => {
                    for lm in registry.required() {
                        if !rec.has_landmark(lm) {
                            report.dropped.push(DroppedSubject {
                                subject_id: s.id.to_string(),
                                reason: format!("{group}-year record lacks landmark {lm:?}"),
                            });
                            continue 'subjects;
                        }
                    }
                }
            }
        }
        retained.push(s);
    }
    if retained.is_empty() {
        return Err(FeatureError::EmptyCohort);
    }

    // Procrustes alignment per timestamp, over the retained cohort.
    let mut proc_groups: BTreeSet<AgeGroup> = BTreeSet::new();
    for spec in specs {
        if spec.family == Family::Proc {
            proc_groups.extend(spec.tag.groups().iter().copied());
        }
    }
    let mut aligned: BTreeMap<AgeGroup, Vec<Vec<Point>>> = BTreeMap::new();
    for &group in &proc_groups {
        let shapes: Vec<Vec<Point>> = retained
            .iter()
            .map(|s| {
                s.records[&group]
                    .shape(registry)
                    .map_err(|e| FeatureError::SubjectGeometry {
                        subject: s.id.to_string(),
                        source: e,
                    })
            })
            .collect::<Result<_, _>>()?;
        let gpa = procrustes_align(&shapes, opts.size_mode, opts.gpa_tol, opts.gpa_max_iter)?;
        aligned.insert(group, gpa.shapes);
    }

    let mut columns: Vec<ColumnMeta> = specs
        .iter()
        .map(|s| ColumnMeta {
            name: s.name.clone(),
            family: Some(s.family),
            tag: Some(s.tag),
        })
        .collect();
    columns.push(ColumnMeta::age());

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(retained.len());
    for (row_idx, s) in retained.iter().enumerate() {
        let mut row = Vec::with_capacity(columns.len());
        for spec in specs {
            let v = match spec.tag {
                Tag::Nine => spec_value(spec, s, row_idx, AgeGroup::Nine, registry, &aligned)?,
                Tag::Twelve => spec_value(spec, s, row_idx, AgeGroup::Twelve, registry, &aligned)?,
                Tag::Diff => {
                    let v12 = spec_value(spec, s, row_idx, AgeGroup::Twelve, registry, &aligned)?;
                    let v9 = spec_value(spec, s, row_idx, AgeGroup::Nine, registry, &aligned)?;
                    v12 - v9
                }
            };
            row.push(v);
        }
        row.push(s.records[&AgeGroup::Nine].age_years);
        rows.push(row);
    }

    let (labels, thresholds) = if opts.labeled {
        let deltas: Vec<f64> = retained
            .iter()
            .map(|s| {
                let at18 = sn_mp_angle(s.records[&AgeGroup::Eighteen]).map_err(|e| {
                    FeatureError::SubjectGeometry {
                        subject: s.id.to_string(),
                        source: e,
                    }
                })?;
                let at9 = sn_mp_angle(s.records[&AgeGroup::Nine]).map_err(|e| {
                    FeatureError::SubjectGeometry {
                        subject: s.id.to_string(),
                        source: e,
                    }
                })?;
                Ok(at18 - at9)
            })
            .collect::<Result<_, FeatureError>>()?;
        let (classes, thresholds) = categorize_target(&deltas, opts.sd_mode)?;
        (Some(classes), Some(thresholds))
    } else {
        (None, None)
    };

    report.n_rows = rows.len();
    report.n_cols = columns.len();
    let matrix = FeatureMatrix {
        columns,
        rows,
        subject_ids: retained.iter().map(|s| s.id.to_string()).collect(),
        labels,
        thresholds,
    };
    Ok((matrix, report))
}

fn spec_value(
    spec: &FeatureSpec,
    subject: &SubjectRecords,
    row_idx: usize,
    group: AgeGroup,
    registry: &LandmarkRegistry,
    aligned: &BTreeMap<AgeGroup, Vec<Vec<Point>>>,
) -> Result<f64, FeatureError> {
    let record = subject.records[&group];
    let ctx = |e: GeometryError| FeatureError::SubjectGeometry {
        subject: subject.id.to_string(),
        source: e,
    };
    match (&spec.family, &spec.definition) {
        (Family::Ceph, FeatureDef::Angle { line1, line2 }) => {
            let p1 = record.landmark(&line1.0).map_err(ctx)?;
            let p2 = record.landmark(&line1.1).map_err(ctx)?;
            let q1 = record.landmark(&line2.0).map_err(ctx)?;
            let q2 = record.landmark(&line2.1).map_err(ctx)?;
            angle_between_lines(p1, p2, q1, q2).map_err(ctx)
        }
        (
            Family::Ceph,
            FeatureDef::Ratio {
                numerator,
                denominator,
            },
        ) => {
            let a = record.landmark(&numerator.0).map_err(ctx)?;
            let b = record.landmark(&numerator.1).map_err(ctx)?;
            let c = record.landmark(&denominator.0).map_err(ctx)?;
            let d = record.landmark(&denominator.1).map_err(ctx)?;
            let den = c.distance(d);
            if den == 0.0 {
                return Err(ctx(GeometryError::Degenerate(format!(
                    "zero denominator distance in ratio {}",
                    spec.name
                ))));
            }
            Ok(a.distance(b) / den)
        }
        (Family::Trans, FeatureDef::Coord { landmark, axis }) => {
            let sella = record.landmark(names::SELLA).map_err(ctx)?;
            let p = record.landmark(landmark).map_err(ctx)?;
            Ok(axis.of(Point::new(p.x - sella.x, p.y - sella.y)))
        }
        (Family::Proc, FeatureDef::Coord { landmark, axis }) => {
            let idx = registry
                .index_of(landmark)
                .ok_or_else(|| FeatureError::Spec(format!("unknown landmark {landmark:?}")))?;
            let shape = &aligned[&group][row_idx];
            Ok(axis.of(shape[idx]))
        }
        // validate() rejects the remaining combinations up front
        _ => unreachable!("spec validated"),
    }
}

/// Per-column standardization parameters fitted on a training partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    /// Epsilon-floored, always strictly positive.
    pub sds: Vec<f64>,
}

/// Floor applied to fitted standard deviations so constant columns map to zero.
pub const SD_FLOOR: f64 = 1e-12;

impl Standardizer {
    /// Fit per-column mean and population SD on plain feature rows.
    pub fn fit_rows(rows: &[Vec<f64>]) -> Result<Standardizer, FeatureError> {
        if rows.is_empty() {
            return Err(FeatureError::EmptyCohort);
        }
        let d = rows[0].len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for r in rows {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut sds = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in sds.iter_mut().zip(r).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut sds {
            *s = (*s / n).sqrt().max(SD_FLOOR);
        }
        Ok(Standardizer { means, sds })
    }

    pub fn transform_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureError> {
        rows.iter()
            .map(|r| {
                if r.len() != self.means.len() {
                    return Err(FeatureError::ColumnMismatch {
                        fitted: self.means.len(),
                        got: r.len(),
                    });
                }
                Ok(r.iter()
                    .zip(self.means.iter().zip(&self.sds))
                    .map(|(v, (m, s))| (v - m) / s)
                    .collect())
            })
            .collect()
    }

    pub fn fit(matrix: &FeatureMatrix) -> Result<Standardizer, FeatureError> {
        Standardizer::fit_rows(&matrix.rows)
    }

    pub fn transform(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix, FeatureError> {
        Ok(FeatureMatrix {
            rows: self.transform_rows(&matrix.rows)?,
            ..matrix.clone()
        })
    }
}

fn spec_named(name: &str, family: Family, tag: Tag, definition: FeatureDef) -> FeatureSpec {
    FeatureSpec {
        name: name.to_string(),
        family,
        tag,
        definition,
    }
}

fn line(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

/// The default 15-feature cephalometric catalog for one tag.
///
/// SN-MP is the measurement behind the prediction target; the remaining
/// angles and ratios are standard cephalometric-analysis forms. Definitions
/// beyond SN-MP are defaults meant to be overridden by spec files when a
/// local convention differs.
pub fn ceph_family_specs(tag: Tag) -> Vec<FeatureSpec> {
    use names::*;
    let angle = |name: &str, l1: (String, String), l2: (String, String)| {
        spec_named(
            name,
            Family::Ceph,
            tag,
            FeatureDef::Angle { line1: l1, line2: l2 },
        )
    };
    let ratio = |name: &str, num: (String, String), den: (String, String)| {
        spec_named(
            name,
            Family::Ceph,
            tag,
            FeatureDef::Ratio {
                numerator: num,
                denominator: den,
            },
        )
    };
    vec![
        angle("SN-MP", line(SELLA, NASION), line(MENTON, GONION_INFERIOR)),
        angle("SNA", line(NASION, SELLA), line(NASION, POINT_A)),
        angle("SNB", line(NASION, SELLA), line(NASION, POINT_B)),
        angle("ANB", line(NASION, POINT_A), line(NASION, POINT_B)),
        angle(
            "SN-PP",
            line(SELLA, NASION),
            line(ANTERIOR_NASAL_SPINE, POSTERIOR_NASAL_SPINE),
        ),
        angle("FMA", line(PORION, ORBITALE), line(MENTON, GONION_INFERIOR)),
        angle("Y-Axis", line(PORION, ORBITALE), line(SELLA, GNATHION)),
        angle(
            "Gonial Angle",
            line(ARTICULARE, GONION_POSTERIOR),
            line(MENTON, GONION_INFERIOR),
        ),
        angle("Saddle Angle", line(NASION, SELLA), line(SELLA, ARTICULARE)),
        angle(
            "Articular Angle",
            line(SELLA, ARTICULARE),
            line(ARTICULARE, GONION_POSTERIOR),
        ),
        angle("NS-Ba", line(NASION, SELLA), line(SELLA, BASION)),
        ratio("AFH:PFH", line(NASION, MENTON), line(SELLA, GONION_POSTERIOR)),
        ratio("Ramus:AFH", line(ARTICULARE, GONION_INFERIOR), line(NASION, MENTON)),
        ratio("Body:SN", line(GONION_INFERIOR, MENTON), line(SELLA, NASION)),
        ratio(
            "UFH:LFH",
            line(NASION, ANTERIOR_NASAL_SPINE),
            line(ANTERIOR_NASAL_SPINE, MENTON),
        ),
    ]
}

/// Coordinate features (X and Y of every registry landmark) for the proc or
/// trans family at one tag; 2 x registry size columns.
pub fn coord_family_specs(
    family: Family,
    registry: &LandmarkRegistry,
    tag: Tag,
) -> Vec<FeatureSpec> {
    debug_assert!(family != Family::Ceph);
    registry
        .names()
        .flat_map(|lm| {
            [Axis::X, Axis::Y].into_iter().map(move |axis| FeatureSpec {
                name: format!("{} {lm}", axis.label()),
                family,
                tag,
                definition: FeatureDef::Coord {
                    landmark: lm.to_string(),
                    axis,
                },
            })
        })
        .collect()
}

/// The complete study catalog: ceph + proc + trans families at every tag.
pub fn full_catalog(registry: &LandmarkRegistry) -> Vec<FeatureSpec> {
    let mut specs = Vec::new();
    for tag in [Tag::Nine, Tag::Twelve, Tag::Diff] {
        specs.extend(ceph_family_specs(tag));
        specs.extend(coord_family_specs(Family::Proc, registry, tag));
        specs.extend(coord_family_specs(Family::Trans, registry, tag));
    }
    specs
}
