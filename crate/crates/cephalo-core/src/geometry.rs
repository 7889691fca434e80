//! Landmark geometry: cephalogram containers, angle and ratio math, the
//! Sella-origin transform, and generalized Procrustes alignment.
//!
//! All operations are pure functions of immutable inputs. Angles are reported
//! in degrees between undirected lines, so they are invariant to swapping
//! either line's endpoints, to translation, and to positive uniform scaling.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

/// Canonical landmark names used by the default feature catalog.
pub mod names {
    pub const SELLA: &str = "Sella";
    pub const NASION: &str = "Nasion";
    pub const MENTON: &str = "Menton";
    pub const GONION_INFERIOR: &str = "Gonion Inferior";
    pub const GONION_POSTERIOR: &str = "Gonion Posterior";
    pub const ANTEGONIAL_NOTCH: &str = "Antegonial Notch";
    pub const CONDYLION: &str = "Condylion";
    pub const POINT_A: &str = "Point A";
    pub const POINT_B: &str = "Point B";
    pub const POST_ETHMOID: &str = "Post Ethmoid";
    pub const PRE_GONION: &str = "Pre Gonion";
    pub const ORBITALE: &str = "Orbitale";
    pub const PORION: &str = "Porion";
    pub const BASION: &str = "Basion";
    pub const ARTICULARE: &str = "Articulare";
    pub const POGONION: &str = "Pogonion";
    pub const GNATHION: &str = "Gnathion";
    pub const ANTERIOR_NASAL_SPINE: &str = "Anterior Nasal Spine";
    pub const POSTERIOR_NASAL_SPINE: &str = "Posterior Nasal Spine";
    pub const RAMUS_POINT: &str = "Ramus Point";
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("missing landmark: {0}")]
    MissingLandmark(String),
    #[error("landmark {0} is not in the registry")]
    UnknownLandmark(String),
    #[error("landmark {name} coordinate is not finite ({x}, {y})")]
    NonFiniteCoordinate { name: String, x: f64, y: f64 },
    #[error("age {age} outside plausible range [{min}, {max}] for group {group}")]
    AgeOutOfRange {
        age: f64,
        min: f64,
        max: f64,
        group: AgeGroup,
    },
    #[error("shapes disagree in landmark count ({0} vs {1})")]
    ShapeMismatch(usize, usize),
    #[error("no shapes to align")]
    EmptyAlignment,
    #[error("Procrustes alignment did not converge in {max_iter} iterations (last mean displacement {residual:e})")]
    NoConvergence { max_iter: usize, residual: f64 },
}

/// A 2D point in image-plane units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// A named anatomic landmark on a lateral cephalogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub name: String,
    pub position: Point,
}

/// The three imaging timestamps of the longitudinal design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgeGroup {
    Nine,
    Twelve,
    Eighteen,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 3] = [AgeGroup::Nine, AgeGroup::Twelve, AgeGroup::Eighteen];

    pub fn label(self) -> &'static str {
        match self {
            AgeGroup::Nine => "9",
            AgeGroup::Twelve => "12",
            AgeGroup::Eighteen => "18",
        }
    }

    pub fn parse(s: &str) -> Option<AgeGroup> {
        match s {
            "9" => Some(AgeGroup::Nine),
            "12" => Some(AgeGroup::Twelve),
            "18" => Some(AgeGroup::Eighteen),
            _ => None,
        }
    }
}

impl core::fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Plausible age bounds per imaging group, used when validating records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeBounds {
    pub nine: (f64, f64),
    pub twelve: (f64, f64),
    pub eighteen: (f64, f64),
}

impl Default for AgeBounds {
    fn default() -> Self {
        AgeBounds {
            nine: (6.00, 10.92),
            twelve: (10.00, 13.75),
            eighteen: (15.00, 28.42),
        }
    }
}

impl AgeBounds {
    pub fn range(&self, group: AgeGroup) -> (f64, f64) {
        match group {
            AgeGroup::Nine => self.nine,
            AgeGroup::Twelve => self.twelve,
            AgeGroup::Eighteen => self.eighteen,
        }
    }
}

/// One subject-timestamp record: identifier, age, and named landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct Cephalogram {
    pub subject_id: String,
    pub age_group: AgeGroup,
    pub age_years: f64,
    landmarks: BTreeMap<String, Point>,
}

impl Cephalogram {
    pub fn new(subject_id: impl Into<String>, age_group: AgeGroup, age_years: f64) -> Self {
        Cephalogram {
            subject_id: subject_id.into(),
            age_group,
            age_years,
            landmarks: BTreeMap::new(),
        }
    }

    /// Insert a landmark, replacing any previous position under that name.
    pub fn set_landmark(&mut self, name: impl Into<String>, position: Point) {
        self.landmarks.insert(name.into(), position);
    }

    pub fn landmark(&self, name: &str) -> Result<Point, GeometryError> {
        self.landmarks
            .get(name)
            .copied()
            .ok_or_else(|| GeometryError::MissingLandmark(name.to_string()))
    }

    pub fn has_landmark(&self, name: &str) -> bool {
        self.landmarks.contains_key(name)
    }

    /// Landmarks in name order.
    pub fn landmarks(&self) -> impl Iterator<Item = (&str, Point)> {
        self.landmarks.iter().map(|(n, p)| (n.as_str(), *p))
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    /// Check registry membership, required-landmark presence, coordinate
    /// finiteness, and the age range for this record's group.
    pub fn validate(
        &self,
        registry: &LandmarkRegistry,
        bounds: &AgeBounds,
    ) -> Result<(), GeometryError> {
        for (name, p) in &self.landmarks {
            if !registry.contains(name) {
                return Err(GeometryError::UnknownLandmark(name.clone()));
            }
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GeometryError::NonFiniteCoordinate {
                    name: name.clone(),
                    x: p.x,
                    y: p.y,
                });
            }
        }
        for name in registry.required() {
            if !self.landmarks.contains_key(name) {
                return Err(GeometryError::MissingLandmark(name.to_string()));
            }
        }
        let (min, max) = bounds.range(self.age_group);
        if !(self.age_years >= min && self.age_years <= max) {
            return Err(GeometryError::AgeOutOfRange {
                age: self.age_years,
                min,
                max,
                group: self.age_group,
            });
        }
        Ok(())
    }

    /// Coordinates in registry order. Errors on the first missing landmark.
    pub fn shape(&self, registry: &LandmarkRegistry) -> Result<Vec<Point>, GeometryError> {
        registry
            .names()
            .map(|name| self.landmark(name))
            .collect()
    }
}

/// Ordered landmark name list with per-landmark required flags.
///
/// The registry is configuration data: it defines which landmark names are
/// legal, which must be present on every record, and the canonical coordinate
/// ordering used for shape alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkRegistry {
    entries: Vec<(String, bool)>,
}

impl LandmarkRegistry {
    pub fn new(entries: Vec<(String, bool)>) -> Self {
        LandmarkRegistry { entries }
    }

    /// Registry where every listed landmark is required.
    pub fn all_required<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        LandmarkRegistry {
            entries: names.into_iter().map(|n| (n.into(), true)).collect(),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn required(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|(_, req)| *req)
            .map(|(n, _)| n.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, bool)> {
        self.entries.iter().map(|(n, r)| (n.as_str(), *r))
    }
}

/// How a centered shape is scaled to unit size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizeMode {
    /// Scale so the summed distances of all points to the origin equal one.
    /// This is the literal reading of the alignment criterion and the default.
    #[default]
    SumOfDistances,
    /// Scale so the root of the summed squared distances equals one
    /// (the conventional centroid size).
    CentroidSize,
}

/// A shape after centering and size normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedShape {
    pub coordinates: Vec<Point>,
    pub source_id: String,
}

/// Unsigned angle in degrees between the undirected lines p1-p2 and q1-q2.
///
/// The smaller of the two crossing angles is returned, so the result lies in
/// [0, 90] and is invariant to swapping either line's endpoints, to
/// translation, and to positive uniform scaling.
pub fn angle_between_lines(
    p1: Point,
    p2: Point,
    q1: Point,
    q2: Point,
) -> Result<f64, GeometryError> {
    let u = Point::new(p2.x - p1.x, p2.y - p1.y);
    let v = Point::new(q2.x - q1.x, q2.y - q1.y);
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(GeometryError::Degenerate(String::from(
            "line endpoints coincide",
        )));
    }
    let dot = u.x * v.x + u.y * v.y;
    let cross = u.x * v.y - u.y * v.x;
    // atan2(|cross|, |dot|) folds the directed angle into [0, 90].
    Ok(cross.abs().atan2(dot.abs()).to_degrees())
}

/// The SN/MP angle: Sella-Nasion line against the Menton-Gonion Inferior line.
pub fn sn_mp_angle(c: &Cephalogram) -> Result<f64, GeometryError> {
    let s = c.landmark(names::SELLA)?;
    let n = c.landmark(names::NASION)?;
    let me = c.landmark(names::MENTON)?;
    let goi = c.landmark(names::GONION_INFERIOR)?;
    angle_between_lines(s, n, me, goi)
}

/// Translate every landmark so Sella sits at the origin.
///
/// Returns `(name, position)` pairs in name order; pairwise distances are
/// preserved exactly.
pub fn sella_transform(c: &Cephalogram) -> Result<Vec<(String, Point)>, GeometryError> {
    let s = c.landmark(names::SELLA)?;
    Ok(c.landmarks()
        .map(|(name, p)| (name.to_string(), Point::new(p.x - s.x, p.y - s.y)))
        .collect())
}

fn centroid(coords: &[Point]) -> Point {
    let n = coords.len() as f64;
    let (sx, sy) = coords
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

fn size_of(coords: &[Point], mode: SizeMode) -> f64 {
    match mode {
        SizeMode::SumOfDistances => coords.iter().map(|p| p.norm()).sum(),
        SizeMode::CentroidSize => coords.iter().map(|p| p.x * p.x + p.y * p.y).sum::<f64>().sqrt(),
    }
}

/// Center a shape on the origin and scale it to unit size under `mode`.
pub fn normalize_shape(coords: &[Point], mode: SizeMode) -> Result<Vec<Point>, GeometryError> {
    if coords.len() < 2 {
        return Err(GeometryError::Degenerate(String::from(
            "need at least two points",
        )));
    }
    let c = centroid(coords);
    let centered: Vec<Point> = coords
        .iter()
        .map(|p| Point::new(p.x - c.x, p.y - c.y))
        .collect();
    let size = size_of(&centered, mode);
    if size == 0.0 {
        return Err(GeometryError::Degenerate(String::from(
            "all points coincide",
        )));
    }
    Ok(centered
        .iter()
        .map(|p| Point::new(p.x / size, p.y / size))
        .collect())
}

/// Optimal least-squares rotation angle (radians) taking `shape` onto `target`.
fn optimal_rotation(shape: &[Point], target: &[Point]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (p, m) in shape.iter().zip(target) {
        num += p.x * m.y - p.y * m.x;
        den += p.x * m.x + p.y * m.y;
    }
    num.atan2(den)
}

fn rotate(coords: &mut [Point], angle: f64) {
    let (s, c) = angle.sin_cos();
    for p in coords {
        *p = Point::new(p.x * c - p.y * s, p.x * s + p.y * c);
    }
}

/// Sum of squared distances from every shape to the mean shape.
fn gpa_objective(shapes: &[Vec<Point>], mean: &[Point]) -> f64 {
    shapes
        .iter()
        .flat_map(|s| s.iter().zip(mean))
        .map(|(p, m)| {
            let dx = p.x - m.x;
            let dy = p.y - m.y;
            dx * dx + dy * dy
        })
        .sum()
}

fn mean_shape(shapes: &[Vec<Point>]) -> Vec<Point> {
    let k = shapes[0].len();
    let n = shapes.len() as f64;
    (0..k)
        .map(|i| {
            let (sx, sy) = shapes
                .iter()
                .fold((0.0, 0.0), |(sx, sy), s| (sx + s[i].x, sy + s[i].y));
            Point::new(sx / n, sy / n)
        })
        .collect()
}

/// Result of a generalized Procrustes alignment.
#[derive(Debug, Clone)]
pub struct GpaResult {
    pub shapes: Vec<Vec<Point>>,
    pub mean: Vec<Point>,
    pub iterations: usize,
    /// Objective value after each iteration; non-increasing.
    pub objective_trace: Vec<f64>,
}

pub const GPA_DEFAULT_TOL: f64 = 1e-10;
pub const GPA_DEFAULT_MAX_ITER: usize = 100;

/// Generalized Procrustes alignment.
///
/// Each shape is centered and scaled to unit size, then iteratively rotated
/// onto the running mean shape (closed-form 2D least-squares rotation). The
/// first shape initializes the mean; iteration stops once the mean moves less
/// than `tol` between rounds.
pub fn procrustes_align(
    shapes: &[Vec<Point>],
    mode: SizeMode,
    tol: f64,
    max_iter: usize,
) -> Result<GpaResult, GeometryError> {
    if shapes.is_empty() {
        return Err(GeometryError::EmptyAlignment);
    }
    let k = shapes[0].len();
    for s in shapes {
        if s.len() != k {
            return Err(GeometryError::ShapeMismatch(k, s.len()));
        }
    }
    let mut aligned: Vec<Vec<Point>> = shapes
        .iter()
        .map(|s| normalize_shape(s, mode))
        .collect::<Result<_, _>>()?;

    let mut mean = aligned[0].clone();
    let mut trace = Vec::new();
    let mut displacement = f64::INFINITY;
    for iter in 0..max_iter {
        for shape in &mut aligned {
            let angle = optimal_rotation(shape, &mean);
            rotate(shape, angle);
        }
        let new_mean = mean_shape(&aligned);
        trace.push(gpa_objective(&aligned, &new_mean));
        displacement = new_mean
            .iter()
            .zip(&mean)
            .map(|(a, b)| {
                let dx = a.x - b.x;
                let dy = a.y - b.y;
                dx * dx + dy * dy
            })
            .sum::<f64>()
            .sqrt();
        mean = new_mean;
        if displacement < tol {
            return Ok(GpaResult {
                shapes: aligned,
                mean,
                iterations: iter + 1,
                objective_trace: trace,
            });
        }
    }
    Err(GeometryError::NoConvergence {
        max_iter,
        residual: displacement,
    })
}
