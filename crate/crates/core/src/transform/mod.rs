//! Plane-to-plane transforms fitted from ground control points.
//!
//! Two families are supported: an 8-parameter projective transform
//! (homography) and a per-axis second-order polynomial. Both are fitted in
//! the historical→modern direction from [`ControlPointPair`]s; a
//! [`TransformRecord`] carries the fitted pair of directions together with
//! fit diagnostics.

mod diagnostics;
mod normalize;
mod polynomial;
mod projective;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use diagnostics::{
    fit_record, leave_one_out, residual_report, LooEntry, ResidualEntry, ResidualReport,
    TransformRecord, OUTLIER_FLOOR_PX, OUTLIER_MEDIAN_FACTOR,
};
pub use polynomial::{fit_polynomial2, Polynomial2Transform};
pub use projective::{fit_projective, invert_projective, ProjectiveTransform};

/// Singular-value ratio below which a normalized design matrix is rank deficient.
pub const DEGENERACY_RATIO: f64 = 1e-10;

/// Smallest admissible |det| of a normalized homography.
pub const MIN_DETERMINANT: f64 = 1e-12;

/// Smallest admissible homogeneous denominator when applying a homography.
pub const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("InsufficientPoints: need at least {needed} enabled control points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("DegenerateConfiguration: control points do not determine a unique transform")]
    DegenerateConfiguration,
    #[error("NonInvertible: transform matrix is singular")]
    NonInvertible,
    #[error("AtInfinity: point maps to the line at infinity")]
    AtInfinity,
    #[error("InvalidControlPoint: {0}")]
    InvalidControlPoint(String),
}

impl TransformError {
    /// Stable error name used on the wire.
    pub fn name(&self) -> &'static str {
        match self {
            TransformError::InsufficientPoints { .. } => "InsufficientPoints",
            TransformError::DegenerateConfiguration => "DegenerateConfiguration",
            TransformError::NonInvertible => "NonInvertible",
            TransformError::AtInfinity => "AtInfinity",
            TransformError::InvalidControlPoint(_) => "InvalidControlPoint",
        }
    }
}

pub type Result<T, E = TransformError> = std::result::Result<T, E>;

/// A location in continuous pixel coordinates (origin at the top-left corner
/// of the top-left pixel, y pointing down).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// One correspondence between a historical-map pixel and a modern-map pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlPointPair {
    pub id: String,
    pub src: Point,
    pub dst: Point,
    #[serde(default = "enabled_default")]
    pub enabled: bool,
}

fn enabled_default() -> bool {
    true
}

impl ControlPointPair {
    pub fn new(id: impl Into<String>, src: impl Into<Point>, dst: impl Into<Point>) -> Self {
        ControlPointPair {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            enabled: true,
        }
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }

    /// The same correspondence read in the modern→historical direction.
    pub fn swapped(&self) -> Self {
        ControlPointPair {
            id: self.id.clone(),
            src: self.dst,
            dst: self.src,
            enabled: self.enabled,
        }
    }
}

/// Checks finiteness and id uniqueness over the whole set, enabled or not.
pub fn validate_gcps(gcps: &[ControlPointPair]) -> Result<()> {
    let mut seen = HashSet::new();
    for g in gcps {
        if !g.src.is_finite() || !g.dst.is_finite() {
            return Err(TransformError::InvalidControlPoint(format!(
                "non-finite coordinate in control point {:?}",
                g.id
            )));
        }
        if !seen.insert(g.id.as_str()) {
            return Err(TransformError::InvalidControlPoint(format!(
                "duplicate control point id {:?}",
                g.id
            )));
        }
    }
    Ok(())
}

pub(crate) fn enabled_pairs(gcps: &[ControlPointPair]) -> Result<(Vec<Point>, Vec<Point>)> {
    validate_gcps(gcps)?;
    Ok(gcps
        .iter()
        .filter(|g| g.enabled)
        .map(|g| (g.src, g.dst))
        .unzip())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Projective,
    Polynomial2,
}

impl TransformKind {
    /// Minimum number of enabled control points the fit needs.
    pub fn min_points(self) -> usize {
        match self {
            TransformKind::Projective => 4,
            TransformKind::Polynomial2 => 6,
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Projective => "projective",
            TransformKind::Polynomial2 => "polynomial2",
        })
    }
}

impl FromStr for TransformKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "projective" | "homography" => Ok(TransformKind::Projective),
            "polynomial2" | "polynomial" | "poly2" => Ok(TransformKind::Polynomial2),
            other => Err(format!(
                "unknown transform kind {other:?} (expected projective or polynomial2)"
            )),
        }
    }
}

/// A fitted plane mapping of either supported family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Transform2D {
    Projective(ProjectiveTransform),
    Polynomial2(Polynomial2Transform),
}

impl Transform2D {
    pub fn kind(&self) -> TransformKind {
        match self {
            Transform2D::Projective(_) => TransformKind::Projective,
            Transform2D::Polynomial2(_) => TransformKind::Polynomial2,
        }
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        match self {
            Transform2D::Projective(t) => t.apply(p),
            Transform2D::Polynomial2(t) => Ok(t.apply(p)),
        }
    }

    pub fn identity() -> Self {
        Transform2D::Projective(ProjectiveTransform::identity())
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Transform2D::Projective(ProjectiveTransform::translation(dx, dy))
    }
}

impl From<ProjectiveTransform> for Transform2D {
    fn from(t: ProjectiveTransform) -> Self {
        Transform2D::Projective(t)
    }
}

impl From<Polynomial2Transform> for Transform2D {
    fn from(t: Polynomial2Transform) -> Self {
        Transform2D::Polynomial2(t)
    }
}

/// Fits the requested family in the historical→modern direction.
pub fn fit(gcps: &[ControlPointPair], kind: TransformKind) -> Result<Transform2D> {
    match kind {
        TransformKind::Projective => fit_projective(gcps).map(Transform2D::from),
        TransformKind::Polynomial2 => fit_polynomial2(gcps).map(Transform2D::from),
    }
}
