use serde::{Deserialize, Serialize};

use super::{HydroError, Result};
use crate::transform::Point;

/// Field status a curator attaches to a waterway. None of these is ever
/// inferred from imagery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnnotationStatus {
    /// Channelled under streets or buildings (culverts, drains).
    Underground,
    /// Still flowing although the modern basemap omits it.
    FieldConfirmedPresent,
    /// Verified gone on site.
    FieldConfirmedLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Polyline,
    Polygon,
}

/// Hand-drawn line or area in the modern pixel frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualAnnotation {
    pub id: String,
    pub shape: Shape,
    pub vertices: Vec<Point>,
    pub status: AnnotationStatus,
    #[serde(default)]
    pub note: String,
}

impl ManualAnnotation {
    pub fn polyline(id: impl Into<String>, vertices: Vec<Point>, status: AnnotationStatus) -> Self {
        ManualAnnotation {
            id: id.into(),
            shape: Shape::Polyline,
            vertices,
            status,
            note: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = match self.shape {
            Shape::Polyline => 2,
            Shape::Polygon => 3,
        };
        if self.vertices.len() < min {
            return Err(HydroError::InvalidAnnotation(format!(
                "{:?} {:?} needs at least {min} vertices, got {}",
                self.shape,
                self.id,
                self.vertices.len()
            )));
        }
        if self.vertices.iter().any(|p| !p.is_finite()) {
            return Err(HydroError::InvalidAnnotation(format!(
                "annotation {:?} has a non-finite vertex",
                self.id
            )));
        }
        Ok(())
    }

    /// Segments to stroke, closing the ring for polygons.
    pub fn segments(&self) -> Vec<(Point, Point)> {
        let mut segs: Vec<(Point, Point)> = self.vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if self.shape == Shape::Polygon && self.vertices.len() > 2 {
            segs.push((*self.vertices.last().unwrap(), self.vertices[0]));
        }
        segs
    }
}
