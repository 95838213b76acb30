//! Water masks from colour rules, morphology, mask diffs and change-map
//! rendering and vectorisation.

mod annotation;
mod change;
mod color;
pub mod components;
mod extract;
pub mod geojson;
mod mask;
pub mod morphology;
mod render;
mod vectorize;

use thiserror::Error;

use crate::raster::RasterError;

pub use annotation::{AnnotationStatus, ManualAnnotation, Shape};
pub use change::{
    diff_masks, pixel_ground_area, ChangeClass, ChangeMap, ChangeSummary, ClassAreas, ClassCounts,
    Provenance,
};
pub use color::{Hsv, HsvRange, MapStyle, WaterColorConfig};
pub use extract::{classify_water, extract_water};
pub use mask::{warp_mask, WaterMask};
pub use render::{render_changemap, RenderStyle};
pub use vectorize::{vectorize, ChangePolygon, COASTAL_LOST_LABEL};

#[derive(Debug, Error)]
pub enum HydroError {
    #[error("DimensionMismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("InvalidMask: {0}")]
    InvalidMask(String),
    #[error("InvalidAnnotation: {0}")]
    InvalidAnnotation(String),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

impl HydroError {
    pub fn name(&self) -> &'static str {
        match self {
            HydroError::DimensionMismatch(..) => "DimensionMismatch",
            HydroError::InvalidConfig(_) => "InvalidConfig",
            HydroError::InvalidMask(_) => "InvalidMask",
            HydroError::InvalidAnnotation(_) => "InvalidAnnotation",
            HydroError::Raster(e) => e.name(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HydroError>;
