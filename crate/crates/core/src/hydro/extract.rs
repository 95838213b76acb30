use rayon::prelude::*;

use super::components::remove_small_components;
use super::morphology::{close, open};
use super::{WaterColorConfig, WaterMask};
use crate::raster::Raster;

/// Per-pixel colour rule without any clean-up.
pub fn classify_water(r: &Raster, cfg: &WaterColorConfig) -> WaterMask {
    let bits: Vec<bool> = r
        .pixels()
        .par_chunks_exact(4)
        .map(|p| cfg.is_water_color([p[0], p[1], p[2], p[3]]))
        .collect();
    WaterMask::new(r.width(), r.height(), bits)
        .expect("one bit per pixel")
        .with_georef(r.georef)
}

/// Colour rule, then opening and closing with a disk of
/// `cfg.morphology_radius`, then removal of 8-connected components smaller
/// than `cfg.min_component_area`.
pub fn extract_water(r: &Raster, cfg: &WaterColorConfig) -> WaterMask {
    let raw = classify_water(r, cfg);
    let cleaned = close(&open(&raw, cfg.morphology_radius), cfg.morphology_radius);
    remove_small_components(&cleaned, cfg.min_component_area)
}
