//! Georectification of historical map rasters onto a modern basemap and
//! detection of water bodies that vanished, persisted or appeared between
//! the two.
//!
//! - [`transform`]: ground-control-point transforms (projective, quadratic).
//! - [`raster`]: RGBA rasters, inverse-mapping warps, overlays, Web Mercator.
//! - [`hydro`]: colour-rule water masks, mask diffs, change rendering and
//!   polygon export.

pub mod transform;
pub mod raster;
pub mod hydro;
