//! RGBA rasters, warping by inverse mapping, overlays and Web Mercator
//! georeferencing.

mod composite;
mod georef;
mod io;
pub mod mercator;
mod warp;

use std::path::PathBuf;

use thiserror::Error;

use crate::transform::TransformError;

pub use composite::composite;
pub use georef::{parse_world_file, world_file_path, GeoReference};
pub use io::{load_png, load_png_with_world_file, png_bytes, read_png_bytes, save_png};
pub use warp::{compute_output_extent, warp, BoundingBox, WarpSpec, DEFAULT_SAMPLES_PER_EDGE};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("IoError: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("ImageError: {0}")]
    Image(#[from] image::ImageError),
    #[error("MalformedWorldFile: {0}")]
    MalformedWorldFile(String),
    #[error("DimensionMismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
    #[error("EmptyOutput: output extent has zero area")]
    EmptyOutput,
    #[error("InvalidRaster: {0}")]
    InvalidRaster(String),
    #[error("LatitudeOutOfRange: {0}° exceeds the Web Mercator limit")]
    LatitudeOutOfRange(f64),
    #[error("DegenerateGeoReference: pixel footprint has zero area")]
    DegenerateGeoReference,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl RasterError {
    pub fn name(&self) -> &'static str {
        match self {
            RasterError::Io { .. } => "IoError",
            RasterError::Image(_) => "ImageError",
            RasterError::MalformedWorldFile(_) => "MalformedWorldFile",
            RasterError::DimensionMismatch(..) => "DimensionMismatch",
            RasterError::EmptyOutput => "EmptyOutput",
            RasterError::InvalidRaster(_) => "InvalidRaster",
            RasterError::LatitudeOutOfRange(_) => "LatitudeOutOfRange",
            RasterError::DegenerateGeoReference => "DegenerateGeoReference",
            RasterError::Transform(e) => e.name(),
        }
    }
}

pub type Result<T, E = RasterError> = std::result::Result<T, E>;

pub type Rgba = [u8; 4];

pub const TRANSPARENT: Rgba = [0, 0, 0, 0];

/// Row-major 8-bit RGBA image, origin at the top-left.
///
/// The sample position of pixel `(col, row)` is its centre,
/// `(col + 0.5, row + 0.5)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    pub georef: Option<GeoReference>,
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize * 4;
        if pixels.len() != expected {
            return Err(RasterError::InvalidRaster(format!(
                "{width}x{height} RGBA needs {expected} bytes, got {}",
                pixels.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            pixels,
            georef: None,
        })
    }

    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        let pixels = color
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * 4)
            .collect();
        Raster {
            width,
            height,
            pixels,
            georef: None,
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgba) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 4);
        for row in 0..height {
            for col in 0..width {
                pixels.extend_from_slice(&f(col, row));
            }
        }
        Raster {
            width,
            height,
            pixels,
            georef: None,
        }
    }

    pub fn with_georef(mut self, georef: Option<GeoReference>) -> Self {
        self.georef = georef;
        self
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    fn offset(&self, col: u32, row: u32) -> usize {
        (row as usize * self.width as usize + col as usize) * 4
    }

    pub fn get(&self, col: u32, row: u32) -> Rgba {
        let i = self.offset(col, row);
        [
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        ]
    }

    pub fn put(&mut self, col: u32, row: u32, color: Rgba) {
        let i = self.offset(col, row);
        self.pixels[i..i + 4].copy_from_slice(&color);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.pixels.chunks_exact(self.width.max(1) as usize * 4)
    }
}
