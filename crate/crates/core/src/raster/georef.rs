use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::mercator;
use super::{RasterError, Result};

/// Affine from continuous pixel coordinates to spherical Web Mercator metres:
/// `X = a·col + b·row + c`, `Y = d·col + e·row + f`.
///
/// `(col, row) = (0, 0)` is the top-left *corner* of the raster; pixel
/// centres sit at half-integer coordinates. World files use the centre of
/// the top-left pixel instead, see [`GeoReference::to_world_file`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoReference {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl GeoReference {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        let g = GeoReference { a, b, c, d, e, f };
        g.validate()?;
        Ok(g)
    }

    /// North-up raster with square pixels of `pixel_size` metres whose
    /// top-left corner sits at `(x0, y0)`.
    pub fn north_up(x0: f64, y0: f64, pixel_size: f64) -> Result<Self> {
        Self::new(pixel_size, 0.0, x0, 0.0, -pixel_size, y0)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.a, self.b, self.c, self.d, self.e, self.f];
        if vals.iter().any(|v| !v.is_finite()) || !(self.determinant().abs() > 0.0) {
            return Err(RasterError::DegenerateGeoReference);
        }
        Ok(())
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.e - self.b * self.d
    }

    /// Mercator area of one pixel, m².
    pub fn pixel_area(&self) -> f64 {
        self.determinant().abs()
    }

    pub fn pixel_to_mercator(&self, col: f64, row: f64) -> (f64, f64) {
        (
            self.a * col + self.b * row + self.c,
            self.d * col + self.e * row + self.f,
        )
    }

    pub fn mercator_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let det = self.determinant();
        let (dx, dy) = (x - self.c, y - self.f);
        ((self.e * dx - self.b * dy) / det, (self.a * dy - self.d * dx) / det)
    }

    pub fn pixel_center(&self, col: u32, row: u32) -> (f64, f64) {
        self.pixel_to_mercator(col as f64 + 0.5, row as f64 + 0.5)
    }

    pub fn pixel_to_lonlat(&self, col: f64, row: f64) -> (f64, f64) {
        let (x, y) = self.pixel_to_mercator(col, row);
        mercator::mercator_to_lonlat(x, y)
    }

    /// The six world-file values `(A, D, B, E, C, F)` anchored at the centre
    /// of the top-left pixel.
    pub fn world_file_values(&self) -> [f64; 6] {
        let (cx, cy) = self.pixel_to_mercator(0.5, 0.5);
        [self.a, self.d, self.b, self.e, cx, cy]
    }

    pub fn from_world_file_values(v: [f64; 6]) -> Result<Self> {
        let [a, d, b, e, cx, cy] = v;
        Self::new(a, b, cx - 0.5 * a - 0.5 * b, d, e, cy - 0.5 * d - 0.5 * e)
    }

    pub fn to_world_file(&self) -> String {
        self.world_file_values()
            .iter()
            .map(|v| format!("{v}\n"))
            .collect()
    }

    pub fn from_world_file(text: &str) -> Result<Self> {
        Self::from_world_file_values(parse_world_file(text)?)
    }

    pub fn read_world_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| RasterError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_world_file(&text)
    }

    pub fn write_world_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_world_file()).map_err(|source| RasterError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Parses exactly six whitespace-separated numbers.
pub fn parse_world_file(text: &str) -> Result<[f64; 6]> {
    let nums: Vec<f64> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| RasterError::MalformedWorldFile(format!("not a number: {t:?}")))
        })
        .collect::<Result<_>>()?;
    nums.try_into().map_err(|v: Vec<f64>| {
        RasterError::MalformedWorldFile(format!("expected 6 numbers, found {}", v.len()))
    })
}

/// Sidecar name by the usual convention: `map.png` → `map.pgw`.
pub fn world_file_path(image: &Path) -> PathBuf {
    let ext = image
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default();
    let mut chars = ext.chars();
    let wext = match (chars.next(), chars.last()) {
        (Some(first), Some(last)) => format!("{first}{last}w"),
        _ => "wld".to_string(),
    };
    image.with_extension(wext)
}
