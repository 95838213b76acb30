use rayon::prelude::*;

use super::{HydroError, Result};
use crate::raster::{GeoReference, Raster, RasterError, WarpSpec};

/// Binary water raster: `true` marks water.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
    pub georef: Option<GeoReference>,
}

impl WaterMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(HydroError::InvalidMask(format!(
                "{width}x{height} mask needs {} bits, got {}",
                width as usize * height as usize,
                bits.len()
            )));
        }
        Ok(WaterMask {
            width,
            height,
            bits,
            georef: None,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        WaterMask {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
            georef: None,
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(col, row));
            }
        }
        WaterMask {
            width,
            height,
            bits,
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

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn get(&self, col: u32, row: u32) -> bool {
        self.bits[row as usize * self.width as usize + col as usize]
    }

    pub fn set(&mut self, col: u32, row: u32, v: bool) {
        let w = self.width as usize;
        self.bits[row as usize * w + col as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Opaque white water on transparent ground, for inspection.
    pub fn to_raster(&self) -> Raster {
        let pixels = self
            .bits
            .iter()
            .flat_map(|&b| if b { [255u8; 4] } else { [0u8; 4] })
            .collect();
        Raster::new(self.width, self.height, pixels)
            .expect("mask dimensions")
            .with_georef(self.georef)
    }

    /// Reads back a mask written by [`WaterMask::to_raster`]: any opaque
    /// pixel is water.
    pub fn from_raster(r: &Raster) -> Self {
        let bits = r.pixels().chunks_exact(4).map(|p| p[3] > 0).collect();
        WaterMask {
            width: r.width(),
            height: r.height(),
            bits,
            georef: r.georef,
        }
    }
}

/// Nearest-neighbour inverse-mapping warp of a mask. Output pixels whose
/// centre pulls back outside the source footprint, or to infinity, are dry.
pub fn warp_mask(m: &WaterMask, spec: &WarpSpec) -> Result<WaterMask> {
    if spec.out_width == 0 || spec.out_height == 0 {
        return Err(RasterError::EmptyOutput.into());
    }
    let (w, h) = (m.width as f64, m.height as f64);
    let out_w = spec.out_width as usize;
    let mut bits = vec![false; out_w * spec.out_height as usize];
    bits.par_chunks_mut(out_w).enumerate().for_each(|(row, out)| {
        for (col, bit) in out.iter_mut().enumerate() {
            *bit = match spec.source_position(col as u32, row as u32) {
                Some(p) if p.x >= 0.0 && p.y >= 0.0 && p.x < w && p.y < h => {
                    m.get(p.x as u32, p.y as u32)
                }
                _ => false,
            };
        }
    });
    Ok(WaterMask {
        width: spec.out_width,
        height: spec.out_height,
        bits,
        georef: spec.out_georef,
    })
}
