use rayon::prelude::*;

use super::{Raster, RasterError, Result};

/// Blends `top` over `base`: `out = (1 − α)·base + α·top` per channel with
/// `α = alpha · top_alpha / 255`, rounded half-up.
pub fn composite(base: &Raster, top: &Raster, alpha: f64) -> Result<Raster> {
    if base.dimensions() != top.dimensions() {
        return Err(RasterError::DimensionMismatch(
            base.width(),
            base.height(),
            top.width(),
            top.height(),
        ));
    }
    let alpha = alpha.clamp(0.0, 1.0);
    let mut pixels = vec![0u8; base.pixels().len()];
    pixels
        .par_chunks_mut(4)
        .zip(base.pixels().par_chunks(4).zip(top.pixels().par_chunks(4)))
        .for_each(|(out, (b, t))| {
            let a = alpha * t[3] as f64 / 255.0;
            for k in 0..4 {
                let v = (1.0 - a) * b[k] as f64 + a * t[k] as f64;
                out[k] = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
            }
        });
    Ok(Raster::new(base.width(), base.height(), pixels)?.with_georef(base.georef))
}
