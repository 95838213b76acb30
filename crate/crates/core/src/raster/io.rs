use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbaImage};

use super::georef::world_file_path;
use super::{GeoReference, Raster, RasterError, Result};

pub fn read_png_bytes(bytes: &[u8]) -> Result<Raster> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.into_rgba8();
    let (w, h) = img.dimensions();
    Raster::new(w, h, img.into_raw())
}

pub fn png_bytes(raster: &Raster) -> Result<Vec<u8>> {
    let img = RgbaImage::from_raw(raster.width(), raster.height(), raster.pixels().to_vec())
        .ok_or_else(|| RasterError::InvalidRaster("pixel buffer size mismatch".into()))?;
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

/// Loads an RGBA PNG. Any georeference must be attached separately.
pub fn load_png(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path).map_err(|source| RasterError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_png_bytes(&bytes)
}

/// Loads a PNG and, if a sidecar world file exists, its georeference.
pub fn load_png_with_world_file(path: &Path) -> Result<Raster> {
    let raster = load_png(path)?;
    let wf = world_file_path(path);
    let georef = if wf.exists() {
        Some(GeoReference::read_world_file(&wf)?)
    } else {
        None
    };
    Ok(raster.with_georef(georef))
}

/// Writes the PNG and, for georeferenced rasters, its sidecar world file.
pub fn save_png(raster: &Raster, path: &Path) -> Result<()> {
    let bytes = png_bytes(raster)?;
    std::fs::write(path, bytes).map_err(|source| RasterError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(g) = &raster.georef {
        g.write_world_file(&world_file_path(path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_round_trip_with_world_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        let r = Raster::from_fn(5, 3, |c, r| [c as u8 * 40, r as u8 * 80, 7, (c * r) as u8 * 10])
            .with_georef(Some(GeoReference::north_up(100.0, 200.0, 2.0).unwrap()));
        save_png(&r, &path).unwrap();
        assert!(dir.path().join("m.pgw").exists());
        assert_eq!(load_png_with_world_file(&path).unwrap(), r);
        assert_eq!(load_png(&path).unwrap().georef, None);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_png(Path::new("/nonexistent/x.png")),
            Err(RasterError::Io { .. })
        ));
    }

    #[test]
    fn garbage_bytes_are_rejected() {
        assert!(read_png_bytes(b"not a png").is_err());
    }
}
