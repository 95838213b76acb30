//! Spherical Web Mercator.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::{RasterError, Result};

/// Sphere radius, metres.
pub const EARTH_RADIUS: f64 = 6_378_137.0;

/// Largest |latitude| accepted by [`lonlat_to_mercator`], degrees.
pub const MAX_LATITUDE: f64 = 85.06;

pub fn lonlat_to_mercator(lon: f64, lat: f64) -> Result<(f64, f64)> {
    if !(lat.abs() <= MAX_LATITUDE) || !lon.is_finite() {
        return Err(RasterError::LatitudeOutOfRange(lat));
    }
    let x = EARTH_RADIUS * lon.to_radians();
    let y = EARTH_RADIUS * (FRAC_PI_4 + lat.to_radians() / 2.0).tan().ln();
    Ok((x, y))
}

pub fn mercator_to_lonlat(x: f64, y: f64) -> (f64, f64) {
    let lon = (x / EARTH_RADIUS).to_degrees();
    let lat = (2.0 * (y / EARTH_RADIUS).exp().atan() - FRAC_PI_2).to_degrees();
    (lon, lat)
}

/// Factor turning Mercator area into ground area at Mercator northing `y`.
///
/// The projection stretches both axes by sec(φ), so areas scale by sec²(φ).
pub fn area_scale(y: f64) -> f64 {
    let (_, lat) = mercator_to_lonlat(0.0, y);
    lat.to_radians().cos().powi(2)
}
