use serde::{Deserialize, Serialize};

use super::{HydroError, Result};
use crate::raster::Rgba;

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl Hsv {
    pub fn from_rgb(r: u8, g: u8, b: u8) -> Self {
        let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let delta = max - min;
        let h = if delta == 0.0 {
            0.0
        } else if max == r {
            60.0 * ((g - b) / delta).rem_euclid(6.0)
        } else if max == g {
            60.0 * ((b - r) / delta + 2.0)
        } else {
            60.0 * ((r - g) / delta + 4.0)
        };
        let s = if max == 0.0 { 0.0 } else { delta / max };
        Hsv { h, s, v: max }
    }
}

/// Closed box in HSV space. A hue interval with `h_lo > h_hi` wraps through 360°.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvRange {
    pub h_lo: f64,
    pub h_hi: f64,
    #[serde(default)]
    pub s_lo: f64,
    #[serde(default = "one")]
    pub s_hi: f64,
    #[serde(default)]
    pub v_lo: f64,
    #[serde(default = "one")]
    pub v_hi: f64,
}

fn one() -> f64 {
    1.0
}

impl HsvRange {
    pub fn hue(h_lo: f64, h_hi: f64) -> Self {
        HsvRange {
            h_lo,
            h_hi,
            s_lo: 0.0,
            s_hi: 1.0,
            v_lo: 0.0,
            v_hi: 1.0,
        }
    }

    pub fn min_saturation(mut self, s: f64) -> Self {
        self.s_lo = s;
        self
    }

    pub fn min_value(mut self, v: f64) -> Self {
        self.v_lo = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let deg = |v: f64| (0.0..=360.0).contains(&v);
        if !deg(self.h_lo) || !deg(self.h_hi) {
            return Err(HydroError::InvalidConfig(format!(
                "hue bounds must lie in [0, 360]: {self:?}"
            )));
        }
        if !(unit(self.s_lo) && unit(self.s_hi) && self.s_lo <= self.s_hi) {
            return Err(HydroError::InvalidConfig(format!("empty saturation range: {self:?}")));
        }
        if !(unit(self.v_lo) && unit(self.v_hi) && self.v_lo <= self.v_hi) {
            return Err(HydroError::InvalidConfig(format!("empty value range: {self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, c: Hsv) -> bool {
        let hue_ok = if self.h_lo <= self.h_hi {
            c.h >= self.h_lo && c.h <= self.h_hi
        } else {
            c.h >= self.h_lo || c.h <= self.h_hi
        };
        hue_ok && c.s >= self.s_lo && c.s <= self.s_hi && c.v >= self.v_lo && c.v <= self.v_hi
    }
}

/// Drawing conventions with a shipped water colour rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapStyle {
    /// Flat light-blue water of present-day web basemaps.
    ModernBasemap,
    /// Faded blue-grey washes of hand-coloured survey maps.
    HistoricalWash,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaterColorConfig {
    pub ranges: Vec<HsvRange>,
    #[serde(default = "default_min_area")]
    pub min_component_area: u32,
    #[serde(default = "default_radius")]
    pub morphology_radius: u32,
}

fn default_min_area() -> u32 {
    50
}

fn default_radius() -> u32 {
    1
}

impl WaterColorConfig {
    pub fn new(ranges: Vec<HsvRange>) -> Self {
        WaterColorConfig {
            ranges,
            min_component_area: default_min_area(),
            morphology_radius: default_radius(),
        }
    }

    pub fn for_style(style: MapStyle) -> Self {
        match style {
            MapStyle::ModernBasemap => Self::new(vec![HsvRange::hue(190.0, 230.0)
                .min_saturation(0.15)
                .min_value(0.4)]),
            MapStyle::HistoricalWash => Self::new(vec![HsvRange::hue(170.0, 260.0)
                .min_saturation(0.08)
                .min_value(0.25)]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_component_area < 1 {
            return Err(HydroError::InvalidConfig(
                "min_component_area must be at least 1".into(),
            ));
        }
        self.ranges.iter().try_for_each(HsvRange::validate)
    }

    /// Colour rule alone: alpha must be non-zero and HSV inside some range.
    pub fn is_water_color(&self, px: Rgba) -> bool {
        if px[3] == 0 {
            return false;
        }
        let hsv = Hsv::from_rgb(px[0], px[1], px[2]);
        self.ranges.iter().any(|r| r.contains(hsv))
    }
}
