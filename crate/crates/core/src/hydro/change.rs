use serde::{Deserialize, Serialize};

use super::{HydroError, ManualAnnotation, Result, WaterMask};
use crate::raster::{mercator, GeoReference};

/// Per-pixel change between the historical and modern water masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
#[repr(u8)]
pub enum ChangeClass {
    None = 0,
    /// Water in the historical map only.
    Lost = 1,
    /// Water in both.
    Persistent = 2,
    /// Water in the modern map only.
    New = 3,
}

impl ChangeClass {
    pub const ALL: [ChangeClass; 4] = [
        ChangeClass::Lost,
        ChangeClass::Persistent,
        ChangeClass::New,
        ChangeClass::None,
    ];

    pub fn classify(historical: bool, modern: bool) -> Self {
        match (historical, modern) {
            (true, false) => ChangeClass::Lost,
            (true, true) => ChangeClass::Persistent,
            (false, true) => ChangeClass::New,
            (false, false) => ChangeClass::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChangeClass::None => "NONE",
            ChangeClass::Lost => "LOST",
            ChangeClass::Persistent => "PERSISTENT",
            ChangeClass::New => "NEW",
        }
    }
}

impl std::str::FromStr for ChangeClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(ChangeClass::None),
            "LOST" => Ok(ChangeClass::Lost),
            "PERSISTENT" => Ok(ChangeClass::Persistent),
            "NEW" => Ok(ChangeClass::New),
            other => Err(format!("unknown change class {other:?}")),
        }
    }
}

/// Which inputs a change map was computed from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub historical: String,
    pub modern: String,
    pub transform: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeMap {
    width: u32,
    height: u32,
    classes: Vec<ChangeClass>,
    pub provenance: Provenance,
    pub annotations: Vec<ManualAnnotation>,
    pub georef: Option<GeoReference>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub lost: u64,
    pub persistent: u64,
    pub new: u64,
    pub none: u64,
}

impl ClassCounts {
    pub fn get(&self, class: ChangeClass) -> u64 {
        match class {
            ChangeClass::Lost => self.lost,
            ChangeClass::Persistent => self.persistent,
            ChangeClass::New => self.new,
            ChangeClass::None => self.none,
        }
    }

    pub fn total(&self) -> u64 {
        self.lost + self.persistent + self.new + self.none
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassAreas {
    pub lost: f64,
    pub persistent: f64,
    pub new: f64,
    pub none: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeSummary {
    pub counts: ClassCounts,
    /// Ground area in m², present when the map is georeferenced.
    pub area_m2: Option<ClassAreas>,
}

impl ChangeMap {
    pub fn from_classes(width: u32, height: u32, classes: Vec<ChangeClass>) -> Result<Self> {
        if classes.len() != width as usize * height as usize {
            return Err(HydroError::InvalidMask(format!(
                "{width}x{height} change map needs {} cells, got {}",
                width as usize * height as usize,
                classes.len()
            )));
        }
        Ok(ChangeMap {
            width,
            height,
            classes,
            provenance: Provenance::default(),
            annotations: Vec::new(),
            georef: None,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn classes(&self) -> &[ChangeClass] {
        &self.classes
    }

    pub fn get(&self, col: u32, row: u32) -> ChangeClass {
        self.classes[row as usize * self.width as usize + col as usize]
    }

    pub fn mask_of(&self, class: ChangeClass) -> Vec<bool> {
        self.classes.iter().map(|&c| c == class).collect()
    }

    pub fn counts(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for &c in &self.classes {
            match c {
                ChangeClass::Lost => counts.lost += 1,
                ChangeClass::Persistent => counts.persistent += 1,
                ChangeClass::New => counts.new += 1,
                ChangeClass::None => counts.none += 1,
            }
        }
        counts
    }

    pub fn area_m2(&self) -> Option<ClassAreas> {
        let g = self.georef?;
        let mut areas = ClassAreas::default();
        let w = self.width as usize;
        for (i, &c) in self.classes.iter().enumerate() {
            let a = pixel_ground_area(&g, (i % w) as u32, (i / w) as u32);
            match c {
                ChangeClass::Lost => areas.lost += a,
                ChangeClass::Persistent => areas.persistent += a,
                ChangeClass::New => areas.new += a,
                ChangeClass::None => areas.none += a,
            }
        }
        Some(areas)
    }

    pub fn summary(&self) -> ChangeSummary {
        ChangeSummary {
            counts: self.counts(),
            area_m2: self.area_m2(),
        }
    }
}

/// Ground area of one pixel: its Mercator footprint scaled at the latitude
/// of its centre.
pub fn pixel_ground_area(g: &GeoReference, col: u32, row: u32) -> f64 {
    let (_, y) = g.pixel_center(col, row);
    g.pixel_area() * mercator::area_scale(y)
}

/// Pixelwise comparison of two masks in the same frame.
pub fn diff_masks(historical: &WaterMask, modern: &WaterMask) -> Result<ChangeMap> {
    if historical.dimensions() != modern.dimensions() {
        let (a, b) = historical.dimensions();
        let (c, d) = modern.dimensions();
        return Err(HydroError::DimensionMismatch(a, b, c, d));
    }
    let classes = historical
        .bits()
        .iter()
        .zip(modern.bits())
        .map(|(&h, &m)| ChangeClass::classify(h, m))
        .collect();
    let mut map = ChangeMap::from_classes(historical.width(), historical.height(), classes)?;
    map.georef = modern.georef.or(historical.georef);
    Ok(map)
}
