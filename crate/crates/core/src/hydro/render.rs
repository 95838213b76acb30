use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnnotationStatus, ChangeClass, ChangeMap};
use crate::raster::{Raster, Rgba, TRANSPARENT};
use crate::transform::Point;

/// Fill and stroke colours for a rendered change map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    pub lost: Rgba,
    pub persistent: Rgba,
    pub new: Rgba,
    pub underground: Rgba,
    pub confirmed_present: Rgba,
    pub confirmed_lost: Rgba,
    /// Annotation stroke width in pixels.
    pub stroke_width: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            lost: [255, 0, 0, 255],
            persistent: [0, 170, 0, 255],
            new: [0, 90, 255, 255],
            underground: [148, 0, 211, 255],
            confirmed_present: [0, 90, 0, 255],
            confirmed_lost: [130, 0, 0, 255],
            stroke_width: 3.0,
        }
    }
}

impl RenderStyle {
    pub fn fill(&self, class: ChangeClass) -> Rgba {
        match class {
            ChangeClass::Lost => self.lost,
            ChangeClass::Persistent => self.persistent,
            ChangeClass::New => self.new,
            ChangeClass::None => TRANSPARENT,
        }
    }

    pub fn stroke(&self, status: AnnotationStatus) -> Rgba {
        match status {
            AnnotationStatus::Underground => self.underground,
            AnnotationStatus::FieldConfirmedPresent => self.confirmed_present,
            AnnotationStatus::FieldConfirmedLost => self.confirmed_lost,
        }
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    p.distance(&Point::new(a.x + t * dx, a.y + t * dy))
}

/// Paints every pixel whose centre lies within `width / 2` of the segment.
fn stroke_segment(r: &mut Raster, a: Point, b: Point, width: f64, color: Rgba) {
    let hw = width / 2.0;
    let (w, h) = (r.width() as f64, r.height() as f64);
    let x0 = (a.x.min(b.x) - hw - 0.5).floor().max(0.0);
    let x1 = (a.x.max(b.x) + hw - 0.5).ceil().min(w - 1.0);
    let y0 = (a.y.min(b.y) - hw - 0.5).floor().max(0.0);
    let y1 = (a.y.max(b.y) + hw - 0.5).ceil().min(h - 1.0);
    if x0 > x1 || y0 > y1 {
        return;
    }
    for row in y0 as u32..=y1 as u32 {
        for col in x0 as u32..=x1 as u32 {
            let c = Point::new(col as f64 + 0.5, row as f64 + 0.5);
            if segment_distance(c, a, b) <= hw {
                r.put(col, row, color);
            }
        }
    }
}

/// Class fills, then annotation strokes. Underground strokes go last so they
/// sit on top of everything else.
pub fn render_changemap(c: &ChangeMap, style: &RenderStyle) -> Raster {
    let mut pixels = vec![0u8; c.classes().len() * 4];
    pixels
        .par_chunks_exact_mut(4)
        .zip(c.classes().par_iter())
        .for_each(|(px, &class)| px.copy_from_slice(&style.fill(class)));
    let mut out = Raster::new(c.width(), c.height(), pixels)
        .expect("four bytes per cell")
        .with_georef(c.georef);
    let mut order: Vec<_> = c.annotations.iter().collect();
    order.sort_by_key(|a| a.status == AnnotationStatus::Underground);
    for ann in order {
        let color = style.stroke(ann.status);
        for (a, b) in ann.segments() {
            stroke_segment(&mut out, a, b, style.stroke_width, color);
        }
    }
    out
}
