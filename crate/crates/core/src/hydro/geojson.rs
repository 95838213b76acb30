//! GeoJSON (RFC 7946) export of change polygons and annotations.
//!
//! Coordinates are lon/lat when the change map is georeferenced. Otherwise
//! they stay in pixel coordinates and the collection carries a
//! `"coordinate_space": "pixel"` foreign member.

use serde_json::{json, Map, Value};

use super::{ChangeMap, ChangePolygon, ManualAnnotation, Shape};
use crate::raster::GeoReference;
use crate::transform::Point;

fn project(georef: Option<&GeoReference>, p: Point) -> [f64; 2] {
    match georef {
        Some(g) => {
            let (lon, lat) = g.pixel_to_lonlat(p.x, p.y);
            [lon, lat]
        }
        None => [p.x, p.y],
    }
}

fn orientation(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum()
}

/// Closed ring, counter-clockwise when `ccw` (in a y-up frame), else
/// clockwise.
fn ring(georef: Option<&GeoReference>, pts: &[Point], ccw: bool) -> Value {
    let mut r: Vec<[f64; 2]> = pts.iter().map(|&p| project(georef, p)).collect();
    if (orientation(&r) > 0.0) != ccw {
        r.reverse();
    }
    if let Some(&first) = r.first() {
        r.push(first);
    }
    json!(r)
}

pub fn polygon_feature(p: &ChangePolygon, georef: Option<&GeoReference>) -> Value {
    let mut rings = vec![ring(georef, &p.exterior, true)];
    rings.extend(p.holes.iter().map(|h| ring(georef, h, false)));
    let mut props = Map::new();
    props.insert("class".into(), json!(p.class));
    props.insert("label".into(), json!(p.label()));
    props.insert("area_px".into(), json!(p.area_px));
    if let Some(a) = p.area_m2 {
        props.insert("area_m2".into(), json!(a));
    }
    if let Some(s) = p.annotation_status {
        props.insert("annotation_status".into(), json!(s));
    }
    json!({
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": rings},
        "properties": props,
    })
}

pub fn annotation_feature(a: &ManualAnnotation, georef: Option<&GeoReference>) -> Value {
    let geometry = match a.shape {
        Shape::Polyline => {
            let coords: Vec<[f64; 2]> = a.vertices.iter().map(|&p| project(georef, p)).collect();
            json!({"type": "LineString", "coordinates": coords})
        }
        Shape::Polygon => json!({"type": "Polygon", "coordinates": [ring(georef, &a.vertices, true)]}),
    };
    json!({
        "type": "Feature",
        "id": a.id,
        "geometry": geometry,
        "properties": {
            "class": "ANNOTATION",
            "annotation_status": a.status,
            "note": a.note,
        },
    })
}

/// Feature collection of `polygons` followed by the map's annotations.
pub fn feature_collection(c: &ChangeMap, polygons: &[ChangePolygon]) -> Value {
    let georef = c.georef.as_ref();
    let mut features: Vec<Value> = polygons.iter().map(|p| polygon_feature(p, georef)).collect();
    features.extend(c.annotations.iter().map(|a| annotation_feature(a, georef)));
    let mut fc = json!({"type": "FeatureCollection", "features": features});
    if georef.is_none() {
        fc["coordinate_space"] = json!("pixel");
    }
    fc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::{vectorize, AnnotationStatus, ChangeClass};

    fn square_map() -> ChangeMap {
        let classes = (0..64)
            .map(|i| {
                let (x, y) = (i % 8, i / 8);
                if (2..6).contains(&x) && (2..6).contains(&y) {
                    ChangeClass::Lost
                } else {
                    ChangeClass::None
                }
            })
            .collect();
        ChangeMap::from_classes(8, 8, classes).unwrap()
    }

    #[test]
    fn pixel_space_polygon() {
        let c = square_map();
        let fc = feature_collection(&c, &vectorize(&c, ChangeClass::Lost));
        assert_eq!(fc["coordinate_space"], "pixel");
        let f = &fc["features"][0];
        assert_eq!(f["properties"]["class"], "LOST");
        assert_eq!(f["properties"]["area_px"], 16);
        assert!(f["properties"].get("area_m2").is_none());
        let ring = f["geometry"]["coordinates"][0].as_array().unwrap();
        assert_eq!(ring.len(), 5);
        assert_eq!(ring[0], ring[4]);
    }

    #[test]
    fn lonlat_rings_are_counter_clockwise() {
        let mut c = square_map();
        c.georef = Some(GeoReference::north_up(13_000_000.0, 1_600_000.0, 10.0).unwrap());
        c.annotations.push(ManualAnnotation::polyline(
            "a1",
            vec![Point::new(0.0, 0.0), Point::new(4.0, 4.0)],
            AnnotationStatus::Underground,
        ));
        let fc = feature_collection(&c, &vectorize(&c, ChangeClass::Lost));
        assert!(fc.get("coordinate_space").is_none());
        let ring: Vec<[f64; 2]> =
            serde_json::from_value(fc["features"][0]["geometry"]["coordinates"][0].clone()).unwrap();
        assert!(orientation(&ring[..4]) > 0.0);
        assert!(ring.iter().all(|p| (116.0..118.0).contains(&p[0]) && (14.0..15.0).contains(&p[1])));
        assert!(fc["features"][0]["properties"]["area_m2"].as_f64().unwrap() > 0.0);
        let ann = &fc["features"][1];
        assert_eq!(ann["geometry"]["type"], "LineString");
        assert_eq!(ann["properties"]["annotation_status"], "UNDERGROUND");
    }
}
