//! Synthetic map pairs with known ground truth.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lostwater_core::hydro::MapStyle;
use lostwater_core::raster::{mercator, save_png, GeoReference, Raster};
use lostwater_core::transform::{ControlPointPair, Point, ProjectiveTransform};
use lostwater_workbench::project::{ImageRef, Project};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const PARCHMENT: [u8; 3] = [232, 220, 190];
pub const WASH: [u8; 3] = [128, 150, 168];
pub const BASEMAP_LAND: [u8; 3] = [242, 239, 233];
pub const BASEMAP_WATER: [u8; 3] = [170, 218, 255];
pub const BASEMAP_BUILT: [u8; 3] = [224, 224, 224];
pub const ROAD: [u8; 3] = [255, 255, 255];

fn jitter(rng: &mut ChaCha8Rng, c: [u8; 3], amp: i32) -> [u8; 4] {
    let mut out = [255u8; 4];
    for i in 0..3 {
        out[i] = (c[i] as i32 + rng.random_range(-amp..=amp)).clamp(0, 255) as u8;
    }
    out
}

/// Homography about the raster centre: rotation, scale, mild perspective.
pub fn centred_homography(size: f64, angle_deg: f64, scale: f64, g: [f64; 2]) -> ProjectiveTransform {
    let c = size / 2.0;
    let (s, co) = angle_deg.to_radians().sin_cos();
    let a = [[scale * co, -scale * s], [scale * s, scale * co]];
    // x' = A (x - c) / w + c with w = 1 + g·(x - c)
    let h = [
        [a[0][0] + c * g[0], a[0][1] + c * g[1], -a[0][0] * c - a[0][1] * c + c * (1.0 - g[0] * c - g[1] * c)],
        [a[1][0] + c * g[0], a[1][1] + c * g[1], -a[1][0] * c - a[1][1] * c + c * (1.0 - g[0] * c - g[1] * c)],
        [g[0], g[1], 1.0 - g[0] * c - g[1] * c],
    ];
    let k = h[2][2];
    ProjectiveTransform {
        h: h.map(|row| row.map(|v| v / k)),
    }
}

pub fn apply(h: &ProjectiveTransform, p: Point) -> Point {
    h.apply(p).expect("point off the horizon")
}

/// `n × n` grid of control points over the historical frame, mapped by
/// `h`, with Gaussian pick noise of `sigma` px on each destination axis.
pub fn grid_gcps(h: &ProjectiveTransform, size: f64, n: usize, sigma: f64, seed: u64) -> Vec<ControlPointPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma.max(1e-300)).unwrap();
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let t = |k: usize| size * (0.1 + 0.8 * k as f64 / (n - 1) as f64);
            let src = Point::new(t(i), t(j));
            let mut dst = apply(h, src);
            if sigma > 0.0 {
                dst.x += noise.sample(&mut rng);
                dst.y += noise.sample(&mut rng);
            }
            out.push(ControlPointPair::new(format!("p{:02}", out.len() + 1), src, dst));
        }
    }
    out
}

/// Renders a historical raster whose pixel `(col, row)` shows water when
/// the modern-frame position of its centre satisfies `water`.
pub fn render_historical(size: u32, h: &ProjectiveTransform, seed: u64, water: impl Fn(Point) -> bool) -> Raster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Raster::from_fn(size, size, |c, r| {
        let q = apply(h, Point::new(c as f64 + 0.5, r as f64 + 0.5));
        if water(q) {
            jitter(&mut rng, WASH, 6)
        } else {
            jitter(&mut rng, PARCHMENT, 8)
        }
    })
}

pub fn manila_georef(pixel_m: f64) -> GeoReference {
    let (x0, y0) = mercator::lonlat_to_mercator(120.955, 14.605).unwrap();
    GeoReference::north_up(x0, y0, pixel_m).unwrap()
}

/// Writes both rasters and a project file into `dir`.
pub fn write_project(
    dir: &Path,
    name: &str,
    historical: &Raster,
    modern: &Raster,
    gcps: Vec<ControlPointPair>,
) -> (Project, PathBuf) {
    save_png(historical, &dir.join("historical.png")).unwrap();
    save_png(modern, &dir.join("modern.png")).unwrap();
    let mut p = Project::new(name);
    p.images.historical = Some(ImageRef {
        path: "historical.png".into(),
        georef: historical.georef,
        style: MapStyle::HistoricalWash,
    });
    p.images.modern = Some(ImageRef {
        path: "modern.png".into(),
        georef: modern.georef,
        style: MapStyle::ModernBasemap,
    });
    p.gcps = gcps;
    let path = dir.join("project.json");
    p.save(&path).unwrap();
    (p, path)
}

// ---- vanished estuary ------------------------------------------------------

pub const ESTUARY_SIZE: u32 = 1024;

/// Creek that was filled in: a meandering band entering from the west.
pub fn erased_channel(q: Point) -> bool {
    q.x >= 0.0 && q.x <= 700.0 && (q.y - (300.0 + 80.0 * (q.x / 130.0).sin())).abs() <= 20.0
}

/// River that survives, running north-south.
pub fn surviving_channel(q: Point) -> bool {
    (q.x - (650.0 + 60.0 * (q.y / 150.0).sin())).abs() <= 22.0
}

fn on_road(q: Point) -> bool {
    (q.y - 760.0).abs() <= 1.5 || (q.x - 0.35 * q.y - 150.0).abs() <= 1.5
}

pub struct Estuary {
    pub project: Project,
    pub path: PathBuf,
    pub h: ProjectiveTransform,
    /// Modern-frame truth, row-major.
    pub erased: Vec<bool>,
    pub surviving: Vec<bool>,
}

pub fn vanished_estuary(dir: &Path) -> Estuary {
    let size = ESTUARY_SIZE;
    let h = centred_homography(size as f64, 8.0, 1.25, [3e-5, -2e-5]);
    let historical = render_historical(size, &h, 1, |q| erased_channel(q) || surviving_channel(q));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let modern = Raster::from_fn(size, size, |c, r| {
        let q = Point::new(c as f64 + 0.5, r as f64 + 0.5);
        if on_road(q) {
            jitter(&mut rng, ROAD, 0)
        } else if surviving_channel(q) {
            jitter(&mut rng, BASEMAP_WATER, 2)
        } else if erased_channel(q) {
            jitter(&mut rng, BASEMAP_BUILT, 2)
        } else {
            jitter(&mut rng, BASEMAP_LAND, 2)
        }
    })
    .with_georef(Some(manila_georef(2.0)));
    let gcps = grid_gcps(&h, size as f64, 4, 0.25, 3);
    let (project, path) = write_project(dir, "vanished estuary", &historical, &modern, gcps);
    let mut erased = Vec::new();
    let mut surviving = Vec::new();
    for r in 0..size {
        for c in 0..size {
            let q = Point::new(c as f64 + 0.5, r as f64 + 0.5);
            let s = surviving_channel(q);
            surviving.push(s);
            erased.push(erased_channel(q) && !s);
        }
    }
    Estuary {
        project,
        path,
        h,
        erased,
        surviving,
    }
}

// ---- meander cut-off -------------------------------------------------------

pub const MEANDER_SIZE: u32 = 512;
const MEANDER_HALF_WIDTH: f64 = 15.0;
const MEANDER_CENTRE: Point = Point::new(256.0, 256.0);
const MEANDER_RADIUS: f64 = 110.0;

fn dist_to_vertical(q: Point, x: f64, y0: f64, y1: f64) -> f64 {
    let y = q.y.clamp(y0, y1);
    ((q.x - x).powi(2) + (q.y - y).powi(2)).sqrt()
}

/// Old course: straight, then a half-circle loop to the east, then straight.
pub fn old_course(q: Point) -> bool {
    let (c, r) = (MEANDER_CENTRE, MEANDER_RADIUS);
    let top = dist_to_vertical(q, c.x, 0.0, c.y - r);
    let bottom = dist_to_vertical(q, c.x, c.y + r, MEANDER_SIZE as f64);
    let arc = if q.x >= c.x {
        (q.distance(&c) - r).abs()
    } else {
        q.distance(&Point::new(c.x, c.y - r)).min(q.distance(&Point::new(c.x, c.y + r)))
    };
    top.min(bottom).min(arc) <= MEANDER_HALF_WIDTH
}

/// New course: the river cut straight through the neck of the loop.
pub fn new_course(q: Point) -> bool {
    (q.x - MEANDER_CENTRE.x).abs() <= MEANDER_HALF_WIDTH
}

pub struct Meander {
    pub project: Project,
    pub path: PathBuf,
    pub lost: usize,
    pub new: usize,
}

pub fn meander(dir: &Path) -> Meander {
    let size = MEANDER_SIZE;
    let h = centred_homography(size as f64, -5.0, 1.1, [-4e-5, 2e-5]);
    let historical = render_historical(size, &h, 11, old_course);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let modern = Raster::from_fn(size, size, |c, r| {
        let q = Point::new(c as f64 + 0.5, r as f64 + 0.5);
        if new_course(q) {
            jitter(&mut rng, BASEMAP_WATER, 2)
        } else {
            jitter(&mut rng, BASEMAP_LAND, 2)
        }
    })
    .with_georef(Some(manila_georef(5.0)));
    let gcps = grid_gcps(&h, size as f64, 3, 0.0, 13);
    let (project, path) = write_project(dir, "meander cut-off", &historical, &modern, gcps);
    let (mut lost, mut new) = (0, 0);
    for r in 0..size {
        for c in 0..size {
            let q = Point::new(c as f64 + 0.5, r as f64 + 0.5);
            match (old_course(q), new_course(q)) {
                (true, false) => lost += 1,
                (false, true) => new += 1,
                _ => {}
            }
        }
    }
    Meander {
        project,
        path,
        lost,
        new,
    }
}

// ---- random transforms -----------------------------------------------------

#[path = "../../../core/tests/common/mod.rs"]
mod synth;
#[allow(unused_imports)]
pub use synth::{gcps_through, random_homography, random_points, random_quadratic};

// ---- small pair ------------------------------------------------------------

pub const SMALL: u32 = 96;

/// Historical shows a pond over x 20..70, y 30..60 (modern frame); the
/// modern map keeps only its western half. Frames differ by a shift.
pub fn small_pair() -> (Raster, Raster, Vec<ControlPointPair>) {
    let shift = ProjectiveTransform::translation(3.0, -2.0);
    let pond = |q: Point| (20.0..70.0).contains(&q.x) && (30.0..60.0).contains(&q.y);
    let historical = render_historical(SMALL, &shift, 5, pond);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let modern = Raster::from_fn(SMALL, SMALL, |c, r| {
        let q = Point::new(c as f64 + 0.5, r as f64 + 0.5);
        if pond(q) && q.x < 45.0 {
            jitter(&mut rng, BASEMAP_WATER, 2)
        } else {
            jitter(&mut rng, BASEMAP_LAND, 2)
        }
    });
    let gcps = [(10.0, 10.0), (80.0, 12.0), (85.0, 84.0), (12.0, 80.0), (50.0, 45.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| ControlPointPair::new(format!("c{i}"), (x, y), (x + 3.0, y - 2.0)))
        .collect();
    (historical, modern, gcps)
}
