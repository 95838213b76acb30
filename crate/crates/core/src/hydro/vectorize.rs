//! Pixel-edge contour tracing.
//!
//! Boundary edges are walked with the region on the right-hand side (in the
//! y-down pixel frame). Where two diagonal pixels meet at a vertex the walk
//! turns left, which keeps 8-connected pixels on one ring. Each component
//! then has exactly one ring of positive shoelace area (its exterior) and
//! one negative ring per hole.

use serde::{Deserialize, Serialize};

use super::components::{label_grid, NEIGHBOURS_8};
use super::{pixel_ground_area, AnnotationStatus, ChangeClass, ChangeMap};
use crate::transform::Point;

pub const COASTAL_LOST_LABEL: &str = "lost water / possible reclamation";

/// One connected region of a change class, in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePolygon {
    pub class: ChangeClass,
    /// Open ring (first vertex not repeated), positive shoelace area in the
    /// pixel frame.
    pub exterior: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    pub area_px: u64,
    pub area_m2: Option<f64>,
    /// LOST region next to persistent water that reaches the map edge.
    pub coastal: bool,
    pub annotation_status: Option<AnnotationStatus>,
}

impl ChangePolygon {
    pub fn label(&self) -> &'static str {
        match self.class {
            ChangeClass::Lost if self.coastal => COASTAL_LOST_LABEL,
            ChangeClass::Lost => "lost water",
            ChangeClass::Persistent => "persistent water",
            ChangeClass::New => "new water",
            ChangeClass::None => "no water",
        }
    }

    /// Shoelace area of the exterior minus the holes.
    pub fn ring_area(&self) -> f64 {
        signed_area(&self.exterior) + self.holes.iter().map(|h| signed_area(h)).sum::<f64>()
    }

    /// Even-odd test over all rings.
    pub fn contains(&self, p: Point) -> bool {
        std::iter::once(&self.exterior)
            .chain(&self.holes)
            .fold(false, |inside, ring| inside ^ ring_contains(ring, p))
    }
}

pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

fn ring_contains(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    E,
    S,
    W,
    N,
}

impl Dir {
    fn left(self) -> Dir {
        match self {
            Dir::E => Dir::N,
            Dir::N => Dir::W,
            Dir::W => Dir::S,
            Dir::S => Dir::E,
        }
    }

    fn right(self) -> Dir {
        self.left().left().left()
    }

    fn step(self) -> (i64, i64) {
        match self {
            Dir::E => (1, 0),
            Dir::S => (0, 1),
            Dir::W => (-1, 0),
            Dir::N => (0, -1),
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

struct Grid<'a> {
    w: i64,
    h: i64,
    set: &'a [bool],
}

impl Grid<'_> {
    fn at(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.w && y < self.h && self.set[(y * self.w + x) as usize]
    }

    /// Pixel owning the boundary edge leaving vertex `(vx, vy)` in direction
    /// `d`, if that edge exists.
    fn edge_from(&self, vx: i64, vy: i64, d: Dir) -> Option<(i64, i64)> {
        let (px, py, ox, oy) = match d {
            Dir::E => (vx, vy, vx, vy - 1),
            Dir::S => (vx - 1, vy, vx, vy),
            Dir::W => (vx - 1, vy - 1, vx - 1, vy),
            Dir::N => (vx, vy - 1, vx - 1, vy - 1),
        };
        (self.at(px, py) && !self.at(ox, oy)).then_some((px, py))
    }
}

/// Start vertex of the edge of pixel `(x, y)` whose outward side is `d`'s
/// right-hand neighbour, walking in direction `d`.
fn edge_start(x: i64, y: i64, d: Dir) -> (i64, i64) {
    match d {
        Dir::E => (x, y),
        Dir::S => (x + 1, y),
        Dir::W => (x + 1, y + 1),
        Dir::N => (x, y + 1),
    }
}

/// Traces every boundary ring of `set`. Each ring is returned with the
/// index of a pixel it bounds.
fn trace_rings(width: u32, height: u32, set: &[bool]) -> Vec<(usize, Vec<Point>)> {
    let g = Grid {
        w: width as i64,
        h: height as i64,
        set,
    };
    let mut visited = vec![0u8; set.len()];
    let mut rings = Vec::new();
    for y in 0..g.h {
        for x in 0..g.w {
            let i = (y * g.w + x) as usize;
            if !set[i] {
                continue;
            }
            for d0 in [Dir::E, Dir::S, Dir::W, Dir::N] {
                if visited[i] & d0.bit() != 0 {
                    continue;
                }
                let (sx, sy) = edge_start(x, y, d0);
                if g.edge_from(sx, sy, d0) != Some((x, y)) {
                    continue;
                }
                let mut verts: Vec<(i64, i64, Dir)> = Vec::new();
                let (mut vx, mut vy, mut d) = (sx, sy, d0);
                let (mut px, mut py) = (x, y);
                loop {
                    visited[(py * g.w + px) as usize] |= d.bit();
                    verts.push((vx, vy, d));
                    let (dx, dy) = d.step();
                    vx += dx;
                    vy += dy;
                    let next = [d.left(), d, d.right()]
                        .into_iter()
                        .find_map(|nd| g.edge_from(vx, vy, nd).map(|p| (nd, p)));
                    let (nd, (nx, ny)) = next.expect("boundary edges form closed rings");
                    if (vx, vy, nd) == (sx, sy, d0) {
                        break;
                    }
                    d = nd;
                    px = nx;
                    py = ny;
                }
                let n = verts.len();
                let ring: Vec<Point> = (0..n)
                    .filter(|&k| verts[k].2 != verts[(k + n - 1) % n].2)
                    .map(|k| Point::new(verts[k].0 as f64, verts[k].1 as f64))
                    .collect();
                rings.push((i, ring));
            }
        }
    }
    rings
}

/// Components of `persistent` that reach the raster border.
fn border_reaching(width: u32, height: u32, persistent: &[bool]) -> (Vec<u32>, Vec<bool>) {
    let comps = label_grid(width, height, persistent);
    let mut touches = vec![false; comps.count() + 1];
    let (w, h) = (width as usize, height as usize);
    for (i, &l) in comps.labels.iter().enumerate() {
        let (x, y) = (i % w, i / w);
        if l != 0 && (x == 0 || y == 0 || x + 1 == w || y + 1 == h) {
            touches[l as usize] = true;
        }
    }
    (comps.labels, touches)
}

/// Polygons of every 8-connected region of `class`, in raster-scan order of
/// each region's first pixel.
pub fn vectorize(c: &ChangeMap, class: ChangeClass) -> Vec<ChangePolygon> {
    let (width, height) = (c.width(), c.height());
    let set = c.mask_of(class);
    let comps = label_grid(width, height, &set);
    if comps.count() == 0 {
        return Vec::new();
    }
    let mut exteriors: Vec<Option<Vec<Point>>> = vec![None; comps.count()];
    let mut holes: Vec<Vec<Vec<Point>>> = vec![Vec::new(); comps.count()];
    for (pixel, ring) in trace_rings(width, height, &set) {
        let k = comps.labels[pixel] as usize - 1;
        if signed_area(&ring) > 0.0 {
            debug_assert!(exteriors[k].is_none(), "component with two exteriors");
            exteriors[k] = Some(ring);
        } else {
            holes[k].push(ring);
        }
    }

    let w = width as usize;
    let mut area_m2 = vec![0.0; comps.count()];
    if let Some(g) = c.georef {
        for (i, &l) in comps.labels.iter().enumerate() {
            if l != 0 {
                area_m2[l as usize - 1] += pixel_ground_area(&g, (i % w) as u32, (i / w) as u32);
            }
        }
    }

    let mut coastal = vec![false; comps.count()];
    if class == ChangeClass::Lost {
        let (plabels, touches) = border_reaching(width, height, &c.mask_of(ChangeClass::Persistent));
        let (wi, hi) = (width as i32, height as i32);
        for (i, &l) in comps.labels.iter().enumerate() {
            if l == 0 || coastal[l as usize - 1] {
                continue;
            }
            let (x, y) = ((i % w) as i32, (i / w) as i32);
            coastal[l as usize - 1] = NEIGHBOURS_8.iter().any(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx >= 0
                    && ny >= 0
                    && nx < wi
                    && ny < hi
                    && touches[plabels[(ny * wi + nx) as usize] as usize]
            });
        }
    }

    let mut polys: Vec<ChangePolygon> = exteriors
        .into_iter()
        .zip(holes)
        .enumerate()
        .map(|(k, (ext, holes))| ChangePolygon {
            class,
            exterior: ext.expect("every component has an exterior ring"),
            holes,
            area_px: comps.sizes[k] as u64,
            area_m2: c.georef.map(|_| area_m2[k]),
            coastal: coastal[k],
            annotation_status: None,
        })
        .collect();
    attach_annotations(&mut polys, c);
    polys
}

/// Tags each polygon with the status of the first annotation that passes
/// through it.
fn attach_annotations(polys: &mut [ChangePolygon], c: &ChangeMap) {
    for ann in &c.annotations {
        let samples: Vec<Point> = ann
            .segments()
            .into_iter()
            .flat_map(|(a, b)| {
                let n = (a.distance(&b) / 0.5).ceil().max(1.0) as usize;
                (0..=n).map(move |k| {
                    let t = k as f64 / n as f64;
                    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
                })
            })
            .collect();
        for poly in polys.iter_mut().filter(|p| p.annotation_status.is_none()) {
            if samples.iter().any(|&s| poly.contains(s)) {
                poly.annotation_status = Some(ann.status);
            }
        }
    }
}
