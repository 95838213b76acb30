use std::collections::{HashMap, HashSet};

use lostwater_core::hydro::{
    components::label_components, diff_masks, extract_water, morphology, render_changemap,
    vectorize, warp_mask, AnnotationStatus, ChangeClass, ChangeMap, HsvRange, ManualAnnotation,
    RenderStyle, WaterColorConfig, WaterMask,
};
use lostwater_core::raster::{Raster, WarpSpec};
use lostwater_core::transform::{Point, ProjectiveTransform, Transform2D};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mask(rng: &mut ChaCha8Rng, w: u32, h: u32, p: f64) -> WaterMask {
    WaterMask::from_fn(w, h, |_, _| rng.random_bool(p))
}

/// Rectangles of water-ish and other colours over noise.
fn blotchy_raster(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Raster {
    let mut r = Raster::from_fn(w, h, |_, _| {
        [rng.random(), rng.random(), rng.random(), if rng.random_bool(0.9) { 255 } else { 0 }]
    });
    for _ in 0..rng.random_range(1..8) {
        let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
        let (x1, y1) = ((x0 + rng.random_range(1..30)).min(w), (y0 + rng.random_range(1..30)).min(h));
        let c: [u8; 4] = [rng.random_range(0..120), rng.random_range(80..200), rng.random_range(150..=255), 255];
        for y in y0..y1 {
            for x in x0..x1 {
                if rng.random_bool(0.95) {
                    r.put(x, y, c);
                }
            }
        }
    }
    r
}

// ---- independent oracles -------------------------------------------------

fn oracle_hsv(p: [u8; 4]) -> (f64, f64, f64) {
    let c = [p[0] as f64 / 255.0, p[1] as f64 / 255.0, p[2] as f64 / 255.0];
    let (mut imax, mut imin) = (0, 0);
    for i in 1..3 {
        if c[i] > c[imax] {
            imax = i;
        }
        if c[i] < c[imin] {
            imin = i;
        }
    }
    let (max, min) = (c[imax], c[imin]);
    let d = max - min;
    let mut h = 0.0;
    if d > 0.0 {
        // Sector of the hexcone, then offset inside it.
        h = match imax {
            0 => 60.0 * (c[1] - c[2]) / d,
            1 => 120.0 + 60.0 * (c[2] - c[0]) / d,
            _ => 240.0 + 60.0 * (c[0] - c[1]) / d,
        };
        if h < 0.0 {
            h += 360.0;
        }
    }
    let s = if max > 0.0 { d / max } else { 0.0 };
    (h, s, max)
}

type Cells = HashSet<(i32, i32)>;

fn cells(m: &WaterMask) -> Cells {
    let mut s = HashSet::new();
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) {
                s.insert((x as i32, y as i32));
            }
        }
    }
    s
}

fn cross(r: i32) -> Vec<(i32, i32)> {
    let mut v = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                v.push((dx, dy));
            }
        }
    }
    v
}

fn oracle_erode(s: &Cells, w: i32, h: i32, r: i32) -> Cells {
    let mut out = HashSet::new();
    for y in 0..h {
        for x in 0..w {
            let keep = cross(r).iter().all(|&(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx < 0 || ny < 0 || nx >= w || ny >= h || s.contains(&(nx, ny))
            });
            if keep {
                out.insert((x, y));
            }
        }
    }
    out
}

fn oracle_dilate(s: &Cells, w: i32, h: i32, r: i32) -> Cells {
    let mut out = HashSet::new();
    for &(x, y) in s {
        for (dx, dy) in cross(r) {
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && nx < w && ny < h {
                out.insert((nx, ny));
            }
        }
    }
    out
}

fn find(parent: &mut HashMap<(i32, i32), (i32, i32)>, c: (i32, i32)) -> (i32, i32) {
    let p = parent[&c];
    if p == c {
        return c;
    }
    let root = find(parent, p);
    parent.insert(c, root);
    root
}

/// Union-find over 8-neighbours: root → member cells.
fn oracle_components(s: &Cells) -> HashMap<(i32, i32), Vec<(i32, i32)>> {
    let mut parent: HashMap<_, _> = s.iter().map(|&c| (c, c)).collect();
    for &(x, y) in s {
        for dy in -1..=1 {
            for dx in -1..=1 {
                let n = (x + dx, y + dy);
                if s.contains(&n) {
                    let (a, b) = (find(&mut parent, (x, y)), find(&mut parent, n));
                    if a != b {
                        parent.insert(a, b);
                    }
                }
            }
        }
    }
    let mut groups: HashMap<_, Vec<_>> = HashMap::new();
    for &c in s {
        let root = find(&mut parent, c);
        groups.entry(root).or_default().push(c);
    }
    groups
}

fn oracle_extract(r: &Raster, cfg: &WaterColorConfig) -> Cells {
    let (w, h) = (r.width() as i32, r.height() as i32);
    let mut raw = HashSet::new();
    for y in 0..h {
        for x in 0..w {
            let p = r.get(x as u32, y as u32);
            let (hh, s, v) = oracle_hsv(p);
            let hit = cfg.ranges.iter().any(|g| {
                let hue = if g.h_lo <= g.h_hi {
                    hh >= g.h_lo && hh <= g.h_hi
                } else {
                    hh >= g.h_lo || hh <= g.h_hi
                };
                hue && s >= g.s_lo && s <= g.s_hi && v >= g.v_lo && v <= g.v_hi
            });
            if p[3] > 0 && hit {
                raw.insert((x, y));
            }
        }
    }
    let k = cfg.morphology_radius as i32;
    let opened = oracle_dilate(&oracle_erode(&raw, w, h, k), w, h, k);
    let closed = oracle_erode(&oracle_dilate(&opened, w, h, k), w, h, k);
    oracle_components(&closed)
        .into_values()
        .filter(|g| g.len() >= cfg.min_component_area as usize)
        .flatten()
        .collect()
}

fn odd_cfg(min_area: u32, radius: u32) -> WaterColorConfig {
    WaterColorConfig {
        ranges: vec![
            HsvRange::hue(183.7, 251.3).min_saturation(0.213).min_value(0.197),
            HsvRange::hue(341.9, 12.3).min_saturation(0.5).min_value(0.5),
        ],
        min_component_area: min_area,
        morphology_radius: radius,
    }
}

// ---- water extraction ----------------------------------------------------

#[test]
fn extract_water_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..40 {
        let (w, h) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let r = blotchy_raster(&mut rng, w, h);
        let cfg = odd_cfg(rng.random_range(1..60), rng.random_range(0..3));
        let got = cells(&extract_water(&r, &cfg));
        assert_eq!(got, oracle_extract(&r, &cfg), "case {case}: {w}x{h} {cfg:?}");
    }
}

#[test]
fn square_and_speck() {
    let blue = [82, 143, 204, 255];
    let mut r = Raster::filled(200, 200, [255, 255, 255, 255]);
    for y in 50..70 {
        for x in 80..100 {
            r.put(x, y, blue);
        }
    }
    r.put(150, 20, blue);
    let mut cfg = WaterColorConfig::new(vec![HsvRange::hue(180.0, 260.0).min_saturation(0.2).min_value(0.2)]);
    let square: Cells = (50..70).flat_map(|y| (80..100).map(move |x| (x, y))).collect();

    // Without morphology the filter alone isolates the square.
    cfg.morphology_radius = 0;
    assert_eq!(cells(&extract_water(&r, &cfg)), square);

    // The default cross opening trims the square's four corners.
    cfg.morphology_radius = 1;
    let got = cells(&extract_water(&r, &cfg));
    assert_eq!(got, oracle_extract(&r, &cfg));
    let corners: Cells = [(80, 50), (99, 50), (80, 69), (99, 69)].into();
    assert_eq!(got, square.difference(&corners).copied().collect());
}

// ---- mask warp -----------------------------------------------------------

fn oracle_apply(h: &[[f64; 3]; 3], x: f64, y: f64) -> Option<(f64, f64)> {
    let w = h[2][0] * x + h[2][1] * y + h[2][2];
    if w.abs() < 1e-12 {
        return None;
    }
    Some(((h[0][0] * x + h[0][1] * y + h[0][2]) / w, (h[1][0] * x + h[1][1] * y + h[1][2]) / w))
}

#[test]
fn mask_warp_matches_nearest_neighbour_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..50 {
        let m = random_mask(&mut rng, 32, 32, 0.5);
        let (s, c) = rng.random_range(-0.4f64..0.4).sin_cos();
        let k: f64 = rng.random_range(0.8..1.25);
        let hm = [
            [k * c, -k * s, rng.random_range(-6.0..6.0)],
            [k * s, k * c, rng.random_range(-6.0..6.0)],
            [rng.random_range(-2e-3..2e-3), rng.random_range(-2e-3..2e-3), 1.0],
        ];
        let (ow, oh) = (rng.random_range(1..48), rng.random_range(1..48));
        let spec = WarpSpec::new(Transform2D::Projective(ProjectiveTransform { h: hm }), ow, oh);
        let out = warp_mask(&m, &spec).unwrap();
        for row in 0..oh {
            for col in 0..ow {
                let expected = match oracle_apply(&hm, col as f64 + 0.5, row as f64 + 0.5) {
                    Some((px, py)) => {
                        let (sx, sy) = ((px - 0.5).round(), (py - 0.5).round());
                        sx >= 0.0 && sy >= 0.0 && sx < 32.0 && sy < 32.0 && m.get(sx as u32, sy as u32)
                    }
                    None => false,
                };
                assert_eq!(out.get(col, row), expected, "case {case} at ({col},{row})");
            }
        }
    }
}

#[test]
fn mask_warp_integer_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = random_mask(&mut rng, 20, 15, 0.4);
    let out = warp_mask(&m, &WarpSpec::new(Transform2D::translation(-3.0, 2.0), 20, 15)).unwrap();
    for y in 0..15i32 {
        for x in 0..20i32 {
            let (sx, sy) = (x - 3, y + 2);
            let expected = sx >= 0 && sy < 15 && m.get(sx as u32, sy as u32);
            assert_eq!(out.get(x as u32, y as u32), expected);
        }
    }
}

// ---- diff ----------------------------------------------------------------

#[test]
fn diff_matches_truth_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..100 {
        let p = rng.random_range(0.05..0.95);
        let a = random_mask(&mut rng, 64, 64, p);
        let b = random_mask(&mut rng, 64, 64, p);
        let ab = diff_masks(&a, &b).unwrap();
        let ba = diff_masks(&b, &a).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let expected = match (a.get(x, y), b.get(x, y)) {
                    (true, false) => ChangeClass::Lost,
                    (true, true) => ChangeClass::Persistent,
                    (false, true) => ChangeClass::New,
                    (false, false) => ChangeClass::None,
                };
                assert_eq!(ab.get(x, y), expected);
            }
        }
        let (c, s) = (ab.counts(), ba.counts());
        assert_eq!(c.total(), 64 * 64);
        assert_eq!((c.lost, c.new, c.persistent, c.none), (s.new, s.lost, s.persistent, s.none));
    }
}

// ---- vectorize -----------------------------------------------------------

fn blob_map(rng: &mut ChaCha8Rng, w: u32, h: u32) -> ChangeMap {
    let classes = [ChangeClass::Lost, ChangeClass::Persistent, ChangeClass::New, ChangeClass::None];
    let mut v = vec![ChangeClass::None; (w * h) as usize];
    for _ in 0..rng.random_range(1..12) {
        let class = classes[rng.random_range(0..4)];
        let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
        let (x1, y1) = ((x0 + rng.random_range(1..15)).min(w), (y0 + rng.random_range(1..15)).min(h));
        for y in y0..y1 {
            for x in x0..x1 {
                v[(y * w + x) as usize] = class;
            }
        }
    }
    for cell in v.iter_mut() {
        if rng.random_bool(0.05) {
            *cell = classes[rng.random_range(0..4)];
        }
    }
    ChangeMap::from_classes(w, h, v).unwrap()
}

#[test]
fn vectorize_matches_component_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let (w, h) = (rng.random_range(1..50), rng.random_range(1..50));
        let c = blob_map(&mut rng, w, h);
        for class in [ChangeClass::Lost, ChangeClass::Persistent, ChangeClass::New] {
            let set: Cells = (0..h as i32)
                .flat_map(|y| (0..w as i32).map(move |x| (x, y)))
                .filter(|&(x, y)| c.get(x as u32, y as u32) == class)
                .collect();
            let mut expected: Vec<usize> = oracle_components(&set).values().map(Vec::len).collect();
            expected.sort();
            let polys = vectorize(&c, class);
            let mut got: Vec<usize> = polys.iter().map(|p| p.area_px as usize).collect();
            got.sort();
            assert_eq!(got, expected);
            for p in &polys {
                assert_eq!(p.ring_area(), p.area_px as f64);
                assert!(p.exterior.len() >= 4);
            }
            let total: f64 = polys.iter().map(|p| p.ring_area()).sum();
            assert_eq!(total as usize, set.len());
        }
    }
}

#[test]
fn vectorize_two_blobs() {
    let mut v = vec![ChangeClass::None; 30 * 20];
    for (x, y) in (2..8).flat_map(|x| (3..9).map(move |y| (x, y))) {
        v[y * 30 + x] = ChangeClass::Lost;
    }
    for (x, y) in (15..27).flat_map(|x| (10..13).map(move |y| (x, y))) {
        v[y * 30 + x] = ChangeClass::Lost;
    }
    let c = ChangeMap::from_classes(30, 20, v).unwrap();
    let polys = vectorize(&c, ChangeClass::Lost);
    let labels = label_components(&WaterMask::new(30, 20, c.mask_of(ChangeClass::Lost)).unwrap());
    assert_eq!(polys.len(), labels.count());
    let areas: Vec<u64> = polys.iter().map(|p| p.area_px).collect();
    assert_eq!(areas, labels.sizes.iter().map(|&s| s as u64).collect::<Vec<_>>());
    assert!(polys.iter().all(|p| p.exterior.len() == 4));
}

// ---- render --------------------------------------------------------------

fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<(i64, i64)> {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    let mut out = vec![(x, y)];
    while (x, y) != (x1, y1) {
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
        out.push((x, y));
    }
    out
}

#[test]
fn underground_stroke_covers_rasterised_polyline() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let violet = RenderStyle::default().underground;
    for _ in 0..30 {
        let mut c = ChangeMap::from_classes(64, 64, vec![ChangeClass::Lost; 64 * 64]).unwrap();
        let n = rng.random_range(2..6);
        let verts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..64.0), rng.random_range(0.0..64.0)))
            .collect();
        c.annotations.push(ManualAnnotation::polyline("u", verts.clone(), AnnotationStatus::Underground));
        let r = render_changemap(&c, &RenderStyle::default());
        for w in verts.windows(2) {
            let line = bresenham(w[0].x as i64, w[0].y as i64, w[1].x as i64, w[1].y as i64);
            for (x, y) in line {
                assert_eq!(r.get(x as u32, y as u32), violet, "({x},{y}) on {w:?}");
            }
        }
        // Far from the line nothing changes.
        for y in 0..64u32 {
            for x in 0..64u32 {
                let p = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                let near = verts.windows(2).any(|w| seg_dist(p, w[0], w[1]) <= 1.5);
                if !near {
                    assert_eq!(r.get(x, y), [255, 0, 0, 255]);
                }
            }
        }
    }
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let l = vx * vx + vy * vy;
    let t = if l > 0.0 { (((p.x - a.x) * vx + (p.y - a.y) * vy) / l).clamp(0.0, 1.0) } else { 0.0 };
    ((p.x - a.x - t * vx).powi(2) + (p.y - a.y - t * vy).powi(2)).sqrt()
}

// ---- invariants ----------------------------------------------------------

fn mask_strategy() -> impl Strategy<Value = WaterMask> {
    (1u32..24, 1u32..24).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), (w * h) as usize)
            .prop_map(move |bits| WaterMask::new(w, h, bits).unwrap())
    })
}

proptest! {
    #[test]
    fn opening_and_closing_are_idempotent(m in mask_strategy(), r in 0u32..3) {
        let o = morphology::open(&m, r);
        prop_assert_eq!(morphology::open(&o, r), o);
        let c = morphology::close(&m, r);
        prop_assert_eq!(morphology::close(&c, r), c);
    }

    #[test]
    fn raising_min_area_never_adds_water(seed in any::<u64>(), a in 1u32..80, extra in 0u32..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = blotchy_raster(&mut rng, 48, 48);
        let lo = extract_water(&r, &odd_cfg(a, 1)).count();
        let hi = extract_water(&r, &odd_cfg(a + extra, 1)).count();
        prop_assert!(hi <= lo);
    }

    #[test]
    fn warped_masks_stay_binary_and_dry_outside(m in mask_strategy(), dx in -30.0f64..30.0, dy in -30.0f64..30.0) {
        let spec = WarpSpec::new(Transform2D::translation(dx, dy), 24, 24);
        let out = warp_mask(&m, &spec).unwrap();
        prop_assert!(out.count() <= 24 * 24);
        prop_assert_eq!(out.bits().len(), 24 * 24);
    }
}
