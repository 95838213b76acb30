//! Synthetic transforms and control points shared by the integration tests.
#![allow(dead_code)]

use lostwater_core::transform::{ControlPointPair, Point, Polynomial2Transform, ProjectiveTransform};
use rand::Rng;

pub const DOMAIN: f64 = 1000.0;

/// Random homography that stays well away from its horizon over `[0, DOMAIN]²`.
pub fn random_homography<R: Rng>(rng: &mut R) -> ProjectiveTransform {
    let theta: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let scale: f64 = rng.random_range(0.5..2.0);
    let aniso: f64 = rng.random_range(0.8..1.25);
    let shear: f64 = rng.random_range(-0.2..0.2);
    let (s, c) = theta.sin_cos();
    let a = [
        [scale * aniso * c, scale * (shear * c - s)],
        [scale * aniso * s, scale * (shear * s + c)],
    ];
    let g = 2e-4;
    ProjectiveTransform {
        h: [
            [a[0][0], a[0][1], rng.random_range(-500.0..500.0)],
            [a[1][0], a[1][1], rng.random_range(-500.0..500.0)],
            [rng.random_range(-g..g), rng.random_range(-g..g), 1.0],
        ],
    }
}

fn tri_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs()
}

/// `n` random source points in the domain; for n == 4 no three are near collinear.
pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    loop {
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(0.0..DOMAIN), rng.random_range(0.0..DOMAIN)))
            .collect();
        if n != 4 {
            return pts;
        }
        let min_area = 0.02 * DOMAIN * DOMAIN;
        let ok = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
            .iter()
            .all(|&(i, j, k)| tri_area(pts[i], pts[j], pts[k]) > min_area);
        if ok {
            return pts;
        }
    }
}

pub fn gcps_through(
    pts: &[Point],
    f: impl Fn(Point) -> Point,
) -> Vec<ControlPointPair> {
    pts.iter()
        .enumerate()
        .map(|(i, &p)| ControlPointPair::new(format!("gcp{i}"), p, f(p)))
        .collect()
}

/// Quadratic coefficients whose every term moves points by a comparable amount
/// over the domain, with no coefficient close to zero.
pub fn random_quadratic<R: Rng>(rng: &mut R) -> Polynomial2Transform {
    fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
        let m = rng.random_range(lo..hi);
        if rng.random_bool(0.5) {
            m
        } else {
            -m
        }
    }
    let mut coeffs = |lin_x: f64, lin_y: f64| {
        [
            signed(rng, 5.0, 300.0),
            lin_x + signed(rng, 0.01, 0.3),
            lin_y + signed(rng, 0.01, 0.3),
            signed(rng, 1e-5, 2e-4),
            signed(rng, 1e-5, 2e-4),
            signed(rng, 1e-5, 2e-4),
        ]
    };
    let cx = coeffs(1.0, 0.0);
    let cy = coeffs(0.0, 1.0);
    Polynomial2Transform { cx, cy }
}
