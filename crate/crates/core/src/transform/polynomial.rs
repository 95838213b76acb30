use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::normalize::Conditioner;
use super::{enabled_pairs, ControlPointPair, Point, Result, TransformError, DEGENERACY_RATIO};

/// Per-axis quadratic mapping with terms ordered `[1, x, y, x², x·y, y²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polynomial2Transform {
    pub cx: [f64; 6],
    pub cy: [f64; 6],
}

fn terms(x: f64, y: f64) -> [f64; 6] {
    [1.0, x, y, x * x, x * y, y * y]
}

fn dot(c: &[f64; 6], t: &[f64; 6]) -> f64 {
    c.iter().zip(t).map(|(a, b)| a * b).sum()
}

impl Polynomial2Transform {
    pub fn identity() -> Self {
        Polynomial2Transform {
            cx: [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            cy: [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let t = terms(p.x, p.y);
        Point::new(dot(&self.cx, &t), dot(&self.cy, &t))
    }
}

/// Rewrites coefficients fitted on `(u, v) = (s·x + a, s·y + b)` in terms of raw `(x, y)`.
fn expand(k: &[f64; 6], s: f64, a: f64, b: f64) -> [f64; 6] {
    [
        k[0] + k[1] * a + k[2] * b + k[3] * a * a + k[4] * a * b + k[5] * b * b,
        s * (k[1] + 2.0 * k[3] * a + k[4] * b),
        s * (k[2] + k[4] * a + 2.0 * k[5] * b),
        s * s * k[3],
        s * s * k[4],
        s * s * k[5],
    ]
}

/// Least-squares quadratic mapping from at least six enabled control points.
///
/// Source coordinates are conditioned before building the n×6 design matrix;
/// both axes are solved from one SVD of that matrix.
pub fn fit_polynomial2(gcps: &[ControlPointPair]) -> Result<Polynomial2Transform> {
    let (src, dst) = enabled_pairs(gcps)?;
    let n = src.len();
    if n < 6 {
        return Err(TransformError::InsufficientPoints { needed: 6, got: n });
    }
    let cond = Conditioner::from_points(&src);
    let mean_x = dst.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let mean_y = dst.iter().map(|p| p.y).sum::<f64>() / n as f64;

    let mut design = DMatrix::<f64>::zeros(n, 6);
    let mut rhs = DMatrix::<f64>::zeros(n, 2);
    for (k, (s, d)) in src.iter().zip(&dst).enumerate() {
        let q = cond.apply(*s);
        for (j, t) in terms(q.x, q.y).into_iter().enumerate() {
            design[(k, j)] = t;
        }
        rhs[(k, 0)] = d.x - mean_x;
        rhs[(k, 1)] = d.y - mean_y;
    }

    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let (lo, hi) = sv
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > 0.0) || lo / hi < DEGENERACY_RATIO {
        return Err(TransformError::DegenerateConfiguration);
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|_| TransformError::DegenerateConfiguration)?;

    let a = -cond.scale * cond.cx;
    let b = -cond.scale * cond.cy;
    let column = |c: usize, mean: f64| {
        let mut k = [0.0; 6];
        for (j, v) in k.iter_mut().enumerate() {
            *v = sol[(j, c)];
        }
        k[0] += mean;
        expand(&k, cond.scale, a, b)
    };
    Ok(Polynomial2Transform {
        cx: column(0, mean_x),
        cy: column(1, mean_y),
    })
}
