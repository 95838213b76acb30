use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::normalize::Conditioner;
use super::{
    enabled_pairs, ControlPointPair, Point, Result, TransformError, DEGENERACY_RATIO,
    MIN_DENOMINATOR, MIN_DETERMINANT,
};

/// Homography stored row-major with `h[2][2] == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveTransform {
    pub h: [[f64; 3]; 3],
}

impl ProjectiveTransform {
    pub fn identity() -> Self {
        ProjectiveTransform {
            h: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        ProjectiveTransform {
            h: [[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]],
        }
    }

    /// Normalizes `m` to `h22 = 1` and checks invertibility.
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        let s = m[(2, 2)];
        if !s.is_finite() || s.abs() < f64::MIN_POSITIVE || m.iter().any(|v| !v.is_finite()) {
            return Err(TransformError::NonInvertible);
        }
        let m = m / s;
        if !(m.determinant().abs() > MIN_DETERMINANT) {
            return Err(TransformError::NonInvertible);
        }
        let mut h = [[0.0; 3]; 3];
        for (r, row) in h.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m[(r, c)];
            }
        }
        h[2][2] = 1.0;
        Ok(ProjectiveTransform { h })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let h = &self.h;
        Matrix3::new(
            h[0][0], h[0][1], h[0][2], h[1][0], h[1][1], h[1][2], h[2][0], h[2][1], h[2][2],
        )
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        let h = &self.h;
        let w = h[2][0] * p.x + h[2][1] * p.y + h[2][2];
        if !(w.abs() > MIN_DENOMINATOR) {
            return Err(TransformError::AtInfinity);
        }
        Ok(Point::new(
            (h[0][0] * p.x + h[0][1] * p.y + h[0][2]) / w,
            (h[1][0] * p.x + h[1][1] * p.y + h[1][2]) / w,
        ))
    }

    pub fn inverse(&self) -> Result<Self> {
        invert_projective(self)
    }
}

pub fn invert_projective(t: &ProjectiveTransform) -> Result<ProjectiveTransform> {
    let inv = t
        .matrix()
        .try_inverse()
        .ok_or(TransformError::NonInvertible)?;
    ProjectiveTransform::from_matrix(&inv)
}

/// Least-squares homography from at least four enabled control points.
///
/// Both point sets are conditioned (centroid to origin, RMS radius √2), the
/// 2n×9 DLT system is solved for its smallest right singular vector, and the
/// result is mapped back to pixel units.
pub fn fit_projective(gcps: &[ControlPointPair]) -> Result<ProjectiveTransform> {
    let (src, dst) = enabled_pairs(gcps)?;
    let n = src.len();
    if n < 4 {
        return Err(TransformError::InsufficientPoints { needed: 4, got: n });
    }
    let cs = Conditioner::from_points(&src);
    let cd = Conditioner::from_points(&dst);

    // Padded with zero rows to 9 so the thin SVD still exposes the null vector.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (s, d)) in src.iter().zip(&dst).enumerate() {
        let Point { x, y } = cs.apply(*s);
        let Point { x: u, y: v } = cd.apply(*d);
        let r0 = 2 * k;
        let r1 = r0 + 1;
        a[(r0, 0)] = -x;
        a[(r0, 1)] = -y;
        a[(r0, 2)] = -1.0;
        a[(r0, 6)] = u * x;
        a[(r0, 7)] = u * y;
        a[(r0, 8)] = u;
        a[(r1, 3)] = -x;
        a[(r1, 4)] = -y;
        a[(r1, 5)] = -1.0;
        a[(r1, 6)] = v * x;
        a[(r1, 7)] = v * y;
        a[(r1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().ok_or(TransformError::DegenerateConfiguration)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv = |k: usize| svd.singular_values[order[k]];
    if !(sv(0) > 0.0) || sv(7) / sv(0) < DEGENERACY_RATIO {
        return Err(TransformError::DegenerateConfiguration);
    }
    let null = v_t.row(order[8]);
    let hn = Matrix3::from_row_slice(&[
        null[0], null[1], null[2], null[3], null[4], null[5], null[6], null[7], null[8],
    ]);
    let h = cd.inverse_matrix() * hn * cs.matrix();
    ProjectiveTransform::from_matrix(&h)
}
