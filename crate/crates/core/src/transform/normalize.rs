use nalgebra::Matrix3;

use super::Point;

/// Similarity that moves the centroid to the origin and scales the RMS
/// distance from it to √2.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Conditioner {
    pub cx: f64,
    pub cy: f64,
    pub scale: f64,
}

impl Conditioner {
    pub fn from_points(pts: &[Point]) -> Self {
        let n = pts.len().max(1) as f64;
        let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
        let ms = pts
            .iter()
            .map(|p| (p.x - cx).powi(2) + (p.y - cy).powi(2))
            .sum::<f64>()
            / n;
        // All points coincident: keep unit scale and let the rank test reject it.
        let scale = if ms > 0.0 {
            std::f64::consts::SQRT_2 / ms.sqrt()
        } else {
            1.0
        };
        Conditioner { cx, cy, scale }
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(self.scale * (p.x - self.cx), self.scale * (p.y - self.cy))
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let s = self.scale;
        Matrix3::new(s, 0.0, -s * self.cx, 0.0, s, -s * self.cy, 0.0, 0.0, 1.0)
    }

    pub fn inverse_matrix(&self) -> Matrix3<f64> {
        let inv = 1.0 / self.scale;
        Matrix3::new(inv, 0.0, self.cx, 0.0, inv, self.cy, 0.0, 0.0, 1.0)
    }
}
