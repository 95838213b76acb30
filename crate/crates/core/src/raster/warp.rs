use rayon::prelude::*;

use super::{GeoReference, Raster, RasterError, Result, Rgba, TRANSPARENT};
use crate::transform::{Point, Transform2D};

pub const DEFAULT_SAMPLES_PER_EDGE: usize = 16;

/// Output grid for an inverse-mapping warp.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpSpec {
    /// Maps output-frame pixel coordinates to source pixel coordinates.
    pub backward: Transform2D,
    pub out_width: u32,
    pub out_height: u32,
    /// Output-frame coordinate of the output raster's top-left corner.
    pub origin: Point,
    pub out_georef: Option<GeoReference>,
    pub fill: Rgba,
}

impl WarpSpec {
    pub fn new(backward: Transform2D, out_width: u32, out_height: u32) -> Self {
        WarpSpec {
            backward,
            out_width,
            out_height,
            origin: Point::default(),
            out_georef: None,
            fill: TRANSPARENT,
        }
    }

    pub fn with_origin(mut self, origin: Point) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_georef(mut self, georef: Option<GeoReference>) -> Self {
        self.out_georef = georef;
        self
    }

    pub fn with_fill(mut self, fill: Rgba) -> Self {
        self.fill = fill;
        self
    }

    /// Source position sampled by output pixel `(col, row)`, if it has one.
    pub(crate) fn source_position(&self, col: u32, row: u32) -> Option<Point> {
        let q = Point::new(
            self.origin.x + col as f64 + 0.5,
            self.origin.y + row as f64 + 0.5,
        );
        self.backward.apply(q).ok().filter(|p| p.is_finite())
    }
}

fn inside(p: Point, width: u32, height: u32) -> bool {
    p.x >= 0.0 && p.y >= 0.0 && p.x < width as f64 && p.y < height as f64
}

/// Bilinear sample at continuous position `p`, which must lie inside the
/// source footprint. Neighbours beyond the border are clamped to the edge.
fn bilinear(src: &Raster, p: Point) -> Rgba {
    let (w, h) = (src.width() as i64, src.height() as i64);
    let fx = p.x - 0.5;
    let fy = p.y - 0.5;
    let x0 = fx.floor();
    let y0 = fy.floor();
    let dx = fx - x0;
    let dy = fy - y0;
    let cx = |x: i64| x.clamp(0, w - 1) as u32;
    let cy = |y: i64| y.clamp(0, h - 1) as u32;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let p00 = src.get(cx(x0), cy(y0));
    let p10 = src.get(cx(x0 + 1), cy(y0));
    let p01 = src.get(cx(x0), cy(y0 + 1));
    let p11 = src.get(cx(x0 + 1), cy(y0 + 1));
    let w00 = (1.0 - dx) * (1.0 - dy);
    let w10 = dx * (1.0 - dy);
    let w01 = (1.0 - dx) * dy;
    let w11 = dx * dy;
    std::array::from_fn(|k| {
        let v = w00 * p00[k] as f64 + w10 * p10[k] as f64 + w01 * p01[k] as f64 + w11 * p11[k] as f64;
        (v + 0.5).floor().clamp(0.0, 255.0) as u8
    })
}

/// Inverse-mapping warp with bilinear resampling.
///
/// Every output pixel centre is pulled back through `spec.backward`; positions
/// outside the source footprint (or at infinity) take `spec.fill`. Rows are
/// processed in parallel; the result does not depend on scheduling.
pub fn warp(src: &Raster, spec: &WarpSpec) -> Result<Raster> {
    if spec.out_width == 0 || spec.out_height == 0 {
        return Err(RasterError::EmptyOutput);
    }
    let row_len = spec.out_width as usize * 4;
    let mut pixels = vec![0u8; row_len * spec.out_height as usize];
    pixels
        .par_chunks_mut(row_len)
        .enumerate()
        .for_each(|(row, out)| {
            for col in 0..spec.out_width {
                let color = match spec.source_position(col, row as u32) {
                    Some(p) if !src.is_empty() && inside(p, src.width(), src.height()) => {
                        bilinear(src, p)
                    }
                    _ => spec.fill,
                };
                let i = col as usize * 4;
                out[i..i + 4].copy_from_slice(&color);
            }
        });
    Ok(Raster::new(spec.out_width, spec.out_height, pixels)?.with_georef(spec.out_georef))
}

/// Axis-aligned box in destination pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// Integer pixel grid covering the box: `(origin, width, height)`.
    pub fn pixel_grid(&self) -> (Point, u32, u32) {
        let x0 = self.min_x.floor();
        let y0 = self.min_y.floor();
        let w = (self.max_x.ceil() - x0).max(0.0) as u32;
        let h = (self.max_y.ceil() - y0).max(0.0) as u32;
        (Point::new(x0, y0), w, h)
    }
}

/// Bounding box of the forward image of a `src_w × src_h` raster, sampling
/// `samples_per_edge` points along each edge (corners included), grown by
/// one pixel on every side.
pub fn compute_output_extent(
    forward: &Transform2D,
    src_w: u32,
    src_h: u32,
    samples_per_edge: usize,
) -> Result<BoundingBox> {
    if samples_per_edge < 2 {
        return Err(RasterError::InvalidRaster(format!(
            "samples_per_edge must be at least 2, got {samples_per_edge}"
        )));
    }
    let (w, h) = (src_w as f64, src_h as f64);
    let mut bb = BoundingBox {
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        max_y: f64::NEG_INFINITY,
    };
    let last = (samples_per_edge - 1) as f64;
    for i in 0..samples_per_edge {
        let t = i as f64 / last;
        for p in [
            Point::new(t * w, 0.0),
            Point::new(t * w, h),
            Point::new(0.0, t * h),
            Point::new(w, t * h),
        ] {
            let q = forward.apply(p)?;
            bb.min_x = bb.min_x.min(q.x);
            bb.min_y = bb.min_y.min(q.y);
            bb.max_x = bb.max_x.max(q.x);
            bb.max_y = bb.max_y.max(q.y);
        }
    }
    bb.min_x -= 1.0;
    bb.min_y -= 1.0;
    bb.max_x += 1.0;
    bb.max_y += 1.0;
    Ok(bb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{Polynomial2Transform, ProjectiveTransform, TransformError};

    fn gradient(w: u32, h: u32) -> Raster {
        Raster::from_fn(w, h, |c, r| [(c * 7 % 256) as u8, (r * 5 % 256) as u8, ((c + r) % 256) as u8, 255])
    }

    #[test]
    fn identity_warp_is_byte_identical() {
        let src = gradient(37, 23);
        let out = warp(&src, &WarpSpec::new(Transform2D::identity(), 37, 23)).unwrap();
        assert_eq!(out, src);
    }

    #[test]
    fn one_pixel_source_outside_gives_fill() {
        let src = Raster::filled(1, 1, [10, 20, 30, 255]);
        let spec = WarpSpec::new(Transform2D::translation(50.0, 50.0), 8, 8).with_fill([1, 2, 3, 4]);
        let out = warp(&src, &spec).unwrap();
        assert!(out.pixels().chunks(4).all(|p| p == [1, 2, 3, 4]));
    }

    #[test]
    fn zero_area_output_is_an_error() {
        let src = gradient(4, 4);
        assert!(matches!(
            warp(&src, &WarpSpec::new(Transform2D::identity(), 0, 4)),
            Err(RasterError::EmptyOutput)
        ));
    }

    #[test]
    fn half_pixel_shift_averages_neighbours() {
        let src = Raster::from_fn(2, 1, |c, _| if c == 0 { [0, 0, 0, 255] } else { [100, 100, 100, 255] });
        let spec = WarpSpec::new(Transform2D::translation(0.5, 0.0), 1, 1);
        assert_eq!(warp(&src, &spec).unwrap().get(0, 0), [50, 50, 50, 255]);
    }

    #[test]
    fn horizon_pixels_take_fill() {
        let src = gradient(10, 10);
        let t = Transform2D::Projective(ProjectiveTransform {
            h: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-0.2, 0.0, 1.0]],
        });
        let out = warp(&src, &WarpSpec::new(t, 10, 1)).unwrap();
        // horizon at x = 5; columns past it land at negative x
        assert_eq!(out.get(9, 0), TRANSPARENT);
    }

    #[test]
    fn extent_of_identity_and_translation() {
        let bb = compute_output_extent(&Transform2D::identity(), 100, 50, 16).unwrap();
        assert_eq!((bb.min_x, bb.max_x, bb.min_y, bb.max_y), (-1.0, 101.0, -1.0, 51.0));
        let bb = compute_output_extent(&Transform2D::translation(5.0, 7.0), 100, 50, 16).unwrap();
        assert_eq!((bb.min_x, bb.max_x, bb.min_y, bb.max_y), (4.0, 106.0, 6.0, 58.0));
    }

    #[test]
    fn extent_of_square_map_needs_edge_samples() {
        let sq = Transform2D::Polynomial2(Polynomial2Transform {
            cx: [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            cy: [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        });
        let bb = compute_output_extent(&sq, 10, 10, 16).unwrap();
        assert_eq!(bb.max_x, 101.0);
        assert_eq!(bb.min_x, -1.0);
    }

    #[test]
    fn extent_requires_two_samples_and_finite_images() {
        assert!(compute_output_extent(&Transform2D::identity(), 4, 4, 1).is_err());
        let t = Transform2D::Projective(ProjectiveTransform {
            h: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-0.25, 0.0, 1.0]],
        });
        assert!(matches!(
            compute_output_extent(&t, 8, 8, 3),
            Err(RasterError::Transform(TransformError::AtInfinity))
        ));
    }

    #[test]
    fn pixel_grid_covers_box() {
        let bb = BoundingBox { min_x: -1.5, min_y: 2.2, max_x: 10.1, max_y: 7.0 };
        let (o, w, h) = bb.pixel_grid();
        assert_eq!((o.x, o.y, w, h), (-2.0, 2.0, 13, 5));
    }
}
