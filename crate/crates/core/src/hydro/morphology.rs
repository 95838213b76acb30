//! Binary morphology with a digital disk.
//!
//! Erosion and dilation only consult in-bounds neighbours, which makes them
//! an adjoint pair on the finite grid; opening and closing built from them are
//! therefore idempotent.

use super::WaterMask;

/// Offsets `(dx, dy)` with `dx² + dy² ≤ r²`. Radius 1 is the 3×3 cross.
pub fn disk(radius: u32) -> Vec<(i32, i32)> {
    let r = radius as i32;
    let mut se = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                se.push((dx, dy));
            }
        }
    }
    se
}

fn apply(m: &WaterMask, se: &[(i32, i32)], erode: bool) -> WaterMask {
    let (w, h) = (m.width() as i32, m.height() as i32);
    let src = m.bits();
    let mut out = m.clone();
    let dst = out.bits_mut();
    for y in 0..h {
        for x in 0..w {
            let mut acc = erode;
            for &(dx, dy) in se {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let v = src[(ny * w + nx) as usize];
                if erode && !v {
                    acc = false;
                    break;
                }
                if !erode && v {
                    acc = true;
                    break;
                }
            }
            dst[(y * w + x) as usize] = acc;
        }
    }
    out
}

pub fn erode(m: &WaterMask, radius: u32) -> WaterMask {
    apply(m, &disk(radius), true)
}

pub fn dilate(m: &WaterMask, radius: u32) -> WaterMask {
    apply(m, &disk(radius), false)
}

pub fn open(m: &WaterMask, radius: u32) -> WaterMask {
    dilate(&erode(m, radius), radius)
}

pub fn close(m: &WaterMask, radius: u32) -> WaterMask {
    erode(&dilate(m, radius), radius)
}
