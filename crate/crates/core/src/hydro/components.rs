//! 8-connected component labelling.

use super::WaterMask;

/// Component labels (0 = background, 1.. = components in raster-scan order of
/// first pixel) and the pixel count of each component, indexed by `label - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, col: u32, row: u32) -> u32 {
        self.labels[row as usize * self.width as usize + col as usize]
    }
}

pub(crate) const NEIGHBOURS_8: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Labels the `true` cells of a row-major `width × height` grid.
pub fn label_grid(width: u32, height: u32, set: &[bool]) -> Components {
    let (w, h) = (width as i32, height as i32);
    let mut labels = vec![0u32; set.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..set.len() {
        if !set[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32 + 1;
        let mut size = 0usize;
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = ((i as i32) % w, (i as i32) / w);
            for (dx, dy) in NEIGHBOURS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if set[j] && labels[j] == 0 {
                    labels[j] = label;
                    stack.push(j);
                }
            }
        }
        sizes.push(size);
    }
    Components {
        width,
        height,
        labels,
        sizes,
    }
}

pub fn label_components(m: &WaterMask) -> Components {
    label_grid(m.width(), m.height(), m.bits())
}

/// Drops components with fewer than `min_area` pixels.
pub fn remove_small_components(m: &WaterMask, min_area: u32) -> WaterMask {
    let comps = label_components(m);
    let mut out = m.clone();
    for (bit, &label) in out.bits_mut().iter_mut().zip(&comps.labels) {
        if label != 0 && comps.sizes[label as usize - 1] < min_area as usize {
            *bit = false;
        }
    }
    out
}
