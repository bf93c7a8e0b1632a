use std::collections::VecDeque;

use super::bbox::BoundingBox;

/// Default merge distance between fragments of the same crack, in pixels.
pub const DEFAULT_MERGE_DISTANCE: u32 = 5;

/// Per-pixel crack id, row-major; 0 is background.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdBuffer {
    width: u32,
    height: u32,
    data: Vec<u32>,
}

impl IdBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0; width as usize * height as usize],
        }
    }

    /// Wraps row-major data. Panics if the length does not match.
    pub fn from_vec(width: u32, height: u32, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize, "id buffer size");
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, id: u32) {
        self.data[y as usize * self.width as usize + x as usize] = id;
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// Pixel count per crack id, ascending by id.
    pub fn id_histogram(&self) -> Vec<(u32, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &v in &self.data {
            if v != 0 {
                *counts.entry(v).or_insert(0usize) += 1;
            }
        }
        counts.into_iter().collect()
    }
}

/// A box together with the crack id it was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledBox {
    pub id: u32,
    pub bbox: BoundingBox,
}

/// Gap in pixels between two boxes along the worse axis; 0 when they touch or overlap.
fn gap(a: &BoundingBox, b: &BoundingBox) -> u32 {
    let gx = b.xmin.saturating_sub(a.xmax).max(a.xmin.saturating_sub(b.xmax));
    let gy = b.ymin.saturating_sub(a.ymax).max(a.ymin.saturating_sub(b.ymax));
    gx.max(gy)
}

fn union_box(a: &BoundingBox, b: &BoundingBox) -> BoundingBox {
    BoundingBox::new(
        a.xmin.min(b.xmin),
        a.ymin.min(b.ymin),
        a.xmax.max(b.xmax),
        a.ymax.max(b.ymax),
    )
}

/// 8-connected components per crack id, merged while any two boxes of the
/// same id are at most `merge_distance` pixels apart.
pub fn mask_to_labeled_boxes(ids: &IdBuffer, merge_distance: u32) -> Vec<LabeledBox> {
    let (w, h) = (ids.width as i64, ids.height as i64);
    let mut seen = vec![false; ids.data.len()];
    let mut comps: Vec<LabeledBox> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..ids.data.len() {
        let id = ids.data[start];
        if id == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
        while let Some(p) = queue.pop_front() {
            let x = (p as i64 % w) as u32;
            let y = (p as i64 / w) as u32;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x + 1);
            y1 = y1.max(y + 1);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let q = (ny * w + nx) as usize;
                    if !seen[q] && ids.data[q] == id {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        comps.push(LabeledBox {
            id,
            bbox: BoundingBox::new(x0, y0, x1, y1),
        });
    }

    // merge to a fixpoint; merged boxes may come within reach of others
    let mut merged = true;
    while merged {
        merged = false;
        'outer: for i in 0..comps.len() {
            for j in i + 1..comps.len() {
                if comps[i].id == comps[j].id && gap(&comps[i].bbox, &comps[j].bbox) <= merge_distance {
                    let b = comps.swap_remove(j);
                    comps[i].bbox = union_box(&comps[i].bbox, &b.bbox);
                    merged = true;
                    break 'outer;
                }
            }
        }
    }
    comps.sort_by_key(|c| (c.id, c.bbox.ymin, c.bbox.xmin, c.bbox.ymax, c.bbox.xmax));
    comps
}

/// Crack boxes for an id buffer, see [`mask_to_labeled_boxes`].
pub fn mask_to_boxes(ids: &IdBuffer, merge_distance: u32) -> Vec<BoundingBox> {
    mask_to_labeled_boxes(ids, merge_distance)
        .into_iter()
        .map(|c| c.bbox)
        .collect()
}
