use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Heatmap, InferenceConfig, PixelMap};
use crate::model::Point2D;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize) {
        self.bits[row * self.width + col] = true;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Binarizes both channels. A pixel joins a mask only when its channel
/// reaches `threshold` and strictly exceeds the other channel.
pub fn threshold_heatmap(h: &Heatmap, threshold: f64) -> (Mask, Mask) {
    let mut add = Mask::new(h.width, h.height);
    let mut remove = Mask::new(h.width, h.height);
    for (i, (&a, &r)) in h.add_intensity.iter().zip(&h.remove_intensity).enumerate() {
        if a >= threshold && a > r {
            add.bits[i] = true;
        } else if r >= threshold && r > a {
            remove.bits[i] = true;
        }
    }
    (add, remove)
}

/// A 4-connected set of mask pixels, as (col, row).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelComponent {
    pub pixels: Vec<(usize, usize)>,
    /// (min_col, min_row, max_col, max_row), inclusive.
    pub bbox: (usize, usize, usize, usize),
}

impl PixelComponent {
    /// Mean pixel-centre position.
    pub fn centroid_px(&self) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let (sc, sr) = self.pixels.iter().fold((0.0, 0.0), |(a, b), &(c, r)| (a + c as f64, b + r as f64));
        (sc / n + 0.5, sr / n + 0.5)
    }

    fn sort_key(&self) -> (std::cmp::Reverse<usize>, usize, usize) {
        (std::cmp::Reverse(self.pixels.len()), self.bbox.1, self.bbox.0)
    }
}

/// 4-connected components with at least `min_pixels` pixels, largest first,
/// ties broken by the (row, col) of the bounding box's top-left corner.
pub fn connected_components(mask: &Mask, min_pixels: usize) -> Vec<PixelComponent> {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        let mut bbox = (usize::MAX, usize::MAX, 0, 0);
        while let Some(i) = queue.pop_front() {
            let (c, r) = (i % w, i / w);
            pixels.push((c, r));
            bbox = (bbox.0.min(c), bbox.1.min(r), bbox.2.max(c), bbox.3.max(r));
            let mut visit = |j: usize| {
                if mask.bits[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
        }
        if pixels.len() >= min_pixels {
            pixels.sort_by_key(|&(c, r)| (r, c));
            out.push(PixelComponent { pixels, bbox });
        }
    }
    out.sort_by_key(|c| c.sort_key());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    pub id: usize,
    pub polarity: Polarity,
    pub component: PixelComponent,
    pub centroid_px: (f64, f64),
    pub centroid: Point2D,
    pub mean_intensity: f64,
}

impl Blob {
    pub fn pixel_count(&self) -> usize {
        self.component.pixels.len()
    }

    pub fn contains_px(&self, col: usize, row: usize) -> bool {
        self.component.pixels.binary_search_by_key(&(row, col), |&(c, r)| (r, c)).is_ok()
    }
}

/// Thresholds `h` and returns blobs of both polarities in inference order.
pub fn extract_blobs(h: &Heatmap, map: &PixelMap, cfg: &InferenceConfig) -> Vec<Blob> {
    let (add, remove) = threshold_heatmap(h, cfg.threshold);
    let mut tagged: Vec<(Polarity, PixelComponent)> = connected_components(&add, cfg.min_blob_pixels)
        .into_iter()
        .map(|c| (Polarity::Add, c))
        .chain(connected_components(&remove, cfg.min_blob_pixels).into_iter().map(|c| (Polarity::Remove, c)))
        .collect();
    tagged.sort_by_key(|(p, c)| (c.sort_key(), *p == Polarity::Remove));
    tagged
        .into_iter()
        .enumerate()
        .map(|(id, (polarity, component))| {
            let channel = match polarity {
                Polarity::Add => &h.add_intensity,
                Polarity::Remove => &h.remove_intensity,
            };
            let mean_intensity = component.pixels.iter().map(|&(c, r)| channel[r * h.width + c]).sum::<f64>()
                / component.pixels.len() as f64;
            let centroid_px = component.centroid_px();
            Blob {
                id,
                polarity,
                centroid: map.to_world(centroid_px.0, centroid_px.1),
                centroid_px,
                component,
                mean_intensity,
            }
        })
        .collect()
}
