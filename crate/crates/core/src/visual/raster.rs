use serde::{Deserialize, Serialize};

use super::{member_pixels, member_width_px, point_segment_distance, PixelMap, NODE_RADIUS_PX};
use crate::model::{Scenario, TrussDesign};

/// Row-major grayscale image with intensities in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self { width, height, pixels: vec![value; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: f64) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Sets every pixel whose centre lies within `radius` of segment `a`-`b`.
    pub fn stamp_segment(&mut self, a: (f64, f64), b: (f64, f64), radius: f64, value: f64) {
        for_each_pixel_near(self.width, self.height, a, b, radius, |c, r| self.set(c, r, value));
    }

    pub fn stamp_disc(&mut self, centre: (f64, f64), radius: f64, value: f64) {
        self.stamp_segment(centre, centre, radius, value);
    }
}

/// Visits pixels whose centre lies within `radius` of the segment `a`-`b`.
pub(crate) fn for_each_pixel_near(
    width: usize,
    height: usize,
    a: (f64, f64),
    b: (f64, f64),
    radius: f64,
    mut visit: impl FnMut(usize, usize),
) {
    let clamp = |v: f64, hi: usize| v.floor().clamp(0.0, hi as f64) as usize;
    let c0 = clamp(a.0.min(b.0) - radius - 1.0, width);
    let c1 = clamp(a.0.max(b.0) + radius + 1.0, width);
    let r0 = clamp(a.1.min(b.1) - radius - 1.0, height);
    let r1 = clamp(a.1.max(b.1) + radius + 1.0, height);
    for r in r0..r1 {
        for c in c0..c1 {
            let centre = (c as f64 + 0.5, r as f64 + 0.5);
            if point_segment_distance(centre, a, b) <= radius {
                visit(c, r);
            }
        }
    }
}

/// Two-channel add/remove prediction over the design raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub add_intensity: Vec<f64>,
    pub remove_intensity: Vec<f64>,
}

impl Heatmap {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, add_intensity: vec![0.0; width * height], remove_intensity: vec![0.0; width * height] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn is_empty(&self) -> bool {
        self.add_intensity.iter().chain(&self.remove_intensity).all(|&v| v == 0.0)
    }

    /// `base` with add pixels pushed toward 1 and remove pixels toward 0.
    pub fn composite(&self, base: &Raster) -> Raster {
        let pixels = base
            .pixels
            .iter()
            .zip(self.add_intensity.iter().zip(&self.remove_intensity))
            .map(|(&v, (&add, &rem))| {
                let lifted = v + add * (1.0 - v);
                lifted * (1.0 - rem)
            })
            .collect();
        Raster { width: base.width, height: base.height, pixels }
    }
}

/// Deterministic, alias-free drawing of `design` at `resolution` squared.
pub fn render(design: &TrussDesign, scenario: &Scenario, resolution: usize) -> Raster {
    let map = PixelMap::square(scenario.bounds, resolution);
    render_with(design, &map)
}

pub(crate) fn render_with(design: &TrussDesign, map: &PixelMap) -> Raster {
    let mut raster = Raster::new(map.width, map.height);
    for m in &design.members {
        if let Some((a, b)) = member_pixels(design, m, map) {
            raster.stamp_segment(a, b, 0.5 * member_width_px(m.size_index), 1.0);
        }
    }
    for n in &design.nodes {
        raster.stamp_disc(map.to_pixel(&n.pos), NODE_RADIUS_PX, 1.0);
    }
    raster
}
