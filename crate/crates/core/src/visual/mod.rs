//! Raster view of design states and the heatmap-to-action inference rules.

mod blobs;
mod infer;
mod pgm;
mod raster;
mod ssim;
mod synth;

pub use blobs::{connected_components, extract_blobs, threshold_heatmap, Blob, Mask, PixelComponent, Polarity};
pub use infer::{infer_candidates, infer_raw};
pub(crate) use infer::finalize;
pub use pgm::{read_heatmap, read_pgm, write_heatmap, write_pgm, FileSuggester};
pub use raster::{render, Heatmap, Raster};
pub(crate) use raster::render_with;
pub use ssim::ssim;
pub use synth::{synth_heatmap, HeatmapSuggester, SynthConfig, SyntheticSuggester};

use serde::{Deserialize, Serialize};

use crate::model::{Member, Point2D, Rect, TrussDesign};

/// Rendered node disc radius in pixels.
pub const NODE_RADIUS_PX: f64 = 3.0;

/// Constants of the rasterization and inference rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceConfig {
    pub resolution: usize,
    pub threshold: f64,
    pub min_blob_pixels: usize,
    pub snap_px: f64,
    pub aspect_threshold: f64,
    pub connect_nearest: usize,
    pub max_candidates: usize,
    /// Extra pixels around a member's drawn width counted as its stripe.
    pub stripe_halo_px: f64,
    /// World grid (m) that inferred node positions snap to.
    pub grid_snap: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            resolution: 128,
            threshold: 0.5,
            min_blob_pixels: 4,
            snap_px: 5.0,
            aspect_threshold: 3.0,
            connect_nearest: 2,
            max_candidates: 16,
            stripe_halo_px: 0.5,
            grid_snap: 0.1,
        }
    }
}

/// Fixed affine map between world coordinates and pixel coordinates.
///
/// Uniform scale, bounds centred with a 4 px margin, y axis flipped so row 0
/// is the top of the construction space. Pixel `(c, r)` has its centre at
/// `(c + 0.5, r + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelMap {
    pub width: usize,
    pub height: usize,
    scale: f64,
    offset_x: f64,
    offset_y: f64,
    bounds: Rect,
}

const MARGIN_PX: f64 = 4.0;

impl PixelMap {
    pub fn new(bounds: Rect, width: usize, height: usize) -> Self {
        let (w, h) = (width as f64, height as f64);
        let scale = ((w - 2.0 * MARGIN_PX) / bounds.width()).min((h - 2.0 * MARGIN_PX) / bounds.height());
        Self {
            width,
            height,
            scale,
            offset_x: 0.5 * (w - scale * bounds.width()),
            offset_y: 0.5 * (h - scale * bounds.height()),
            bounds,
        }
    }

    pub fn square(bounds: Rect, resolution: usize) -> Self {
        Self::new(bounds, resolution, resolution)
    }

    /// Pixels per metre.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn to_pixel(&self, p: &Point2D) -> (f64, f64) {
        (
            self.offset_x + self.scale * (p.x - self.bounds.min.x),
            self.offset_y + self.scale * (self.bounds.max.y - p.y),
        )
    }

    pub fn to_world(&self, px: f64, py: f64) -> Point2D {
        Point2D::new(
            self.bounds.min.x + (px - self.offset_x) / self.scale,
            self.bounds.max.y - (py - self.offset_y) / self.scale,
        )
    }
}

/// Drawn line width of a member in pixels.
pub fn member_width_px(size_index: u8) -> f64 {
    1.0 + f64::from(size_index)
}

pub(crate) fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    (p.0 - cx).hypot(p.1 - cy)
}

/// Pixel-space segment of a member, if both endpoints exist.
pub(crate) fn member_pixels(design: &TrussDesign, member: &Member, map: &PixelMap) -> Option<((f64, f64), (f64, f64))> {
    let (a, b) = design.member_endpoints(member)?;
    Some((map.to_pixel(&a), map.to_pixel(&b)))
}
