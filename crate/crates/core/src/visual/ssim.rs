//! Mean structural similarity over uniform 11x11 windows.

use super::Raster;
use crate::error::VisualError;

const WINDOW: usize = 11;
const C1: f64 = 0.01 * 0.01;
const C2: f64 = 0.03 * 0.03;

/// Summed-area table with a zero first row and column.
struct Integral {
    stride: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn new(width: usize, height: usize, value: impl Fn(usize) -> f64) -> Self {
        let stride = width + 1;
        let mut sums = vec![0.0; stride * (height + 1)];
        for r in 0..height {
            let mut row = 0.0;
            for c in 0..width {
                row += value(r * width + c);
                sums[(r + 1) * stride + c + 1] = sums[r * stride + c + 1] + row;
            }
        }
        Self { stride, sums }
    }

    fn window(&self, c: usize, r: usize, size: usize) -> f64 {
        let s = self.stride;
        let (c1, r1) = (c + size, r + size);
        self.sums[r1 * s + c1] - self.sums[r * s + c1] - self.sums[r1 * s + c] + self.sums[r * s + c]
    }
}

/// Mean SSIM of `x` and `y` (dynamic range 1.0), stride 1, population
/// statistics per window. Images smaller than the window use a single window
/// of their smaller side.
pub fn ssim(x: &Raster, y: &Raster) -> Result<f64, VisualError> {
    if x.dims() != y.dims() {
        return Err(VisualError::DimensionMismatch { left: x.dims(), right: y.dims() });
    }
    let (w, h) = x.dims();
    let win = WINDOW.min(w).min(h);
    if win == 0 {
        return Err(VisualError::DimensionMismatch { left: x.dims(), right: y.dims() });
    }
    let (xp, yp) = (&x.pixels, &y.pixels);
    let sx = Integral::new(w, h, |i| xp[i]);
    let sy = Integral::new(w, h, |i| yp[i]);
    let sxx = Integral::new(w, h, |i| xp[i] * xp[i]);
    let syy = Integral::new(w, h, |i| yp[i] * yp[i]);
    let sxy = Integral::new(w, h, |i| xp[i] * yp[i]);

    let n = (win * win) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for r in 0..=h - win {
        for c in 0..=w - win {
            let mx = sx.window(c, r, win) / n;
            let my = sy.window(c, r, win) / n;
            let vx = sxx.window(c, r, win) / n - mx * mx;
            let vy = syy.window(c, r, win) / n - my * my;
            let cov = sxy.window(c, r, win) / n - mx * my;
            total += ((2.0 * mx * my + C1) * (2.0 * cov + C2)) / ((mx * mx + my * my + C1) * (vx + vy + C2));
            count += 1;
        }
    }
    Ok(total / count as f64)
}
