use truss_agents::visual::Raster;

/// Direct windowed SSIM: every window's statistics summed pixel by pixel.
pub fn naive_ssim(x: &Raster, y: &Raster) -> f64 {
    let (w, h) = x.dims();
    let win = 11.min(w).min(h);
    let n = (win * win) as f64;
    let (c1, c2) = (1e-4, 9e-4);
    let mut total = 0.0;
    let mut count = 0.0;
    for r in 0..=h - win {
        for c in 0..=w - win {
            let px = |i: usize, j: usize| (x.get(c + i, r + j), y.get(c + i, r + j));
            let (mut mx, mut my) = (0.0, 0.0);
            for j in 0..win {
                for i in 0..win {
                    let (a, b) = px(i, j);
                    mx += a;
                    my += b;
                }
            }
            mx /= n;
            my /= n;
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for j in 0..win {
                for i in 0..win {
                    let (a, b) = px(i, j);
                    vx += (a - mx) * (a - mx);
                    vy += (b - my) * (b - my);
                    cov += (a - mx) * (b - my);
                }
            }
            vx /= n;
            vy /= n;
            cov /= n;
            total += (2.0 * mx * my + c1) * (2.0 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1.0;
        }
    }
    total / count
}
