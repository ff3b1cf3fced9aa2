use rayon::prelude::*;

use super::KERNEL_RADIUS_SIGMAS;

/// One spatial kernel offset and its Gaussian weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTap {
    pub dx: isize,
    pub dy: isize,
    pub weight: f64,
}

/// Spatial Gaussian taps inside the disc of radius `3·sigma_s`.
pub fn spatial_kernel(sigma_s: f64) -> Vec<KernelTap> {
    let radius = KERNEL_RADIUS_SIGMAS * sigma_s;
    let r = radius.floor() as isize;
    let inv = 1.0 / (2.0 * sigma_s * sigma_s);
    let mut taps = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as f64;
            if d2 <= radius * radius {
                taps.push(KernelTap {
                    dx,
                    dy,
                    weight: (-d2 * inv).exp(),
                });
            }
        }
    }
    taps
}

/// Direct bilateral filter: every output is the range- and space-weighted
/// mean over the valid neighbourhood, renormalized per pixel.
pub fn bilateral_exact(
    values: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
) -> Vec<f64> {
    let taps = spatial_kernel(sigma_s);
    let inv_r = 1.0 / (2.0 * sigma_r * sigma_r);
    let mut out = vec![0.0; values.len()];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            let center = values[y * width + x];
            let mut acc = 0.0;
            let mut norm = 0.0;
            for tap in &taps {
                let px = x as isize + tap.dx;
                let py = y as isize + tap.dy;
                if px < 0 || py < 0 || px >= width as isize || py >= height as isize {
                    continue;
                }
                let v = values[py as usize * width + px as usize];
                let d = v - center;
                let w = tap.weight * (-d * d * inv_r).exp();
                acc += w * v;
                norm += w;
            }
            *o = acc / norm;
        }
    });
    out
}
