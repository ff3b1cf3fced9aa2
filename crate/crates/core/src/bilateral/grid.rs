use rayon::prelude::*;

use super::KERNEL_RADIUS_SIGMAS;

/// Range levels further than this many `sigma_r` from a sample get nothing.
const RANGE_REACH_SIGMAS: f64 = 5.0;

/// How samples enter the range axis of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeSampling {
    /// Samples are splatted into range cells and the grid is blurred along
    /// range as well as space.
    Splat,
    /// Every range level receives each sample weighted by the range Gaussian
    /// of its distance to the level; only space is blurred.
    Kernel,
}

/// Sampling and smoothing choices of the bilateral grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Spatial cell size in units of `sigma_s`.
    pub cell_s: f64,
    /// Range cell size in units of `sigma_r`.
    pub cell_r: f64,
    /// Spread each sample over the surrounding cells instead of the nearest.
    pub linear_splat: bool,
    /// Subtract the variance added by splatting and slicing from the blur.
    pub compensate: bool,
    pub range: RangeSampling,
    /// Cubic rather than linear interpolation between range levels
    /// (kernel sampling only).
    pub cubic_range: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            cell_s: 0.5,
            cell_r: 0.5,
            linear_splat: true,
            compensate: true,
            range: RangeSampling::Kernel,
            cubic_range: true,
        }
    }
}

/// Bilateral-grid approximation of [`super::bilateral_exact`] with default
/// [`GridOptions`]: cells are half a sigma wide in space and in range.
pub fn bilateral_grid(
    values: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
) -> Vec<f64> {
    bilateral_grid_with(
        values,
        width,
        height,
        sigma_s,
        sigma_r,
        GridOptions::default(),
    )
}

/// Linear (or nearest) interpolation taps of coordinate `f`.
fn taps(f: f64, linear: bool) -> [(usize, f64); 2] {
    if linear {
        let i = f.floor();
        let t = f - i;
        [(i as usize, 1.0 - t), (i as usize + 1, t)]
    } else {
        [(f.round() as usize, 1.0), (0, 0.0)]
    }
}

/// Samples are accumulated into a space×range grid as (value, weight)
/// pairs, the grid is blurred with a separable Gaussian and the result is
/// sliced back with trilinear interpolation.
pub fn bilateral_grid_with(
    values: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
    opts: GridOptions,
) -> Vec<f64> {
    let (vmin, vmax) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let (cell_s, cell_r) = (sigma_s * opts.cell_s, sigma_r * opts.cell_r);
    let gx = |x: usize| x as f64 / cell_s;
    let gz = |v: f64| (v - vmin) / cell_r;
    let nx = gx(width - 1).ceil() as usize + 2;
    let ny = gx(height - 1).ceil() as usize + 2;
    // kernel levels start one cell below the minimum so cubic slicing has a
    // neighbour on each side
    let level0 = if opts.range == RangeSampling::Kernel {
        1usize
    } else {
        0
    };
    let nz = gz(vmax).ceil() as usize + 2 + 2 * level0;
    let idx = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let inv_r = 1.0 / (2.0 * sigma_r * sigma_r);

    // (sum of weighted values, sum of weights)
    let mut grid = vec![[0.0f64; 2]; nx * ny * nz];
    for y in 0..height {
        let ty = taps(gx(y), opts.linear_splat);
        for x in 0..width {
            let v = values[y * width + x];
            let tx = taps(gx(x), opts.linear_splat);
            let mut add = |z: usize, wz: f64| {
                for &(yi, wy) in &ty {
                    for &(xi, wx) in &tx {
                        let w = wx * wy * wz;
                        if w > 0.0 {
                            let c = &mut grid[idx(xi, yi, z)];
                            c[0] += w * v;
                            c[1] += w;
                        }
                    }
                }
            };
            match opts.range {
                RangeSampling::Splat => {
                    for (z, wz) in taps(gz(v), opts.linear_splat) {
                        add(z, wz);
                    }
                }
                RangeSampling::Kernel => {
                    let f = gz(v) + level0 as f64;
                    let reach = RANGE_REACH_SIGMAS * sigma_r / cell_r;
                    let lo = (f - reach).ceil().max(0.0) as usize;
                    let hi = ((f + reach).floor() as usize).min(nz - 1);
                    for z in lo..=hi {
                        let d = v - (vmin + (z as f64 - level0 as f64) * cell_r);
                        add(z, (-d * d * inv_r).exp());
                    }
                }
            }
        }
    }

    // Splatting and slicing each add a box or tent to the effective kernel;
    // with compensation the blur only supplies the remaining variance.
    let added = if opts.linear_splat {
        1.0 / 3.0
    } else {
        1.0 / 12.0 + 1.0 / 6.0
    };
    let blur_sigma = |cell: f64| {
        let target = 1.0 / (cell * cell);
        if opts.compensate && target > added + 0.25 {
            (target - added).sqrt()
        } else {
            target.sqrt()
        }
    };
    let spatial = gaussian_taps(blur_sigma(opts.cell_s));
    blur_axis(&mut grid, &spatial, nx, ny, nz, Axis::X);
    blur_axis(&mut grid, &spatial, nx, ny, nz, Axis::Y);
    if opts.range == RangeSampling::Splat {
        blur_axis(
            &mut grid,
            &gaussian_taps(blur_sigma(opts.cell_r)),
            nx,
            ny,
            nz,
            Axis::Z,
        );
    }

    let mut out = vec![0.0; values.len()];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let ty = taps(gx(y), true);
        for (x, o) in row.iter_mut().enumerate() {
            let v = values[y * width + x];
            let tx = taps(gx(x), true);
            let sample = |z: usize| {
                let mut acc = [0.0; 2];
                for &(yi, wy) in &ty {
                    for &(xi, wx) in &tx {
                        let w = wx * wy;
                        if w > 0.0 {
                            let c = grid[idx(xi, yi, z)];
                            acc[0] += w * c[0];
                            acc[1] += w * c[1];
                        }
                    }
                }
                acc
            };
            let tz = taps(gz(v), true);
            *o = match opts.range {
                RangeSampling::Splat => {
                    let mut acc = [0.0; 2];
                    for (z, wz) in tz {
                        if wz > 0.0 {
                            let c = sample(z);
                            acc[0] += wz * c[0];
                            acc[1] += wz * c[1];
                        }
                    }
                    if acc[1] > 0.0 {
                        acc[0] / acc[1]
                    } else {
                        v
                    }
                }
                RangeSampling::Kernel => {
                    let f = gz(v) + level0 as f64;
                    let i = f.floor() as usize;
                    let t = f - i as f64;
                    let w = if opts.cubic_range {
                        let (t2, t3) = (t * t, t * t * t);
                        [
                            0.5 * (-t3 + 2.0 * t2 - t),
                            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
                            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
                            0.5 * (t3 - t2),
                        ]
                    } else {
                        [0.0, 1.0 - t, t, 0.0]
                    };
                    // interpolating both sums interpolates the range kernel
                    // itself, so numerator and denominator stay consistent
                    let mut acc = [0.0; 2];
                    for (k, wk) in w.into_iter().enumerate() {
                        if wk != 0.0 {
                            let c = sample(i + k - 1);
                            acc[0] += wk * c[0];
                            acc[1] += wk * c[1];
                        }
                    }
                    if acc[1] > 0.0 {
                        acc[0] / acc[1]
                    } else {
                        v
                    }
                }
            };
        }
    });
    out
}

fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (KERNEL_RADIUS_SIGMAS * sigma).ceil() as usize;
    (0..=2 * r)
        .map(|i| {
            let d = i as f64 - r as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
    Z,
}

fn blur_axis(grid: &mut [[f64; 2]], kernel: &[f64], nx: usize, ny: usize, nz: usize, axis: Axis) {
    let r = kernel.len() / 2;
    let (len, stride) = match axis {
        Axis::X => (nx, 1),
        Axis::Y => (ny, nx),
        Axis::Z => (nz, nx * ny),
    };
    let src = grid.to_vec();
    // every line along `axis` starts at a cell whose `axis` coordinate is 0
    let starts: Vec<usize> = (0..nz)
        .flat_map(|z| (0..ny).flat_map(move |y| (0..nx).map(move |x| (x, y, z))))
        .filter(|&(x, y, z)| match axis {
            Axis::X => x == 0,
            Axis::Y => y == 0,
            Axis::Z => z == 0,
        })
        .map(|(x, y, z)| (z * ny + y) * nx + x)
        .collect();
    let lines: Vec<Vec<[f64; 2]>> = starts
        .par_iter()
        .map(|&start| {
            (0..len)
                .map(|i| {
                    let mut acc = [0.0; 2];
                    let lo = i.saturating_sub(r);
                    let hi = (i + r).min(len - 1);
                    for j in lo..=hi {
                        let w = kernel[j + r - i];
                        let c = src[start + j * stride];
                        acc[0] += w * c[0];
                        acc[1] += w * c[1];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    for (start, line) in starts.iter().zip(lines) {
        for (i, v) in line.into_iter().enumerate() {
            grid[start + i * stride] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_preserved() {
        let v = vec![-0.7; 30 * 20];
        let out = bilateral_grid(&v, 30, 20, 2.0, 0.35);
        assert!(out.iter().all(|o| (o + 0.7).abs() < 1e-12));
    }

    #[test]
    fn single_pixel() {
        assert_eq!(bilateral_grid(&[-1.5], 1, 1, 0.02, 0.35), vec![-1.5]);
    }
}
