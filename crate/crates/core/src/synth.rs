//! Deterministic synthetic HDR scenes for tests and benchmarks.
//!
//! Log-luminance is a 1/f noise field plus a dead-leaves layer of flat
//! occluding discs, which gives both the smooth gradients and the sharp
//! edges of natural scenes. A small set of specular highlights sets the top
//! of the dynamic range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{ColorSpace, HdrImage};
use crate::tonemap::{image_key, KeyConvention, KeyExtrema};

/// Shape of one synthetic scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    /// Ratio of the largest to the smallest luminance.
    pub dynamic_range: f64,
    /// Share of the available range, in log units, spanned by the scene
    /// body; the rest is reached only by highlights.
    pub body_share: f64,
    /// Largest distance in stops between the highlights and the bottom of
    /// the body. Only one pinned pixel sits below it.
    pub body_reach: f64,
    /// Exponent applied to the normalized body field; larger is darker.
    pub shaping: f64,
    /// Fraction of pixels that are specular highlights.
    pub highlight_fraction: f64,
    /// Chroma strength, 0 for a gray scene.
    pub saturation: f64,
    /// Luminance of the darkest pixel.
    pub floor: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            width: 96,
            height: 64,
            seed: 1,
            dynamic_range: 1e4,
            body_share: 1.0,
            body_reach: 18.0,
            shaping: 1.0,
            highlight_fraction: 0.005,
            saturation: 0.3,
            floor: 0.01,
        }
    }
}

/// Smoothly interpolated lattice noise with `cells` cells across the image.
fn lattice(rng: &mut ChaCha8Rng, w: usize, h: usize, cells: usize) -> Vec<f64> {
    let n = cells + 1;
    let grid: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let smooth = |t: f64| t * t * (3.0 - 2.0 * t);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let fy = y as f64 / h as f64 * cells as f64;
        let (y0, ty) = (fy.floor() as usize, smooth(fy.fract()));
        for x in 0..w {
            let fx = x as f64 / w as f64 * cells as f64;
            let (x0, tx) = (fx.floor() as usize, smooth(fx.fract()));
            let g = |i: usize, j: usize| grid[j * n + i];
            let top = g(x0, y0) * (1.0 - tx) + g(x0 + 1, y0) * tx;
            let bottom = g(x0, y0 + 1) * (1.0 - tx) + g(x0 + 1, y0 + 1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

/// 1/f noise: octaves with amplitude inversely proportional to frequency.
fn pink_noise(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Vec<f64> {
    let mut field = vec![0.0; w * h];
    let octaves = (w.max(h) as f64).log2().ceil() as u32;
    for o in 0..octaves.max(1) {
        let cells = 1usize << (o + 1);
        let amp = 1.0 / cells as f64;
        for (f, v) in field.iter_mut().zip(lattice(rng, w, h, cells)) {
            *f += amp * v;
        }
    }
    field
}

/// Flat discs of random size and level, later ones occluding earlier ones.
fn dead_leaves(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Vec<f64> {
    let mut field = vec![0.0; w * h];
    let size = w.max(h) as f64;
    for _ in 0..24 {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = size * rng.random_range(0.04..0.25);
        let level = rng.random_range(-1.0..1.0);
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    field[y * w + x] = level;
                }
            }
        }
    }
    field
}

fn percentile(values: &[f64], p: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    crate::tonemap::nearest_rank(&s, p)
}

/// Luminance and chroma offsets of a scene, before color is applied.
fn scene_fields(p: &SceneParams) -> (Vec<f64>, Vec<(f64, f64)>) {
    let (w, h) = (p.width, p.height);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let noise = pink_noise(&mut rng, w, h);
    let leaves = dead_leaves(&mut rng, w, h);
    let raw: Vec<f64> = noise
        .iter()
        .zip(&leaves)
        .map(|(n, l)| n + 0.6 * l)
        .collect();
    let (lo, hi) = (percentile(&raw, 1.0), percentile(&raw, 99.0));
    let span = if hi > lo { hi - lo } else { 1.0 };

    let total = p.dynamic_range.log2();
    let bottom = (total - p.body_reach).max(0.0);
    let body = (total - bottom) * p.body_share.clamp(0.0, 1.0);
    let mut log2y: Vec<f64> = raw
        .iter()
        .map(|v| bottom + body * ((v - lo) / span).clamp(0.0, 1.0).powf(p.shaping))
        .collect();
    // at least one pixel pins each end of the range
    let darkest = (0..log2y.len())
        .min_by(|&a, &b| raw[a].total_cmp(&raw[b]))
        .unwrap_or(0);
    log2y[darkest] = 0.0;

    let n = w * h;
    let target = ((p.highlight_fraction * n as f64).round() as usize)
        .max(1)
        .min(n);
    let mut lit = vec![false; n];
    let mut count = 0;
    while count < target {
        let (cx, cy) = (rng.random_range(0..w), rng.random_range(0..h));
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let (x, y) = (cx + dx, cy + dy);
            if x < w && y < h && !lit[y * w + x] && count < target {
                lit[y * w + x] = true;
                log2y[y * w + x] = total;
                count += 1;
            }
        }
    }

    let cu = lattice(&mut rng, w, h, 3);
    let cv = lattice(&mut rng, w, h, 3);
    let y = log2y.iter().map(|l| p.floor * l.exp2()).collect();
    let chroma = cu
        .iter()
        .zip(&cv)
        .zip(&lit)
        .map(|((u, v), &l)| if l { (0.0, 0.0) } else { (*u, *v) })
        .collect();
    (y, chroma)
}

/// Luminance map of a scene, without building the color image.
pub fn scene_luminance(p: &SceneParams) -> Vec<f64> {
    scene_fields(p).0
}

/// Linear sRGB scene whose luminance equals [`scene_luminance`].
pub fn natural_scene(p: &SceneParams) -> HdrImage {
    let (y, chroma) = scene_fields(p);
    let s = p.saturation;
    let pixels = y.iter().zip(chroma).map(|(&y, (u, v))| {
        let rgb = [1.0 + s * u, 1.0 + s * v, 1.0 - s * (u + v)].map(|c: f64| c.max(0.05));
        let l = 0.2126 * rgb[0] + 0.7152 * rgb[1] + 0.0722 * rgb[2];
        rgb.map(|c| y * c / l)
    });
    HdrImage::from_pixels(p.width, p.height, pixels, ColorSpace::LinearRgb)
        .expect("synthetic scenes are valid")
}

/// Key of a scene's luminance under the default statistics.
pub fn scene_key(p: &SceneParams) -> f64 {
    image_key(
        &scene_luminance(p),
        1e-6,
        KeyConvention::Reinhard,
        KeyExtrema::Percentile,
    )
    .map(|s| s.k)
    .unwrap_or(f64::NAN)
}

/// Adjusts `shaping`, and if needed `body_share`, so the scene key is as
/// close to `target` as the construction allows.
pub fn fit_key(mut p: SceneParams, target: f64) -> SceneParams {
    const SHAPING: (f64, f64) = (0.05, 40.0);
    p.body_share = 1.0;
    p.shaping = SHAPING.0;
    if scene_key(&p) < target {
        // brighter than any body shaping reaches: shrink the body so the
        // highlights carry more of the mean
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..50 {
            p.body_share = 0.5 * (lo + hi);
            if scene_key(&p) < target {
                hi = p.body_share;
            } else {
                lo = p.body_share;
            }
        }
        p.body_share = 0.5 * (lo + hi);
        return p;
    }
    let (mut lo, mut hi) = (SHAPING.0.ln(), SHAPING.1.ln());
    for _ in 0..50 {
        p.shaping = (0.5 * (lo + hi)).exp();
        if scene_key(&p) > target {
            lo = p.shaping.ln();
        } else {
            hi = p.shaping.ln();
        }
    }
    p.shaping = (0.5 * (lo + hi)).exp();
    p
}

/// Parameters of the 30-scene robustness corpus: dynamic ranges from 1e2 to
/// 1e8 and keys from 0.05 to 0.85, interleaved so range and key vary
/// independently.
pub fn corpus_params() -> Vec<SceneParams> {
    const N: usize = 30;
    let sizes = [(64, 64), (96, 64), (48, 80), (128, 96), (72, 72)];
    (0..N)
        .map(|i| {
            let t = i as f64 / (N - 1) as f64;
            let dr = 10f64.powf(2.0 + 6.0 * t);
            let j = (i * 7) % N;
            let key = 0.05 + 0.8 * j as f64 / (N - 1) as f64;
            let (width, height) = sizes[i % sizes.len()];
            let p = SceneParams {
                width,
                height,
                seed: 1000 + i as u64,
                dynamic_range: dr,
                saturation: 0.1 + 0.4 * ((i * 3) % 5) as f64 / 4.0,
                ..Default::default()
            };
            fit_key(p, key)
        })
        .collect()
}

/// The robustness corpus as linear sRGB images.
pub fn corpus() -> Vec<HdrImage> {
    corpus_params().iter().map(natural_scene).collect()
}

/// Two-plateau luminance map: `low` left of column `edge`, `high` from it on.
pub fn step_luminance(width: usize, height: usize, edge: usize, low: f64, high: f64) -> Vec<f64> {
    (0..width * height)
        .map(|i| if i % width < edge { low } else { high })
        .collect()
}

/// Gray image with the given luminance at every pixel.
pub fn constant_gray(width: usize, height: usize, y: f64) -> HdrImage {
    HdrImage::from_fn(width, height, ColorSpace::LinearRgb, |_, _| [y; 3])
        .expect("finite non-negative luminance")
}
