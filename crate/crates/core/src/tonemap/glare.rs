use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{ColorSpace, HdrImage};

/// Glare-clipped image and the number of pixels that were clipped.
#[derive(Debug, Clone, PartialEq)]
pub struct GlareOutput {
    pub image: HdrImage,
    pub clipped: usize,
    /// Luminance at which pixels were clipped, before rescaling.
    pub threshold: f64,
}

/// Clips the brightest `fraction` of pixels to the `(1 − fraction)`
/// luminance quantile, keeping their chromaticity, then rescales so the
/// largest Y is exactly 100.
///
/// When the quantile is zero the clip is skipped and only the rescale runs.
pub fn simulate_glare(xyz: &HdrImage, fraction: f64) -> Result<GlareOutput> {
    xyz.expect_space(ColorSpace::Xyz)?;
    if !(0.0..=0.1).contains(&fraction) {
        return Err(Error::param(
            "glare_fraction",
            format!("must lie in [0, 0.1], got {fraction}"),
        ));
    }
    let y: Vec<f64> = xyz.data().chunks_exact(3).map(|p| p[1]).collect();
    let mut sorted = y.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let top = ((fraction * n as f64) + 1e-9).floor() as usize;
    let mut q = sorted[n - 1 - top.min(n - 1)];
    if q <= 0.0 {
        q = sorted[n - 1];
    }
    if q <= 0.0 {
        return Ok(GlareOutput {
            image: xyz.clone(),
            clipped: 0,
            threshold: 0.0,
        });
    }

    let gain = 100.0 / q;
    let mut data = vec![0.0; xyz.data().len()];
    data.par_chunks_mut(3)
        .zip(xyz.data().par_chunks_exact(3))
        .for_each(|(out, p)| {
            if p[1] >= q {
                let s = 100.0 / p[1];
                out.copy_from_slice(&[p[0] * s, 100.0, p[2] * s]);
            } else {
                out.copy_from_slice(&[p[0] * gain, (p[1] * gain).min(100.0), p[2] * gain]);
            }
        });
    let clipped = y.iter().filter(|&&v| v > q).count();
    Ok(GlareOutput {
        image: HdrImage::new(xyz.width(), xyz.height(), data, ColorSpace::Xyz)?,
        clipped,
        threshold: q,
    })
}
