//! Edge-preserving base/detail decomposition of a brightness map.
//!
//! The map is normalized by its maximum and filtered in the log10 domain.
//! [`decompose`] evaluates the bilateral filter directly; [`decompose_fast`]
//! uses the bilateral grid. In both, the detail layer is `log Q − base`.

mod exact;
mod grid;

pub use exact::{bilateral_exact, spatial_kernel, KernelTap};
pub use grid::{bilateral_grid, bilateral_grid_with, GridOptions, RangeSampling};

use crate::error::{Error, Result};

/// Relative floor applied to `Q / Q_max` before taking log10.
pub const LOG_FLOOR: f64 = 1e-6;
/// Spatial kernel support, in multiples of `sigma_s`.
pub const KERNEL_RADIUS_SIGMAS: f64 = 3.0;
/// Default spatial sigma as a fraction of the larger image dimension.
pub const DEFAULT_SIGMA_S_FRACTION: f64 = 0.02;
/// Default range sigma in log10 units.
pub const DEFAULT_SIGMA_R: f64 = 0.35;

/// `fraction · max(width, height)`.
pub fn default_sigma_s(width: usize, height: usize, fraction: f64) -> f64 {
    fraction * width.max(height) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessDecomposition {
    pub width: usize,
    pub height: usize,
    /// Normalization constant, the largest brightness in the map.
    pub q_max: f64,
    /// `log10(max(Q/Q_max, LOG_FLOOR))`.
    pub log_q: Vec<f64>,
    /// Bilateral-filtered `log_q`.
    pub base: Vec<f64>,
    /// `log_q − base`.
    pub detail: Vec<f64>,
    pub sigma_s: f64,
    pub sigma_r: f64,
}

impl BrightnessDecomposition {
    /// `Q_max · 10^(base + detail)`, the (floored) input brightness.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.base
            .iter()
            .zip(&self.detail)
            .map(|(b, d)| self.q_max * 10f64.powf(b + d))
            .collect()
    }
}

fn prepare(
    q: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
) -> Result<(f64, Vec<f64>)> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage("brightness map has zero area".into()));
    }
    if q.len() != width * height {
        return Err(Error::InvalidImage(format!(
            "brightness map has {} values, expected {}",
            q.len(),
            width * height
        )));
    }
    if !(sigma_s > 0.0 && sigma_s.is_finite()) {
        return Err(Error::param(
            "sigma_s",
            format!("must be > 0, got {sigma_s}"),
        ));
    }
    if !(sigma_r > 0.0 && sigma_r.is_finite()) {
        return Err(Error::param(
            "sigma_r",
            format!("must be > 0, got {sigma_r}"),
        ));
    }
    if let Some(bad) = q.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidImage(format!(
            "brightness map contains {bad}"
        )));
    }
    let q_max = q.iter().cloned().fold(0.0, f64::max);
    if !(q_max > 0.0) {
        return Err(Error::InvalidImage(
            "maximum brightness is not positive".into(),
        ));
    }
    let log_q = q
        .iter()
        .map(|&v| (v / q_max).max(LOG_FLOOR).log10())
        .collect();
    Ok((q_max, log_q))
}

fn finish(
    width: usize,
    height: usize,
    q_max: f64,
    log_q: Vec<f64>,
    base: Vec<f64>,
    sigma_s: f64,
    sigma_r: f64,
) -> BrightnessDecomposition {
    let detail = log_q.iter().zip(&base).map(|(l, b)| l - b).collect();
    BrightnessDecomposition {
        width,
        height,
        q_max,
        log_q,
        base,
        detail,
        sigma_s,
        sigma_r,
    }
}

/// Decomposition with the direct bilateral filter.
pub fn decompose(
    q: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
) -> Result<BrightnessDecomposition> {
    let (q_max, log_q) = prepare(q, width, height, sigma_s, sigma_r)?;
    let base = bilateral_exact(&log_q, width, height, sigma_s, sigma_r);
    Ok(finish(width, height, q_max, log_q, base, sigma_s, sigma_r))
}

/// Decomposition with the bilateral-grid approximation.
pub fn decompose_fast(
    q: &[f64],
    width: usize,
    height: usize,
    sigma_s: f64,
    sigma_r: f64,
) -> Result<BrightnessDecomposition> {
    let (q_max, log_q) = prepare(q, width, height, sigma_s, sigma_r)?;
    let base = bilateral_grid(&log_q, width, height, sigma_s, sigma_r);
    Ok(finish(width, height, q_max, log_q, base, sigma_s, sigma_r))
}
