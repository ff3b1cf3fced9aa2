use crate::error::{Error, Result};

use super::params::{clamp_gamma, KeyConvention, KeyExtrema, GAMMA_INTERCEPT, GAMMA_SLOPE};

/// Key of a neutral image.
pub const NEUTRAL_KEY: f64 = 0.18;

/// Luminance statistics behind the gamma prediction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KeyStats {
    /// Geometric mean luminance.
    pub g_l: f64,
    /// Dynamic range in stops, `log2 Y_max − log2 Y_min`.
    pub c_l: f64,
    pub k: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Nearest-rank percentile of an ascending slice.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Key statistics of a luminance map.
///
/// Luminance is floored at `delta` times the peak so the statistics do not
/// depend on the exposure of the map.
pub fn image_key(
    y: &[f64],
    delta: f64,
    convention: KeyConvention,
    extrema: KeyExtrema,
) -> Result<KeyStats> {
    if y.is_empty() {
        return Err(Error::InvalidImage("empty luminance map".into()));
    }
    if let Some(bad) = y.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidImage(format!(
            "luminance {bad} is not finite and non-negative"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::param("delta", format!("must be > 0, got {delta}")));
    }
    let peak = y.iter().cloned().fold(0.0, f64::max);
    let floor = if peak > 0.0 { delta * peak } else { delta };
    let mut sorted: Vec<f64> = y.iter().map(|v| v.max(floor)).collect();
    sorted.sort_by(f64::total_cmp);

    let log_mean = sorted.iter().map(|v| v.log2()).sum::<f64>() / sorted.len() as f64;
    let (y_min, y_max) = match extrema {
        KeyExtrema::Percentile => (nearest_rank(&sorted, 1.0), nearest_rank(&sorted, 99.0)),
        KeyExtrema::Raw => (sorted[0], sorted[sorted.len() - 1]),
    };
    let (lmin, lmax) = (y_min.log2(), y_max.log2());
    let c_l = lmax - lmin;
    let k = if c_l > 0.0 {
        let num = match convention {
            KeyConvention::Reinhard => 2.0 * log_mean - lmin - lmax,
            KeyConvention::AsPrinted => 2.0 * log_mean - c_l,
        };
        NEUTRAL_KEY * 4f64.powf(num / c_l)
    } else {
        NEUTRAL_KEY
    };
    Ok(KeyStats {
        g_l: log_mean.exp2(),
        c_l,
        k,
        y_min,
        y_max,
    })
}

/// `γ = 0.6781·k + 0.3128`, clamped to (0, 2].
pub fn estimate_gamma(k: f64) -> f64 {
    clamp_gamma(GAMMA_SLOPE * k + GAMMA_INTERCEPT)
}
