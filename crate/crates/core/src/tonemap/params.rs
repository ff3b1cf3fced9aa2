use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Numerator used by the key estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeyConvention {
    /// `2·log2 G_L − log2 Y_min − log2 Y_max`; invariant to exposure.
    #[default]
    Reinhard,
    /// `2·log2 G_L − C_L`, the formula exactly as printed.
    AsPrinted,
}

impl FromStr for KeyConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "reinhard" => Ok(KeyConvention::Reinhard),
            "as_printed" | "printed" => Ok(KeyConvention::AsPrinted),
            other => Err(Error::param(
                "key_convention",
                format!("expected `reinhard` or `as_printed`, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for KeyConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyConvention::Reinhard => "reinhard",
            KeyConvention::AsPrinted => "as_printed",
        })
    }
}

/// How `Y_min` and `Y_max` are taken from the luminance map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeyExtrema {
    /// Nearest-rank 1st and 99th percentiles.
    #[default]
    Percentile,
    /// Smallest and largest floored luminance.
    Raw,
}

impl FromStr for KeyExtrema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "percentile" => Ok(KeyExtrema::Percentile),
            "raw" => Ok(KeyExtrema::Raw),
            other => Err(Error::param(
                "key_extrema",
                format!("expected `percentile` or `raw`, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for KeyExtrema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyExtrema::Percentile => "percentile",
            KeyExtrema::Raw => "raw",
        })
    }
}

pub const GAMMA_SLOPE: f64 = 0.6781;
pub const GAMMA_INTERCEPT: f64 = 0.3128;
pub const GAMMA_MAX: f64 = 2.0;

/// Tone-curve parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneParams {
    /// Base-layer exponent; `None` predicts it from the image key.
    pub gamma: Option<f64>,
    /// Scale `A` applied after the base compression.
    pub scale: f64,
    /// Detail exponent `β`.
    pub beta: f64,
    /// Slope of the key-to-gamma regression.
    pub a: f64,
    /// Intercept of the key-to-gamma regression.
    pub b: f64,
    /// Luminance floor for the key statistics, relative to the peak.
    pub delta: f64,
    /// Fraction of the brightest pixels clipped by the glare stage.
    pub glare_fraction: f64,
    pub key_convention: KeyConvention,
    pub key_extrema: KeyExtrema,
}

impl Default for ToneParams {
    fn default() -> Self {
        ToneParams {
            gamma: None,
            scale: 1.0,
            beta: 1.1,
            a: GAMMA_SLOPE,
            b: GAMMA_INTERCEPT,
            delta: 1e-6,
            glare_fraction: 0.01,
            key_convention: KeyConvention::Reinhard,
            key_extrema: KeyExtrema::Percentile,
        }
    }
}

impl ToneParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g <= GAMMA_MAX) {
                return Err(Error::param(
                    "gamma",
                    format!("must lie in (0, 2], got {g}"),
                ));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::param(
                "scale",
                format!("must be > 0, got {}", self.scale),
            ));
        }
        if !(0.5..=2.0).contains(&self.beta) {
            return Err(Error::param(
                "beta",
                format!("must lie in [0.5, 2], got {}", self.beta),
            ));
        }
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::param("a/b", "regression constants must be finite"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 1), got {}", self.delta),
            ));
        }
        if !(0.0..=0.1).contains(&self.glare_fraction) {
            return Err(Error::param(
                "glare_fraction",
                format!("must lie in [0, 0.1], got {}", self.glare_fraction),
            ));
        }
        Ok(())
    }

    /// The regression gamma for key `k`, clamped to (0, 2].
    pub fn gamma_for_key(&self, k: f64) -> f64 {
        clamp_gamma(self.a * k + self.b)
    }
}

pub(crate) fn clamp_gamma(g: f64) -> f64 {
    if g.is_nan() {
        return GAMMA_INTERCEPT;
    }
    g.clamp(f64::MIN_POSITIVE, GAMMA_MAX)
}
