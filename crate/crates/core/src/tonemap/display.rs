use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::color::{ColorMatrix, SRGB_TO_XYZ};
use crate::error::{Error, Result};
use crate::image::{ColorSpace, HdrImage, SdrImage};

/// Drive values within this distance of [0, 1] are not counted as clamped.
const GAMUT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisplayMode {
    #[default]
    Srgb,
    Gog,
}

impl FromStr for DisplayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "srgb" => Ok(DisplayMode::Srgb),
            "gog" => Ok(DisplayMode::Gog),
            other => Err(Error::param(
                "display_mode",
                format!("expected `srgb` or `gog`, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for DisplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DisplayMode::Srgb => "srgb",
            DisplayMode::Gog => "gog",
        })
    }
}

/// Gain-offset-gamma response of one channel: `L = (gain·d + offset)^gamma`,
/// with `L` relative to the channel maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GogChannel {
    pub gain: f64,
    pub offset: f64,
    pub gamma: f64,
}

impl Default for GogChannel {
    fn default() -> Self {
        GogChannel {
            gain: 1.0,
            offset: 0.0,
            gamma: 2.2,
        }
    }
}

impl GogChannel {
    /// Drive value producing relative luminance `l`.
    pub fn drive(&self, l: f64) -> f64 {
        (l.max(0.0).powf(1.0 / self.gamma) - self.offset) / self.gain
    }

    /// Relative luminance emitted for drive `d`.
    pub fn luminance(&self, d: f64) -> f64 {
        (self.gain * d + self.offset).max(0.0).powf(self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayModel {
    pub mode: DisplayMode,
    /// Device RGB to XYZ, white at Y = 1.
    pub primaries: ColorMatrix,
    /// Luminance of the display white in cd/m².
    pub peak_luminance: f64,
    pub gog: [GogChannel; 3],
}

impl Default for DisplayModel {
    fn default() -> Self {
        DisplayModel {
            mode: DisplayMode::Srgb,
            primaries: SRGB_TO_XYZ,
            peak_luminance: 560.0,
            gog: [GogChannel::default(); 3],
        }
    }
}

impl DisplayModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_luminance > 0.0 && self.peak_luminance.is_finite()) {
            return Err(Error::param(
                "display_peak",
                format!("must be > 0, got {}", self.peak_luminance),
            ));
        }
        for ch in &self.gog {
            if !(ch.gain > 0.0 && ch.gamma > 0.0 && ch.offset.is_finite()) {
                return Err(Error::param(
                    "gog",
                    format!("gain and gamma must be > 0: {ch:?}"),
                ));
            }
        }
        self.primaries.inverse()?;
        Ok(())
    }

    /// XYZ of the display white scaled to Y = 100.
    pub fn white(&self) -> [f64; 3] {
        let w = self.primaries.white();
        let s = 100.0 / w[1];
        [w[0] * s, 100.0, w[2] * s]
    }
}

/// Standard sRGB transfer function.
#[inline]
pub fn srgb_encode(v: f64) -> f64 {
    if v <= 0.0031308 {
        12.92 * v
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Inverse of [`srgb_encode`].
#[inline]
pub fn srgb_decode(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// `[0, 1]` to an 8-bit code, rounding halves up.
#[inline]
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub image: SdrImage,
    /// Channels whose drive fell outside [0, 1].
    pub gamut_clamped: usize,
}

/// Display-relative XYZ (white at Y = 100) to 8-bit device codes.
pub fn encode_display(xyz: &HdrImage, dm: &DisplayModel) -> Result<Encoded> {
    xyz.expect_space(ColorSpace::Xyz)?;
    let to_device = dm.primaries.inverse()?;
    let mut data = vec![0u8; xyz.data().len()];
    let clamped = data
        .par_chunks_mut(3)
        .zip(xyz.data().par_chunks_exact(3))
        .map(|(out, p)| {
            let rgb = to_device.apply([p[0] / 100.0, p[1] / 100.0, p[2] / 100.0]);
            let mut clamped = 0;
            for c in 0..3 {
                let d = match dm.mode {
                    DisplayMode::Srgb => srgb_encode(rgb[c].max(0.0)),
                    DisplayMode::Gog => dm.gog[c].drive(rgb[c]),
                };
                if !(-GAMUT_SLACK..=1.0 + GAMUT_SLACK).contains(&d) || rgb[c] < -GAMUT_SLACK {
                    clamped += 1;
                }
                out[c] = quantize(d);
            }
            clamped
        })
        .sum();
    Ok(Encoded {
        image: SdrImage::new(xyz.width(), xyz.height(), data)?,
        gamut_clamped: clamped,
    })
}
