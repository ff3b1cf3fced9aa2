use std::fmt;

use crate::error::{Error, Result};

/// Tristimulus space of an [`HdrImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    /// Linear RGB with sRGB primaries and D65 white.
    LinearRgb,
    Xyz,
}

impl fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColorSpace::LinearRgb => "linear RGB",
            ColorSpace::Xyz => "XYZ",
        })
    }
}

/// Floating-point three-channel raster, row-major, top row first.
///
/// Samples are linear radiance and always finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct HdrImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
    space: ColorSpace,
}

impl HdrImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>, space: ColorSpace) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be non-zero, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| Error::InvalidImage("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} samples for {width}x{height}x3, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidImage(format!(
                "sample {i} is {} (samples must be finite and non-negative)",
                data[i]
            )));
        }
        Ok(HdrImage {
            width,
            height,
            data,
            space,
        })
    }

    /// Builds an image from per-pixel triples in row-major order.
    pub fn from_pixels(
        width: usize,
        height: usize,
        pixels: impl IntoIterator<Item = [f64; 3]>,
        space: ColorSpace,
    ) -> Result<Self> {
        let data = pixels.into_iter().flatten().collect();
        Self::new(width, height, data, space)
    }

    /// Evaluates `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        space: ColorSpace,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data, space)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl ExactSizeIterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    /// Second channel of every pixel: luminance for XYZ images.
    pub fn luminance(&self) -> Vec<f64> {
        match self.space {
            ColorSpace::Xyz => self.data.chunks_exact(3).map(|p| p[1]).collect(),
            ColorSpace::LinearRgb => {
                let m = crate::color::SRGB_TO_XYZ.rows()[1];
                self.data
                    .chunks_exact(3)
                    .map(|p| (m[0] * p[0] + m[1] * p[1] + m[2] * p[2]).max(0.0))
                    .collect()
            }
        }
    }

    pub(crate) fn expect_space(&self, expected: ColorSpace) -> Result<()> {
        if self.space != expected {
            return Err(Error::ColorSpaceMismatch {
                expected,
                actual: self.space,
            });
        }
        Ok(())
    }
}

/// 8-bit device RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdrImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl SdrImage {
    /// Wraps interleaved RGB bytes. Zero-sized images are representable but
    /// cannot be written.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::InvalidImage(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(SdrImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}
