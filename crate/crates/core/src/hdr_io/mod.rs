//! HDR ingestion, matrix color conversion and SDR output.

mod pfm;
mod png_io;
mod radiance;

use std::path::Path;

pub use pfm::{read_pfm, write_pfm, Endian};
pub use png_io::{encode_png, read_sdr_png, write_sdr_png};
pub use radiance::{read_radiance_hdr, rgb_to_rgbe, rgbe_to_rgb, write_radiance_hdr, Scanlines};

use rayon::prelude::*;

use crate::color::{ColorMatrix, SRGB_TO_XYZ};
use crate::error::{Error, Result};
use crate::image::{ColorSpace, HdrImage};

/// Result of a matrix conversion. `clamped` counts channels whose product
/// came out negative and was floored at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Converted {
    pub image: HdrImage,
    pub clamped: usize,
}

/// Applies `m` to every pixel and retags the image, flooring negative
/// products at zero.
pub fn convert(img: &HdrImage, m: &ColorMatrix, target: ColorSpace) -> Converted {
    let mut data = vec![0.0; img.data().len()];
    let clamped: usize = data
        .par_chunks_mut(3)
        .zip(img.data().par_chunks(3))
        .map(|(out, px)| {
            let v = m.apply([px[0], px[1], px[2]]);
            let mut n = 0;
            for c in 0..3 {
                if v[c] < 0.0 {
                    n += 1;
                }
                out[c] = v[c].max(0.0);
            }
            n
        })
        .sum();
    let image = HdrImage::new(img.width(), img.height(), data, target)
        .expect("conversion preserves shape and validity");
    Converted { image, clamped }
}

/// Linear RGB to XYZ with `m` (pass [`SRGB_TO_XYZ`] for the IEC sRGB matrix).
pub fn rgb_to_xyz(img: &HdrImage, m: &ColorMatrix) -> Result<Converted> {
    img.expect_space(ColorSpace::LinearRgb)?;
    Ok(convert(img, m, ColorSpace::Xyz))
}

/// XYZ back to linear RGB through the inverse of the RGB→XYZ matrix `m`.
pub fn xyz_to_rgb(img: &HdrImage, m: &ColorMatrix) -> Result<Converted> {
    img.expect_space(ColorSpace::Xyz)?;
    Ok(convert(img, &m.inverse()?, ColorSpace::LinearRgb))
}

/// Converts to XYZ with the sRGB matrix unless the image already is XYZ.
pub fn ensure_xyz(img: &HdrImage) -> Converted {
    match img.space() {
        ColorSpace::Xyz => Converted {
            image: img.clone(),
            clamped: 0,
        },
        ColorSpace::LinearRgb => convert(img, &SRGB_TO_XYZ, ColorSpace::Xyz),
    }
}

/// Supported HDR container formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HdrFormat {
    Radiance,
    Pfm,
}

impl HdrFormat {
    /// Guesses the format from a file extension (`.hdr`, `.pic`, `.rgbe`, `.pfm`).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "hdr" | "pic" | "rgbe" => Some(HdrFormat::Radiance),
            "pfm" => Some(HdrFormat::Pfm),
            _ => None,
        }
    }

    /// Sniffs the format from the leading bytes.
    pub fn sniff(bytes: &[u8]) -> Option<Self> {
        if bytes.starts_with(b"#?") {
            Some(HdrFormat::Radiance)
        } else if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
            Some(HdrFormat::Pfm)
        } else {
            None
        }
    }
}

/// Decodes an in-memory HDR file, sniffing its format.
pub fn decode(bytes: &[u8]) -> Result<HdrImage> {
    match HdrFormat::sniff(bytes) {
        Some(HdrFormat::Radiance) => read_radiance_hdr(bytes),
        Some(HdrFormat::Pfm) => read_pfm(bytes),
        None => Err(crate::FormatError::MalformedHeader(
            "neither a Radiance nor a PFM signature".into(),
        )
        .into()),
    }
}

/// Reads and decodes an HDR file from disk.
pub fn read_hdr_file(path: impl AsRef<Path>) -> Result<HdrImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(px: [f64; 3]) -> HdrImage {
        HdrImage::from_pixels(1, 1, [px], ColorSpace::LinearRgb).unwrap()
    }

    #[test]
    fn black_stays_black() {
        let out = rgb_to_xyz(&one([0.0; 3]), &SRGB_TO_XYZ).unwrap();
        assert_eq!(out.image.pixel(0, 0), [0.0; 3]);
        assert_eq!(out.image.space(), ColorSpace::Xyz);
    }

    #[test]
    fn white_has_unit_luminance() {
        let out = rgb_to_xyz(&one([1.0; 3]), &SRGB_TO_XYZ).unwrap();
        assert_eq!(out.image.pixel(0, 0)[1], 1.0);
    }

    #[test]
    fn basis_vector_gives_first_column() {
        let out = rgb_to_xyz(&one([1.0, 0.0, 0.0]), &SRGB_TO_XYZ).unwrap();
        let col: Vec<f64> = SRGB_TO_XYZ.rows().iter().map(|r| r[0]).collect();
        assert_eq!(out.image.pixel(0, 0).to_vec(), col);
    }

    #[test]
    fn negative_products_are_clamped_and_counted() {
        let m = ColorMatrix::new([[1.0, -2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let out = rgb_to_xyz(&one([1.0, 1.0, 1.0]), &m).unwrap();
        assert_eq!(out.image.pixel(0, 0), [0.0, 1.0, 1.0]);
        assert_eq!(out.clamped, 1);
    }

    #[test]
    fn wrong_space_rejected() {
        let xyz = HdrImage::from_pixels(1, 1, [[1.0; 3]], ColorSpace::Xyz).unwrap();
        assert!(rgb_to_xyz(&xyz, &SRGB_TO_XYZ).is_err());
    }

    #[test]
    fn format_detection() {
        assert_eq!(
            HdrFormat::from_path(Path::new("a/b.HDR")),
            Some(HdrFormat::Radiance)
        );
        assert_eq!(
            HdrFormat::from_path(Path::new("x.pfm")),
            Some(HdrFormat::Pfm)
        );
        assert_eq!(HdrFormat::from_path(Path::new("x.png")), None);
        assert!(decode(b"GIF89a").is_err());
    }
}
