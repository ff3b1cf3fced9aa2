//! Portable float map (`PF`) reading and writing.

use crate::error::{FormatError, Result};
use crate::image::{ColorSpace, HdrImage};

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::MalformedHeader(msg.into())
}

/// Reads whitespace-separated header tokens; returns the token and leaves
/// the cursor after the single delimiter that ends it.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str, FormatError> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(malformed("unexpected end of PFM header"));
    }
    let tok =
        std::str::from_utf8(&bytes[start..*pos]).map_err(|_| malformed("non-ASCII header"))?;
    if *pos >= bytes.len() {
        return Err(malformed("unexpected end of PFM header"));
    }
    *pos += 1;
    Ok(tok)
}

/// Decodes a three-channel PFM. Rows are stored bottom-to-top in the file and
/// returned top-to-bottom; `|scale|` multiplies every sample.
pub fn read_pfm(bytes: &[u8]) -> Result<HdrImage> {
    let mut pos = 0;
    match token(bytes, &mut pos)? {
        "PF" => {}
        "Pf" => return Err(FormatError::GrayscalePfm.into()),
        other => return Err(malformed(format!("bad PFM magic `{other}`")).into()),
    }
    let dim = |s: &str| match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(malformed(format!("bad dimension `{s}`"))),
    };
    let width = dim(token(bytes, &mut pos)?)?;
    let height = dim(token(bytes, &mut pos)?)?;
    let scale_tok = token(bytes, &mut pos)?;
    let scale: f32 = scale_tok
        .parse()
        .map_err(|_| malformed(format!("bad scale `{scale_tok}`")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(malformed(format!("scale must be finite and non-zero, got {scale}")).into());
    }
    let little_endian = scale < 0.0;
    let mult = scale.abs() as f64;

    let row_len = width * 3;
    let payload = &bytes[pos..];
    if payload.len() < row_len * height * 4 {
        let complete_rows = payload.len() / (row_len * 4);
        return Err(FormatError::TruncatedScanline {
            row: height - 1 - complete_rows,
        }
        .into());
    }

    let mut data = vec![0.0f64; row_len * height];
    for (file_row, chunk) in payload.chunks_exact(row_len * 4).take(height).enumerate() {
        let y = height - 1 - file_row;
        for (i, b) in chunk.chunks_exact(4).enumerate() {
            let raw = [b[0], b[1], b[2], b[3]];
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            if !v.is_finite() || v < 0.0 {
                return Err(FormatError::InvalidSample {
                    index: y * row_len + i,
                    value: v,
                }
                .into());
            }
            data[y * row_len + i] = v as f64 * mult;
        }
    }
    HdrImage::new(width, height, data, ColorSpace::LinearRgb)
}

/// Byte order of a written PFM payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endian {
    Little,
    Big,
}

/// Encodes an image as PFM with unit scale. Samples are narrowed to `f32`.
pub fn write_pfm(img: &HdrImage, endian: Endian) -> Vec<u8> {
    let scale = match endian {
        Endian::Little => "-1.0",
        Endian::Big => "1.0",
    };
    let mut out = format!("PF\n{} {}\n{scale}\n", img.width(), img.height()).into_bytes();
    let row_len = img.width() * 3;
    for y in (0..img.height()).rev() {
        for &v in &img.data()[y * row_len..(y + 1) * row_len] {
            let v = v as f32;
            out.extend_from_slice(&match endian {
                Endian::Little => v.to_le_bytes(),
                Endian::Big => v.to_be_bytes(),
            });
        }
    }
    out
}
