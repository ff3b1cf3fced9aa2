//! Radiance `.hdr` (RGBE) reading and writing.
//!
//! Both flat scanlines (including the old `1 1 1 n` repeat marker) and
//! adaptive run-length encoded scanlines are decoded. Only the standard
//! `-Y h +X w` orientation is accepted.

use crate::error::{FormatError, Result};
use crate::image::{ColorSpace, HdrImage};

const MIN_RLE_WIDTH: usize = 8;
const MAX_RLE_WIDTH: usize = 0x7fff;

/// Decodes one RGBE quadruple: `(m + 0.5) · 2^(e − 136)`, black when `e == 0`.
#[inline]
pub fn rgbe_to_rgb(rgbe: [u8; 4]) -> [f64; 3] {
    if rgbe[3] == 0 {
        return [0.0; 3];
    }
    let f = (rgbe[3] as f64 - 136.0).exp2();
    [
        (rgbe[0] as f64 + 0.5) * f,
        (rgbe[1] as f64 + 0.5) * f,
        (rgbe[2] as f64 + 0.5) * f,
    ]
}

/// Encodes a linear triple with the shared exponent of its largest component.
pub fn rgb_to_rgbe(rgb: [f64; 3]) -> [u8; 4] {
    let max = rgb[0].max(rgb[1]).max(rgb[2]);
    if !(max > 1e-32) {
        return [0; 4];
    }
    let (mantissa, exp) = frexp(max);
    let scale = mantissa * 256.0 / max;
    let byte = |v: f64| (v.max(0.0) * scale).floor().min(255.0) as u8;
    [
        byte(rgb[0]),
        byte(rgb[1]),
        byte(rgb[2]),
        (exp + 128).clamp(0, 255) as u8,
    ]
}

/// `x = m · 2^e` with `m ∈ [0.5, 1)`.
fn frexp(x: f64) -> (f64, i32) {
    let mut e = x.log2().floor() as i32 + 1;
    let mut m = x / (e as f64).exp2();
    // log2 may land one off near powers of two
    if m >= 1.0 {
        m /= 2.0;
        e += 1;
    } else if m < 0.5 {
        m *= 2.0;
        e -= 1;
    }
    (m, e)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Option<&'a [u8]> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        let line = &rest[..end];
        Some(line.strip_suffix(b"\r").unwrap_or(line))
    }

    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let out = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(out)
    }

    fn byte(&mut self) -> Option<u8> {
        let b = *self.bytes.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    fn peek(&self, n: usize) -> Option<&'a [u8]> {
        self.bytes.get(self.pos..self.pos + n)
    }
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::MalformedHeader(msg.into())
}

struct Header {
    width: usize,
    height: usize,
    exposure: f64,
    space: ColorSpace,
}

fn parse_header(cur: &mut Cursor<'_>) -> Result<Header, FormatError> {
    let magic = cur.line().ok_or_else(|| malformed("empty stream"))?;
    let magic = std::str::from_utf8(magic).map_err(|_| malformed("non-ASCII magic"))?;
    if !(magic.starts_with("#?RADIANCE") || magic.starts_with("#?RGBE")) {
        return Err(malformed(format!(
            "missing #?RADIANCE / #?RGBE magic, found `{magic}`"
        )));
    }

    let mut exposure = 1.0;
    let mut space = ColorSpace::LinearRgb;
    loop {
        let line = cur
            .line()
            .ok_or_else(|| malformed("header not terminated by an empty line"))?;
        if line.is_empty() {
            break;
        }
        let line = String::from_utf8_lossy(line);
        if line.starts_with('#') {
            continue;
        }
        if let Some(fmt) = line.strip_prefix("FORMAT=") {
            space = match fmt.trim() {
                "32-bit_rle_rgbe" => ColorSpace::LinearRgb,
                "32-bit_rle_xyze" => ColorSpace::Xyz,
                other => return Err(FormatError::UnsupportedFormat(other.to_string())),
            };
        } else if let Some(v) = line.strip_prefix("EXPOSURE=") {
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad EXPOSURE value `{}`", v.trim())))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(malformed(format!("EXPOSURE must be positive, got {v}")));
            }
            exposure *= v;
        }
    }

    let res = cur
        .line()
        .ok_or_else(|| malformed("missing resolution line"))?;
    let res = String::from_utf8_lossy(res);
    let tokens: Vec<&str> = res.split_whitespace().collect();
    if tokens.len() != 4 {
        return Err(malformed(format!("bad resolution line `{res}`")));
    }
    if tokens[0] != "-Y" || tokens[2] != "+X" {
        return Err(FormatError::UnsupportedOrientation(res.trim().to_string()));
    }
    let dim = |s: &str| -> Result<usize, FormatError> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(malformed(format!("bad dimension `{s}`"))),
        }
    };
    Ok(Header {
        height: dim(tokens[1])?,
        width: dim(tokens[3])?,
        exposure,
        space,
    })
}

fn read_flat(cur: &mut Cursor<'_>, row: usize, out: &mut [[u8; 4]]) -> Result<(), FormatError> {
    let width = out.len();
    let mut x = 0;
    let mut shift = 0u32;
    while x < width {
        let px = cur.take(4).ok_or(FormatError::TruncatedScanline { row })?;
        let px = [px[0], px[1], px[2], px[3]];
        if px[0] == 1 && px[1] == 1 && px[2] == 1 {
            // old-style repeat of the previous pixel
            if x == 0 {
                return Err(malformed(format!(
                    "repeat marker at start of scanline {row}"
                )));
            }
            let count = (px[3] as usize)
                .checked_shl(shift)
                .ok_or(FormatError::RunOverrun { row })?;
            if x + count > width {
                return Err(FormatError::RunOverrun { row });
            }
            let prev = out[x - 1];
            out[x..x + count].fill(prev);
            x += count;
            shift += 8;
        } else {
            out[x] = px;
            x += 1;
            shift = 0;
        }
    }
    Ok(())
}

fn read_rle(cur: &mut Cursor<'_>, row: usize, out: &mut [[u8; 4]]) -> Result<(), FormatError> {
    let width = out.len();
    cur.take(4).ok_or(FormatError::TruncatedScanline { row })?;
    for c in 0..4 {
        let mut x = 0;
        while x < width {
            let code = cur.byte().ok_or(FormatError::TruncatedScanline { row })? as usize;
            if code > 128 {
                let n = code - 128;
                if x + n > width {
                    return Err(FormatError::RunOverrun { row });
                }
                let v = cur.byte().ok_or(FormatError::TruncatedScanline { row })?;
                for px in &mut out[x..x + n] {
                    px[c] = v;
                }
                x += n;
            } else {
                if code == 0 || x + code > width {
                    return Err(FormatError::RunOverrun { row });
                }
                let lit = cur
                    .take(code)
                    .ok_or(FormatError::TruncatedScanline { row })?;
                for (px, &v) in out[x..x + code].iter_mut().zip(lit) {
                    px[c] = v;
                }
                x += code;
            }
        }
    }
    Ok(())
}

/// Decodes a Radiance `.hdr` byte stream into a linear image.
pub fn read_radiance_hdr(bytes: &[u8]) -> Result<HdrImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let header = parse_header(&mut cur)?;
    let Header {
        width,
        height,
        exposure,
        space,
    } = header;

    let mut data = Vec::with_capacity(width * height * 3);
    let mut line = vec![[0u8; 4]; width];
    for row in 0..height {
        let is_rle = (MIN_RLE_WIDTH..=MAX_RLE_WIDTH).contains(&width)
            && matches!(cur.peek(4), Some(&[2, 2, hi, _]) if hi & 0x80 == 0);
        if is_rle {
            let p = cur.peek(4).unwrap();
            let encoded_width = ((p[2] as usize) << 8) | p[3] as usize;
            if encoded_width != width {
                return Err(malformed(format!(
                    "scanline {row} declares width {encoded_width}, expected {width}"
                ))
                .into());
            }
            read_rle(&mut cur, row, &mut line)?;
        } else {
            read_flat(&mut cur, row, &mut line)?;
        }
        for &px in &line {
            let rgb = rgbe_to_rgb(px);
            data.extend(rgb.iter().map(|v| v / exposure));
        }
    }
    HdrImage::new(width, height, data, space)
}

/// Scanline encoding used by [`write_radiance_hdr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scanlines {
    Flat,
    Rle,
}

/// Encodes an image as a Radiance `.hdr` stream.
pub fn write_radiance_hdr(img: &HdrImage, scanlines: Scanlines) -> Vec<u8> {
    let format = match img.space() {
        ColorSpace::LinearRgb => "32-bit_rle_rgbe",
        ColorSpace::Xyz => "32-bit_rle_xyze",
    };
    let mut out = format!(
        "#?RADIANCE\nFORMAT={format}\n\n-Y {} +X {}\n",
        img.height(),
        img.width()
    )
    .into_bytes();
    let width = img.width();
    let rle = scanlines == Scanlines::Rle && (MIN_RLE_WIDTH..=MAX_RLE_WIDTH).contains(&width);
    let mut line = Vec::with_capacity(width);
    for y in 0..img.height() {
        line.clear();
        line.extend((0..width).map(|x| rgb_to_rgbe(img.pixel(x, y))));
        if rle {
            out.extend_from_slice(&[2, 2, (width >> 8) as u8, (width & 0xff) as u8]);
            for c in 0..4 {
                let comp: Vec<u8> = line.iter().map(|p| p[c]).collect();
                encode_rle_component(&comp, &mut out);
            }
        } else {
            for px in &line {
                out.extend_from_slice(px);
            }
        }
    }
    out
}

fn encode_rle_component(data: &[u8], out: &mut Vec<u8>) {
    const MIN_RUN: usize = 4;
    let run_at = |i: usize| {
        let v = data[i];
        data[i..].iter().take(127).take_while(|&&b| b == v).count()
    };
    let mut i = 0;
    while i < data.len() {
        let run = run_at(i);
        if run >= MIN_RUN {
            out.push(128 + run as u8);
            out.push(data[i]);
            i += run;
            continue;
        }
        let start = i;
        while i < data.len() && i - start < 128 && run_at(i) < MIN_RUN {
            i += 1;
        }
        out.push((i - start) as u8);
        out.extend_from_slice(&data[start..i]);
    }
}
