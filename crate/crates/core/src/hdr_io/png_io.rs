//! 8-bit RGB PNG output (and read-back, used for round-trip checks).

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::SdrImage;

fn png_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Encodes an sRGB-tagged 8-bit RGB PNG into memory.
pub fn encode_png(img: &SdrImage) -> Result<Vec<u8>> {
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::InvalidImage(format!(
            "cannot encode a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_source_srgb(png::SrgbRenderingIntent::Perceptual);
        let mut writer = enc
            .write_header()
            .map_err(|e| png_err(Path::new("<memory>"), e))?;
        writer
            .write_image_data(img.data())
            .map_err(|e| png_err(Path::new("<memory>"), e))?;
        writer
            .finish()
            .map_err(|e| png_err(Path::new("<memory>"), e))?;
    }
    Ok(out)
}

/// Writes `img` to `path` atomically: the PNG is written to a sibling
/// temporary file which is then renamed over the destination.
pub fn write_sdr_png(img: &SdrImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_png(img).map_err(|e| match e {
        Error::Png { message, .. } => png_err(path, message),
        other => other,
    })?;
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut f = BufWriter::new(fs::File::create(&tmp)?);
        f.write_all(&bytes)?;
        f.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Reads an 8-bit RGB PNG.
pub fn read_sdr_png(path: impl AsRef<Path>) -> Result<SdrImage> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| png_err(path, e))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| png_err(path, "image too large"))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| png_err(path, e))?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(png_err(
            path,
            format!(
                "expected 8-bit RGB, got {:?} {:?}",
                info.color_type, info.bit_depth
            ),
        ));
    }
    buf.truncate(info.buffer_size());
    SdrImage::new(info.width as usize, info.height as usize, buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_red_pixel_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("red.png");
        let img = SdrImage::new(1, 1, vec![255, 0, 0]).unwrap();
        write_sdr_png(&img, &path).unwrap();
        assert_eq!(read_sdr_png(&path).unwrap().pixel(0, 0), [255, 0, 0]);
        assert!(!dir.path().join("red.png.tmp").exists());
    }

    #[test]
    fn gradient_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grad.png");
        let img = SdrImage::new(
            2,
            2,
            vec![0, 10, 20, 85, 95, 105, 170, 180, 190, 255, 254, 253],
        )
        .unwrap();
        write_sdr_png(&img, &path).unwrap();
        assert_eq!(read_sdr_png(&path).unwrap(), img);
    }

    #[test]
    fn zero_size_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let img = SdrImage::new(0, 0, vec![]).unwrap();
        assert!(write_sdr_png(&img, dir.path().join("empty.png")).is_err());
    }

    #[test]
    fn missing_directory_reports_path() {
        let img = SdrImage::new(1, 1, vec![1, 2, 3]).unwrap();
        let err = write_sdr_png(&img, "/nonexistent-dir/out.png").unwrap_err();
        assert!(
            err.to_string().contains("/nonexistent-dir/out.png"),
            "{err}"
        );
    }
}
