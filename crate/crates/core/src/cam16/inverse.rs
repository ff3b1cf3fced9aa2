use std::sync::OnceLock;

use rayon::prelude::*;

use crate::color::{ColorMatrix, CAT16};
use crate::error::{Error, Result};
use crate::image::{ColorSpace, HdrImage};

use super::{
    decompress_response, eccentricity, AppearanceImage, ColorfulnessScaling, DerivedConditions,
};

fn cat16_inverse() -> &'static ColorMatrix {
    static INV: OnceLock<ColorMatrix> = OnceLock::new();
    INV.get_or_init(|| CAT16.inverse().expect("CAT16 is invertible"))
}

/// XYZ for lightness `j`, colorfulness `m` and hue `h` (degrees). The second
/// value counts cone channels that had to be pulled inside the response
/// asymptote.
pub fn inverse_pixel(
    j: f64,
    m: f64,
    h: f64,
    dc: &DerivedConditions,
    scaling: ColorfulnessScaling,
) -> ([f64; 3], usize) {
    if j <= 0.0 {
        return ([0.0; 3], 0);
    }
    let c = m / scaling.factor(dc);
    let t = (c / ((j / 100.0).sqrt() * (1.64 - 0.29f64.powf(dc.n)).powf(0.73))).powf(1.0 / 0.9);
    let a_achromatic = dc.aw * (j / 100.0).powf(1.0 / (dc.surround.c * dc.z));
    let p2 = a_achromatic / dc.nbb + 0.305;
    let p3 = 21.0 / 20.0;

    let (a, b) = if t > 0.0 {
        let p1 = (50000.0 / 13.0) * dc.surround.nc * dc.ncb * eccentricity(h) / t;
        let (sin, cos) = h.to_radians().sin_cos();
        if sin.abs() >= cos.abs() {
            let p4 = p1 / sin;
            let b = p2 * (2.0 + p3) * (460.0 / 1403.0)
                / (p4 + (2.0 + p3) * (220.0 / 1403.0) * (cos / sin) - 27.0 / 1403.0
                    + p3 * (6300.0 / 1403.0));
            (b * cos / sin, b)
        } else {
            let p5 = p1 / cos;
            let a = p2 * (2.0 + p3) * (460.0 / 1403.0)
                / (p5 + (2.0 + p3) * (220.0 / 1403.0)
                    - (27.0 / 1403.0 - p3 * (6300.0 / 1403.0)) * (sin / cos));
            (a, a * sin / cos)
        }
    } else {
        (0.0, 0.0)
    };

    let ra = [
        (460.0 * p2 + 451.0 * a + 288.0 * b) / 1403.0,
        (460.0 * p2 - 891.0 * a - 261.0 * b) / 1403.0,
        (460.0 * p2 - 220.0 * a - 6300.0 * b) / 1403.0,
    ];
    let mut saturated = 0;
    let rgb = [0, 1, 2].map(|i| {
        let (rc, sat) = decompress_response(ra[i], dc.fl);
        saturated += sat as usize;
        rc / dc.d_rgb[i]
    });
    (cat16_inverse().apply(rgb), saturated)
}

/// Inverse model output. XYZ is display-relative (white at Y = 100);
/// negative components are floored at zero and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseOutput {
    pub image: HdrImage,
    pub saturated_channels: usize,
    pub negative_clamped: usize,
}

pub fn inverse_model(
    app: &AppearanceImage,
    dc_display: &DerivedConditions,
    scaling: ColorfulnessScaling,
) -> Result<InverseOutput> {
    let n = app.width * app.height;
    if app.j.len() != n || app.m.len() != n || app.h.len() != n {
        return Err(Error::InvalidImage(format!(
            "appearance maps do not match {}x{}",
            app.width, app.height
        )));
    }
    let mut data = vec![0.0; n * 3];
    let (saturated, negative) = data
        .par_chunks_mut(3)
        .enumerate()
        .map(|(i, out)| {
            let (xyz, sat) = inverse_pixel(app.j[i], app.m[i], app.h[i], dc_display, scaling);
            let mut neg = 0;
            for c in 0..3 {
                let v = xyz[c];
                if v < 0.0 || !v.is_finite() {
                    neg += 1;
                    out[c] = if v.is_finite() { 0.0 } else { f64::MAX };
                } else {
                    out[c] = v;
                }
            }
            (sat, neg)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let image = HdrImage::new(app.width, app.height, data, ColorSpace::Xyz)?;
    Ok(InverseOutput {
        image,
        saturated_channels: saturated,
        negative_clamped: negative,
    })
}
