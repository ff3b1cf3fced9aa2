//! CIECAM16 machinery: viewing-condition constants, per-pixel brightness and
//! hue, display-adapted colorfulness, and the inverse model.
//!
//! All image-level operations are pure per-pixel maps over a precomputed
//! [`DerivedConditions`] and run on the current rayon pool.

mod conditions;
mod inverse;

pub use conditions::{
    degree_of_adaptation, derive_conditions, luminance_adaptation, DerivedConditions, Surround,
    SurroundParams, ViewingConditions,
};
pub use inverse::{inverse_model, inverse_pixel, InverseOutput};

use rayon::prelude::*;

use crate::color::CAT16;
use crate::error::{Error, Result};
use crate::image::{ColorSpace, HdrImage};

/// Largest post-adaptation response magnitude above the 0.1 offset.
pub const RESPONSE_CEILING: f64 = 400.0;

/// Compressive cone nonlinearity, mirrored for negative inputs:
/// `±400·x^0.42/(x^0.42 + 27.13) + 0.1` with `x = F_L·|R_c|/100`.
#[inline]
pub fn compress_response(rc: f64, fl: f64) -> f64 {
    let p = (fl * rc.abs() / 100.0).powf(0.42);
    (RESPONSE_CEILING * p / (p + 27.13)).copysign(rc) + 0.1
}

/// Inverse of [`compress_response`]. Responses at or beyond the asymptote
/// are pulled just inside it; the flag reports when that happened.
#[inline]
pub fn decompress_response(ra: f64, fl: f64) -> (f64, bool) {
    const LIMIT: f64 = RESPONSE_CEILING * (1.0 - 1e-9);
    let x = ra - 0.1;
    let (mag, saturated) = if x.abs() >= LIMIT {
        (LIMIT, true)
    } else {
        (x.abs(), false)
    };
    let rc = (100.0 / fl) * (27.13 * mag / (RESPONSE_CEILING - mag)).powf(1.0 / 0.42);
    (rc.copysign(x), saturated)
}

/// Post-adaptation cone responses, one triple per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedResponses {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f64; 3]>,
}

impl AdaptedResponses {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// CAT16 transform, von Kries gains and the compressive nonlinearity for one
/// XYZ triple (white at Y = 100).
#[inline]
pub fn adapt_pixel(xyz: [f64; 3], dc: &DerivedConditions) -> [f64; 3] {
    let rgb = CAT16.apply(xyz);
    [0, 1, 2].map(|i| compress_response(dc.d_rgb[i] * rgb[i], dc.fl))
}

pub fn adapt_responses(xyz: &HdrImage, dc: &DerivedConditions) -> Result<AdaptedResponses> {
    xyz.expect_space(ColorSpace::Xyz)?;
    let data = xyz
        .data()
        .par_chunks(3)
        .map(|p| adapt_pixel([p[0], p[1], p[2]], dc))
        .collect();
    Ok(AdaptedResponses {
        width: xyz.width(),
        height: xyz.height(),
        data,
    })
}

/// Achromatic response `A = (2R_a + G_a + 0.05B_a − 0.305)·N_bb`.
#[inline]
pub fn achromatic_response(ra: [f64; 3], dc: &DerivedConditions) -> f64 {
    (2.0 * ra[0] + ra[1] + 0.05 * ra[2] - 0.305) * dc.nbb
}

/// Lightness `J = 100·(A/A_w)^(c·z)`; `None` when `A` is negative.
#[inline]
pub fn lightness(a: f64, dc: &DerivedConditions) -> Option<f64> {
    if a < 0.0 {
        return None;
    }
    Some(100.0 * (a / dc.aw).powf(dc.surround.c * dc.z))
}

/// Brightness `Q = (4/c)·√(J/100)·(A_w + 4)·F_L^0.25`.
#[inline]
pub fn brightness(j: f64, dc: &DerivedConditions) -> f64 {
    (4.0 / dc.surround.c) * (j / 100.0).sqrt() * (dc.aw + 4.0) * dc.fl_root4
}

/// Brightness of the reference white, `J = 100`.
pub fn white_brightness(dc: &DerivedConditions) -> f64 {
    brightness(100.0, dc)
}

/// Per-pixel brightness map and the number of pixels whose achromatic
/// response went negative (their lightness is taken as 0).
#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessMap {
    pub q: Vec<f64>,
    pub negative_achromatic: usize,
}

pub fn brightness_forward(
    xyz: &HdrImage,
    dc: &DerivedConditions,
) -> Result<(BrightnessMap, AdaptedResponses)> {
    let responses = adapt_responses(xyz, dc)?;
    let (q, negative): (Vec<f64>, Vec<bool>) = responses
        .data
        .par_iter()
        .map(|ra| match lightness(achromatic_response(*ra, dc), dc) {
            Some(j) => (brightness(j, dc), false),
            None => (0.0, true),
        })
        .unzip();
    let negative_achromatic = negative.iter().filter(|n| **n).count();
    Ok((
        BrightnessMap {
            q,
            negative_achromatic,
        },
        responses,
    ))
}

/// Opponent coordinates `a = R_a − 12G_a/11 + B_a/11`, `b = (R_a + G_a − 2B_a)/9`,
/// arranged so that equal responses give exactly zero.
#[inline]
pub fn opponent(ra: [f64; 3]) -> (f64, f64) {
    let a = (ra[0] - ra[1]) - (ra[1] - ra[2]) / 11.0;
    let b = ((ra[0] - ra[2]) + (ra[1] - ra[2])) / 9.0;
    (a, b)
}

/// Hue angle in degrees on [0, 360); 0 for achromatic responses.
#[inline]
pub fn hue_angle(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a).to_degrees();
    let h = if h < 0.0 { h + 360.0 } else { h };
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

pub fn hue_forward(ar: &AdaptedResponses) -> Vec<f64> {
    ar.data
        .par_iter()
        .map(|ra| {
            let (a, b) = opponent(*ra);
            hue_angle(a, b)
        })
        .collect()
}

/// Inverse of the brightness correlate: `J = 6.25·[c·Q/((A_w + 4)·F_L^0.25)]²`.
#[inline]
pub fn lightness_from_brightness_pixel(q: f64, dc: &DerivedConditions) -> f64 {
    6.25 * (dc.surround.c * q / ((dc.aw + 4.0) * dc.fl_root4)).powi(2)
}

pub fn lightness_from_brightness(q_c: &[f64], dc: &DerivedConditions) -> Vec<f64> {
    q_c.par_iter()
        .map(|&q| lightness_from_brightness_pixel(q, dc))
        .collect()
}

/// Eccentricity factor `e_t = ¼[cos(h·π/180 + 2) + 3.8]`.
#[inline]
pub fn eccentricity(h: f64) -> f64 {
    0.25 * ((h.to_radians() + 2.0).cos() + 3.8)
}

/// How colorfulness is obtained from chroma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorfulnessScaling {
    /// `M = C·F_L^0.25`, consistent with the inverse model.
    #[default]
    Standard,
    /// `M = C·F_L`, the literal printed form; kept for comparison renders.
    StrictPaper,
}

impl ColorfulnessScaling {
    #[inline]
    pub fn factor(self, dc: &DerivedConditions) -> f64 {
        match self {
            ColorfulnessScaling::Standard => dc.fl_root4,
            ColorfulnessScaling::StrictPaper => dc.fl,
        }
    }
}

/// `t` of the chroma correlate. `None` when the response denominator is not
/// positive.
#[inline]
pub fn chroma_magnitude(ra: [f64; 3], h: f64, dc: &DerivedConditions) -> Option<f64> {
    let (a, b) = opponent(ra);
    let denom = ra[0] + ra[1] + (21.0 / 20.0) * ra[2];
    if denom <= 0.0 {
        return None;
    }
    Some((50000.0 / 13.0) * dc.surround.nc * dc.ncb * eccentricity(h) * a.hypot(b) / denom)
}

/// Chroma `C = t^0.9·(J/100)^0.5·(1.64 − 0.29^n)^0.73`.
#[inline]
pub fn chroma(t: f64, j: f64, dc: &DerivedConditions) -> f64 {
    t.powf(0.9) * (j / 100.0).sqrt() * (1.64 - 0.29f64.powf(dc.n)).powf(0.73)
}

/// Colorfulness map and the count of pixels that fell back to `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorfulnessMap {
    pub m: Vec<f64>,
    pub achromatic_fallbacks: usize,
}

/// Colorfulness of the tone-compressed image: responses and hue come from
/// the HDR adaptation, `N_c`, `N_cb`, `n` and `F_L` from the display.
pub fn colorfulness_forward(
    ar_hdr: &AdaptedResponses,
    h: &[f64],
    j_c: &[f64],
    dc_display: &DerivedConditions,
    scaling: ColorfulnessScaling,
) -> Result<ColorfulnessMap> {
    if h.len() != ar_hdr.len() || j_c.len() != ar_hdr.len() {
        return Err(Error::InvalidImage(format!(
            "map sizes disagree: {} responses, {} hues, {} lightnesses",
            ar_hdr.len(),
            h.len(),
            j_c.len()
        )));
    }
    let factor = scaling.factor(dc_display);
    let (m, fallback): (Vec<f64>, Vec<bool>) = ar_hdr
        .data
        .par_iter()
        .zip(h.par_iter())
        .zip(j_c.par_iter())
        .map(
            |((ra, &h), &j)| match chroma_magnitude(*ra, h, dc_display) {
                Some(t) => (chroma(t, j, dc_display) * factor, false),
                None => (0.0, true),
            },
        )
        .unzip();
    Ok(ColorfulnessMap {
        m,
        achromatic_fallbacks: fallback.iter().filter(|f| **f).count(),
    })
}

/// Appearance correlates of one stimulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Appearance {
    pub j: f64,
    pub q: f64,
    pub c: f64,
    pub m: f64,
    pub h: f64,
}

/// Full forward model for one XYZ triple under a single set of conditions.
pub fn forward_pixel(xyz: [f64; 3], dc: &DerivedConditions) -> Appearance {
    let ra = adapt_pixel(xyz, dc);
    let j = lightness(achromatic_response(ra, dc), dc).unwrap_or(0.0);
    let (a, b) = opponent(ra);
    let h = hue_angle(a, b);
    let t = chroma_magnitude(ra, h, dc).unwrap_or(0.0);
    let c = chroma(t, j, dc);
    Appearance {
        j,
        q: brightness(j, dc),
        c,
        m: c * dc.fl_root4,
        h,
    }
}

/// Per-pixel correlates handed to the inverse model.
#[derive(Debug, Clone, PartialEq)]
pub struct AppearanceImage {
    pub width: usize,
    pub height: usize,
    /// Compressed brightness `Q_c`.
    pub q: Vec<f64>,
    /// Lightness `J_c` derived from `Q_c` under the display conditions.
    pub j: Vec<f64>,
    /// Colorfulness `M_c`.
    pub m: Vec<f64>,
    /// Hue angle in degrees, [0, 360).
    pub h: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conditions() -> DerivedConditions {
        let vc = ViewingConditions::new([95.05, 100.0, 108.88], 318.31, 20.0, Surround::Average)
            .unwrap();
        derive_conditions(&vc).unwrap()
    }

    #[test]
    fn white_reproduces_white_responses() {
        let dc = conditions();
        let ra = adapt_pixel(dc.white, &dc);
        for c in 0..3 {
            assert!((ra[c] - dc.rgb_aw[c]).abs() < 1e-12);
        }
        let app = forward_pixel(dc.white, &dc);
        assert!((app.j - 100.0).abs() < 1e-9);
        let expected_q = (4.0 / 0.69) * (dc.aw + 4.0) * dc.fl.powf(0.25);
        assert!((app.q - expected_q).abs() < 1e-9);
    }

    #[test]
    fn black_gives_offset_responses() {
        let dc = conditions();
        assert_eq!(adapt_pixel([0.0; 3], &dc), [0.1, 0.1, 0.1]);
        // A of black is 0 up to rounding, so J and Q vanish
        let a0 = achromatic_response([0.1; 3], &dc);
        let j0 = lightness(a0, &dc).unwrap_or(0.0);
        let q0 = (4.0 / 0.69) * (j0 / 100.0).sqrt() * (dc.aw + 4.0) * dc.fl.powf(0.25);
        assert_eq!(forward_pixel([0.0; 3], &dc).q, q0);
        assert!(q0 < 1e-6);
    }

    #[test]
    fn nonlinearity_is_odd_about_offset() {
        for v in [1e-6, 0.3, 12.0, 500.0, 1e7] {
            let pos = compress_response(v, 1.2) - 0.1;
            let neg = compress_response(-v, 1.2) - 0.1;
            assert_eq!(pos, -neg);
            assert!(pos < 400.0);
        }
    }

    #[test]
    fn nonlinearity_inverts() {
        for v in [-250.0, -1.0, 0.0, 1e-3, 1.0, 95.0, 3000.0] {
            let (back, sat) = decompress_response(compress_response(v, 0.8), 0.8);
            assert!(!sat);
            assert!((back - v).abs() <= 1e-9 * v.abs().max(1.0), "{v} -> {back}");
        }
        let (huge, sat) = decompress_response(401.0, 1.0);
        assert!(sat && huge.is_finite());
    }

    #[test]
    fn hue_conventions() {
        assert_eq!(opponent([3.0, 3.0, 3.0]), (0.0, 0.0));
        assert_eq!(hue_angle(0.0, 0.0), 0.0);
        assert_eq!(hue_angle(1.0, 0.0), 0.0);
        assert_eq!(hue_angle(0.0, 1.0), 90.0);
        assert!((hue_angle(1.0, -1e-3) - 359.94).abs() < 0.01);
    }

    #[test]
    fn lightness_brightness_inverse_pair() {
        let dc = conditions();
        let q50 = brightness(50.0, &dc);
        assert!((lightness_from_brightness_pixel(q50, &dc) - 50.0).abs() < 1e-9);
        assert_eq!(lightness_from_brightness_pixel(0.0, &dc), 0.0);
        let qw = (4.0 / dc.surround.c) * (dc.aw + 4.0) * dc.fl_root4;
        assert!((lightness_from_brightness_pixel(qw, &dc) - 100.0).abs() < 1e-9);
    }

    fn responses(data: Vec<[f64; 3]>) -> AdaptedResponses {
        AdaptedResponses {
            width: data.len(),
            height: 1,
            data,
        }
    }

    #[test]
    fn achromatic_and_black_have_no_colorfulness() {
        let dc = conditions();
        let ar = responses(vec![[5.0, 5.0, 5.0], [9.0, 4.0, 2.0]]);
        let h = hue_forward(&ar);
        let out = colorfulness_forward(&ar, &h, &[60.0, 0.0], &dc, ColorfulnessScaling::Standard)
            .unwrap();
        assert_eq!(out.m, vec![0.0, 0.0]);
        assert_eq!(out.achromatic_fallbacks, 0);
    }

    #[test]
    fn nonpositive_denominator_falls_back() {
        let dc = conditions();
        let ar = responses(vec![[-3.0, -2.0, 1.0]]);
        let out = colorfulness_forward(&ar, &[10.0], &[50.0], &dc, ColorfulnessScaling::Standard)
            .unwrap();
        assert_eq!(out.m, vec![0.0]);
        assert_eq!(out.achromatic_fallbacks, 1);
    }

    #[test]
    fn strict_scaling_uses_full_fl() {
        let dc = conditions();
        let ar = responses(vec![[9.0, 4.0, 2.0]]);
        let h = hue_forward(&ar);
        let std =
            colorfulness_forward(&ar, &h, &[50.0], &dc, ColorfulnessScaling::Standard).unwrap();
        let strict =
            colorfulness_forward(&ar, &h, &[50.0], &dc, ColorfulnessScaling::StrictPaper).unwrap();
        assert!((strict.m[0] / std.m[0] - dc.fl / dc.fl_root4).abs() < 1e-12);
    }

    #[test]
    fn mismatched_maps_rejected() {
        let dc = conditions();
        let ar = responses(vec![[1.0, 1.0, 1.0]]);
        assert!(
            colorfulness_forward(&ar, &[], &[1.0], &dc, ColorfulnessScaling::Standard).is_err()
        );
    }
}
