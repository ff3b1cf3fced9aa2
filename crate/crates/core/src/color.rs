//! 3×3 color matrices and the fixed constants the operator needs.

use crate::error::{Error, Result};

/// Smallest determinant magnitude accepted as invertible.
pub const MIN_DETERMINANT: f64 = 1e-12;

/// A 3×3 linear map between tristimulus spaces, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorMatrix([[f64; 3]; 3]);

/// Linear sRGB (D65) to CIE XYZ, IEC 61966-2-1 coefficients.
pub const SRGB_TO_XYZ: ColorMatrix = ColorMatrix([
    [0.4124, 0.3576, 0.1805],
    [0.2126, 0.7152, 0.0722],
    [0.0193, 0.1192, 0.9505],
]);

/// CAT16 sharpened cone-response matrix (XYZ to RGB).
pub const CAT16: ColorMatrix = ColorMatrix([
    [0.401288, 0.650173, -0.051461],
    [-0.250268, 1.204414, 0.045854],
    [-0.002079, 0.048952, 0.953127],
]);

impl ColorMatrix {
    /// Builds a matrix, rejecting singular ones.
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self> {
        let m = ColorMatrix(rows);
        if !rows.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::param("matrix", "coefficients must be finite"));
        }
        if m.determinant().abs() <= MIN_DETERMINANT {
            return Err(Error::param("matrix", "matrix is singular"));
        }
        Ok(m)
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det.abs() <= MIN_DETERMINANT || !det.is_finite() {
            return Err(Error::param("matrix", "matrix is singular"));
        }
        let m = &self.0;
        let inv_det = 1.0 / det;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        Ok(ColorMatrix([
            [
                cof(1, 2, 1, 2) * inv_det,
                -cof(0, 2, 1, 2) * inv_det,
                cof(0, 1, 1, 2) * inv_det,
            ],
            [
                -cof(1, 2, 0, 2) * inv_det,
                cof(0, 2, 0, 2) * inv_det,
                -cof(0, 1, 0, 2) * inv_det,
            ],
            [
                cof(1, 2, 0, 1) * inv_det,
                -cof(0, 2, 0, 1) * inv_det,
                cof(0, 1, 0, 1) * inv_det,
            ],
        ]))
    }

    /// Image of RGB (1, 1, 1), i.e. the white point of an RGB→XYZ matrix.
    pub fn white(&self) -> [f64; 3] {
        self.apply([1.0, 1.0, 1.0])
    }
}

/// D65 white of the sRGB matrix scaled to Y = 100.
pub fn d65_white() -> [f64; 3] {
    let w = SRGB_TO_XYZ.white();
    [w[0] * 100.0 / w[1], 100.0, w[2] * 100.0 / w[1]]
}
