use crate::color::CAT16;
use crate::error::{Error, Result};

use super::compress_response;

/// Viewing-surround class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Surround {
    #[default]
    Average,
    Dim,
    Dark,
}

/// Surround constants: adaptation factor `F`, impact `c` and chromatic
/// induction `N_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurroundParams {
    pub f: f64,
    pub c: f64,
    pub nc: f64,
}

impl Surround {
    pub fn params(self) -> SurroundParams {
        let (f, c, nc) = match self {
            Surround::Average => (1.0, 0.69, 1.0),
            Surround::Dim => (0.9, 0.59, 0.9),
            Surround::Dark => (0.8, 0.525, 0.8),
        };
        SurroundParams { f, c, nc }
    }
}

impl std::str::FromStr for Surround {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "average" => Ok(Surround::Average),
            "dim" => Ok(Surround::Dim),
            "dark" => Ok(Surround::Dark),
            _ => Err(Error::param("surround", format!("unknown surround `{s}`"))),
        }
    }
}

/// Description of one viewing environment.
///
/// The reference white is normalized so that its Y is 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewingConditions {
    white: [f64; 3],
    adapting_luminance: f64,
    background: f64,
    surround: Surround,
}

impl ViewingConditions {
    /// `adapting_luminance` is `L_a` in cd/m², `background` is `Y_b` in
    /// (0, 100].
    pub fn new(
        white: [f64; 3],
        adapting_luminance: f64,
        background: f64,
        surround: Surround,
    ) -> Result<Self> {
        if !white.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::param(
                "white",
                format!("{white:?} must be positive and finite"),
            ));
        }
        if !(adapting_luminance > 0.0 && adapting_luminance.is_finite()) {
            return Err(Error::param(
                "adapting_luminance",
                format!("must be > 0, got {adapting_luminance}"),
            ));
        }
        if !(background > 0.0 && background <= 100.0) {
            return Err(Error::param(
                "background",
                format!("Y_b must lie in (0, 100], got {background}"),
            ));
        }
        let s = 100.0 / white[1];
        Ok(ViewingConditions {
            white: [white[0] * s, 100.0, white[2] * s],
            adapting_luminance,
            background,
            surround,
        })
    }

    /// Conditions for a white of absolute luminance `white_luminance`
    /// (cd/m²), with `L_a = L_w · Y_b / 100`.
    pub fn from_white_luminance(
        white: [f64; 3],
        white_luminance: f64,
        background: f64,
        surround: Surround,
    ) -> Result<Self> {
        Self::new(
            white,
            white_luminance * background / 100.0,
            background,
            surround,
        )
    }

    pub fn white(&self) -> [f64; 3] {
        self.white
    }

    pub fn adapting_luminance(&self) -> f64 {
        self.adapting_luminance
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn surround(&self) -> Surround {
        self.surround
    }
}

/// Every CIECAM16 quantity that depends only on the viewing conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConditions {
    pub surround: SurroundParams,
    pub white: [f64; 3],
    /// Degree of adaptation, clamped to [0, 1].
    pub d: f64,
    /// Per-channel von Kries gains `D·Y_w/R_w + 1 − D`.
    pub d_rgb: [f64; 3],
    /// Luminance-level adaptation factor `F_L`.
    pub fl: f64,
    /// `F_L^0.25`, used by brightness and colorfulness.
    pub fl_root4: f64,
    /// Background induction factor `Y_b / Y_w`.
    pub n: f64,
    pub z: f64,
    pub nbb: f64,
    pub ncb: f64,
    /// Post-adaptation cone responses of the white.
    pub rgb_aw: [f64; 3],
    /// Achromatic response of the white.
    pub aw: f64,
}

/// Degree of adaptation `F·[1 − (1/3.6)·exp((−L_a − 42)/92)]`, clamped to [0, 1].
pub fn degree_of_adaptation(f: f64, la: f64) -> f64 {
    (f * (1.0 - (1.0 / 3.6) * ((-la - 42.0) / 92.0).exp())).clamp(0.0, 1.0)
}

/// `F_L = 0.2k⁴(5L_a) + 0.1(1 − k⁴)²(5L_a)^(1/3)` with `k = 1/(5L_a + 1)`.
pub fn luminance_adaptation(la: f64) -> f64 {
    let k = 1.0 / (5.0 * la + 1.0);
    let k4 = k.powi(4);
    0.2 * k4 * (5.0 * la) + 0.1 * (1.0 - k4).powi(2) * (5.0 * la).cbrt()
}

pub fn derive_conditions(vc: &ViewingConditions) -> Result<DerivedConditions> {
    let surround = vc.surround.params();
    let white = vc.white;
    let yw = white[1];
    let n = vc.background / yw;
    if !(n > 0.0 && n <= 1.0) {
        return Err(Error::param(
            "background",
            format!("n = Y_b/Y_w = {n} outside (0, 1]"),
        ));
    }
    let la = vc.adapting_luminance;
    let d = degree_of_adaptation(surround.f, la);
    let rgb_w = CAT16.apply(white);
    if rgb_w.iter().any(|v| *v <= 0.0) {
        return Err(Error::param(
            "white",
            "white has a non-positive cone response",
        ));
    }
    let d_rgb = rgb_w.map(|r| d * yw / r + 1.0 - d);
    let fl = luminance_adaptation(la);
    let z = 1.48 + n.sqrt();
    let nbb = 0.725 * (1.0 / n).powf(0.2);
    let rgb_aw = [0, 1, 2].map(|i| compress_response(d_rgb[i] * rgb_w[i], fl));
    let aw = (2.0 * rgb_aw[0] + rgb_aw[1] + 0.05 * rgb_aw[2] - 0.305) * nbb;
    Ok(DerivedConditions {
        surround,
        white,
        d,
        d_rgb,
        fl,
        fl_root4: fl.powf(0.25),
        n,
        z,
        nbb,
        ncb: nbb,
        rgb_aw,
        aw,
    })
}
