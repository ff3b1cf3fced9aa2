use std::time::Instant;

use crate::bilateral::{
    decompose, decompose_fast, default_sigma_s, BrightnessDecomposition, DEFAULT_SIGMA_R,
    DEFAULT_SIGMA_S_FRACTION,
};
use crate::cam16::{
    brightness_forward, colorfulness_forward, derive_conditions, hue_forward, inverse_model,
    lightness_from_brightness, AppearanceImage, ColorfulnessScaling, Surround, ViewingConditions,
};
use crate::color::d65_white;
use crate::error::{Error, Result, Stage};
use crate::hdr_io::ensure_xyz;
use crate::image::{ColorSpace, HdrImage, SdrImage};

use super::display::{encode_display, DisplayModel};
use super::glare::simulate_glare;
use super::key::{image_key, nearest_rank, KeyStats};
use super::ops::{compress_base, enhance_detail, recombine, to_linear};
use super::params::ToneParams;
use super::report::RunReport;

/// Radiance luminous efficacy, lm/W.
pub const RADIANCE_EFFICACY: f64 = 179.0;
/// Percentile of the HDR luminance taken as the scene white.
pub const WHITE_PERCENTILE: f64 = 99.0;

/// Everything the pipeline needs besides the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub tone: ToneParams,
    /// Scene white chromaticity; scaled to the white luminance at run time.
    pub hdr_white: [f64; 3],
    /// Absolute scene white luminance in cd/m². `None` uses
    /// `luminance_scale` times the 99th-percentile input luminance.
    pub hdr_white_luminance: Option<f64>,
    /// Input units to cd/m².
    pub luminance_scale: f64,
    pub hdr_background: f64,
    pub hdr_surround: Surround,
    pub display: DisplayModel,
    pub display_background: f64,
    /// Absolute display adapting luminance; when set it replaces
    /// `display_background` with `100·L_a/peak`.
    pub display_adapting_luminance: Option<f64>,
    pub display_surround: Surround,
    pub sigma_s_fraction: f64,
    /// Absolute spatial sigma in pixels, overriding `sigma_s_fraction`.
    pub sigma_s: Option<f64>,
    pub sigma_r: f64,
    pub fast_bilateral: bool,
    pub colorfulness: ColorfulnessScaling,
    /// Size of the thread pool; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tone: ToneParams::default(),
            hdr_white: d65_white(),
            hdr_white_luminance: None,
            luminance_scale: RADIANCE_EFFICACY,
            hdr_background: 20.0,
            hdr_surround: Surround::Average,
            display: DisplayModel::default(),
            display_background: 20.0,
            display_adapting_luminance: None,
            display_surround: Surround::Average,
            sigma_s_fraction: DEFAULT_SIGMA_S_FRACTION,
            sigma_s: None,
            sigma_r: DEFAULT_SIGMA_R,
            fast_bilateral: false,
            colorfulness: ColorfulnessScaling::Standard,
            workers: None,
        }
    }
}

impl PipelineConfig {
    /// Display adapted to a 0.2 cd/m² background.
    pub fn paper_experiment() -> Self {
        PipelineConfig {
            display_adapting_luminance: Some(0.2),
            ..Default::default()
        }
    }

    /// `Y_b` of the display conditions.
    pub fn display_yb(&self) -> f64 {
        match self.display_adapting_luminance {
            Some(la) => 100.0 * la / self.display.peak_luminance,
            None => self.display_background,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tone.validate()?;
        self.display.validate()?;
        if !(self.luminance_scale > 0.0 && self.luminance_scale.is_finite()) {
            return Err(Error::param(
                "luminance_scale",
                format!("must be > 0, got {}", self.luminance_scale),
            ));
        }
        if let Some(l) = self.hdr_white_luminance {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::param(
                    "hdr_white_luminance",
                    format!("must be > 0, got {l}"),
                ));
            }
        }
        if !(self.sigma_s_fraction > 0.0 && self.sigma_s_fraction.is_finite()) {
            return Err(Error::param(
                "sigma_s_fraction",
                format!("must be > 0, got {}", self.sigma_s_fraction),
            ));
        }
        if let Some(s) = self.sigma_s {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::param("sigma_s", format!("must be > 0, got {s}")));
            }
        }
        if !(self.sigma_r > 0.0 && self.sigma_r.is_finite()) {
            return Err(Error::param(
                "sigma_r",
                format!("must be > 0, got {}", self.sigma_r),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", "must be at least 1"));
        }
        ViewingConditions::new(self.hdr_white, 1.0, self.hdr_background, self.hdr_surround)?;
        ViewingConditions::new(
            self.display.white(),
            1.0,
            self.display_yb(),
            self.display_surround,
        )?;
        Ok(())
    }

    pub fn sigma_s_for(&self, width: usize, height: usize) -> f64 {
        self.sigma_s
            .unwrap_or_else(|| default_sigma_s(width, height, self.sigma_s_fraction))
    }
}

/// Intermediate results of one run.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    /// Input XYZ scaled so the scene white has Y = 100.
    pub xyz: HdrImage,
    /// Brightness `Q` under the scene conditions.
    pub brightness: Vec<f64>,
    pub decomposition: BrightnessDecomposition,
    pub key: KeyStats,
    pub gamma: f64,
    /// `I_c`.
    pub compressed_base: Vec<f64>,
    /// `D_E`, linear.
    pub enhanced_detail: Vec<f64>,
    /// `Q_c`.
    pub compressed_brightness: Vec<f64>,
    pub appearance: AppearanceImage,
    /// Inverse-model output before glare, display-relative.
    pub display_xyz: HdrImage,
    /// After glare clipping and rescaling.
    pub glare_xyz: HdrImage,
    pub sdr: SdrImage,
    pub report: RunReport,
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

struct Clock {
    last: Instant,
    timings: Vec<(Stage, f64)>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            last: Instant::now(),
            timings: Vec::new(),
        }
    }

    fn lap(&mut self, stage: Stage) {
        let now = Instant::now();
        self.timings
            .push((stage, (now - self.last).as_secs_f64() * 1e3));
        self.last = now;
    }
}

/// Runs the full operator and keeps every intermediate map.
pub fn tonemap_trace(hdr: &HdrImage, cfg: &PipelineConfig) -> Result<PipelineTrace> {
    cfg.validate()?;
    with_workers(cfg.workers, || run(hdr, cfg))?
}

/// Tone maps `hdr` to an 8-bit display image.
///
/// An all-black input produces an all-black output.
pub fn tonemap_pipeline(hdr: &HdrImage, cfg: &PipelineConfig) -> Result<(SdrImage, RunReport)> {
    cfg.validate()?;
    if hdr.data().iter().all(|v| *v == 0.0) {
        let sdr = SdrImage::new(hdr.width(), hdr.height(), vec![0; hdr.data().len()])?;
        let report = RunReport {
            width: hdr.width(),
            height: hdr.height(),
            key: image_key(
                &[0.0],
                cfg.tone.delta,
                cfg.tone.key_convention,
                cfg.tone.key_extrema,
            )?,
            key_convention: cfg.tone.key_convention,
            gamma: cfg.tone.gamma.unwrap_or(cfg.tone.gamma_for_key(0.18)),
            gamma_auto: cfg.tone.gamma.is_none(),
            beta: cfg.tone.beta,
            ..Default::default()
        };
        return Ok((sdr, report));
    }
    let trace = tonemap_trace(hdr, cfg)?;
    Ok((trace.sdr, trace.report))
}

fn run(hdr: &HdrImage, cfg: &PipelineConfig) -> Result<PipelineTrace> {
    let (w, h) = (hdr.width(), hdr.height());
    let mut clock = Clock::new();

    let converted = ensure_xyz(hdr);
    let luminance: Vec<f64> = converted
        .image
        .data()
        .chunks_exact(3)
        .map(|p| p[1])
        .collect();
    clock.lap(Stage::ColorConversion);

    let (hdr_dc, display_dc, xyz, white_luminance) = {
        let mut sorted = luminance.clone();
        sorted.sort_by(f64::total_cmp);
        let mut y_ref = nearest_rank(&sorted, WHITE_PERCENTILE);
        if y_ref <= 0.0 {
            y_ref = sorted[sorted.len() - 1];
        }
        if y_ref <= 0.0 {
            return Err(Error::InvalidImage("image is black".into()).at(Stage::ViewingConditions));
        }
        let gain = 100.0 / y_ref;
        let data = converted.image.data().iter().map(|v| v * gain).collect();
        let xyz = HdrImage::new(w, h, data, ColorSpace::Xyz)
            .map_err(|e| e.at(Stage::ViewingConditions))?;
        let lw = cfg
            .hdr_white_luminance
            .unwrap_or(cfg.luminance_scale * y_ref);
        let conditions = || -> Result<_> {
            let hdr_vc = ViewingConditions::from_white_luminance(
                cfg.hdr_white,
                lw,
                cfg.hdr_background,
                cfg.hdr_surround,
            )?;
            let display_vc = ViewingConditions::from_white_luminance(
                cfg.display.white(),
                cfg.display.peak_luminance,
                cfg.display_yb(),
                cfg.display_surround,
            )?;
            Ok((derive_conditions(&hdr_vc)?, derive_conditions(&display_vc)?))
        };
        let (hdr_dc, display_dc) = conditions().map_err(|e| e.at(Stage::ViewingConditions))?;
        (hdr_dc, display_dc, xyz, lw)
    };
    clock.lap(Stage::ViewingConditions);

    let (bmap, responses) =
        brightness_forward(&xyz, &hdr_dc).map_err(|e| e.at(Stage::Brightness))?;
    clock.lap(Stage::Brightness);

    let sigma_s = cfg.sigma_s_for(w, h);
    let split = if cfg.fast_bilateral {
        decompose_fast
    } else {
        decompose
    };
    let dec = split(&bmap.q, w, h, sigma_s, cfg.sigma_r).map_err(|e| e.at(Stage::Decomposition))?;
    clock.lap(Stage::Decomposition);

    let tone = &cfg.tone;
    let key = image_key(
        &luminance,
        tone.delta,
        tone.key_convention,
        tone.key_extrema,
    )
    .map_err(|e| e.at(Stage::KeyEstimation))?;
    let gamma = tone.gamma.unwrap_or_else(|| tone.gamma_for_key(key.k));
    clock.lap(Stage::KeyEstimation);

    let i_c = compress_base(&to_linear(&dec.base), gamma, tone.scale);
    let d_e = enhance_detail(&to_linear(&dec.detail), tone.beta);
    let q_c = recombine(&i_c, &d_e, dec.q_max);
    clock.lap(Stage::ToneCompression);

    let hue = hue_forward(&responses);
    let j_c = lightness_from_brightness(&q_c, &display_dc);
    let colorfulness = colorfulness_forward(&responses, &hue, &j_c, &display_dc, cfg.colorfulness)
        .map_err(|e| e.at(Stage::Appearance))?;
    let appearance = AppearanceImage {
        width: w,
        height: h,
        q: q_c.clone(),
        j: j_c,
        m: colorfulness.m,
        h: hue,
    };
    clock.lap(Stage::Appearance);

    let inverse = inverse_model(&appearance, &display_dc, cfg.colorfulness)
        .map_err(|e| e.at(Stage::InverseModel))?;
    clock.lap(Stage::InverseModel);

    let glare =
        simulate_glare(&inverse.image, tone.glare_fraction).map_err(|e| e.at(Stage::Glare))?;
    clock.lap(Stage::Glare);

    let encoded =
        encode_display(&glare.image, &cfg.display).map_err(|e| e.at(Stage::DisplayEncoding))?;
    clock.lap(Stage::DisplayEncoding);

    let report = RunReport {
        width: w,
        height: h,
        key,
        key_convention: tone.key_convention,
        gamma,
        gamma_auto: tone.gamma.is_none(),
        beta: tone.beta,
        q_max: dec.q_max,
        sigma_s,
        sigma_r: cfg.sigma_r,
        hdr_white_luminance: white_luminance,
        hdr_adapting_luminance: white_luminance * cfg.hdr_background / 100.0,
        display_adapting_luminance: cfg.display.peak_luminance * cfg.display_yb() / 100.0,
        input_clamped: converted.clamped,
        negative_achromatic: bmap.negative_achromatic,
        achromatic_fallbacks: colorfulness.achromatic_fallbacks,
        inverse_saturated: inverse.saturated_channels,
        inverse_negative: inverse.negative_clamped,
        glare_clipped: glare.clipped,
        glare_threshold: glare.threshold,
        gamut_clamped: encoded.gamut_clamped,
        timings: clock.timings,
    };
    Ok(PipelineTrace {
        xyz,
        brightness: bmap.q,
        decomposition: dec,
        key,
        gamma,
        compressed_base: i_c,
        enhanced_detail: d_e,
        compressed_brightness: q_c,
        appearance,
        display_xyz: inverse.image,
        glare_xyz: glare.image,
        sdr: encoded.image,
        report,
    })
}
