use std::fmt::Write as _;

use crate::error::Stage;

use super::key::KeyStats;
use super::params::KeyConvention;

/// Summary of one pipeline run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub width: usize,
    pub height: usize,
    pub key: KeyStats,
    pub key_convention: KeyConvention,
    pub gamma: f64,
    /// True when gamma was predicted from the key rather than overridden.
    pub gamma_auto: bool,
    pub beta: f64,
    pub q_max: f64,
    pub sigma_s: f64,
    pub sigma_r: f64,
    pub hdr_white_luminance: f64,
    pub hdr_adapting_luminance: f64,
    pub display_adapting_luminance: f64,
    /// Negative linear samples zeroed during color conversion.
    pub input_clamped: usize,
    pub negative_achromatic: usize,
    pub achromatic_fallbacks: usize,
    pub inverse_saturated: usize,
    pub inverse_negative: usize,
    pub glare_clipped: usize,
    pub glare_threshold: f64,
    pub gamut_clamped: usize,
    /// Wall time per stage in milliseconds, in pipeline order.
    pub timings: Vec<(Stage, f64)>,
}

impl RunReport {
    fn fields(&self) -> Vec<(String, String)> {
        let mut f: Vec<(String, String)> = vec![
            ("width".into(), self.width.to_string()),
            ("height".into(), self.height.to_string()),
            ("key".into(), self.key.k.to_string()),
            ("key_convention".into(), self.key_convention.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("gamma_auto".into(), self.gamma_auto.to_string()),
            ("beta".into(), self.beta.to_string()),
            ("G_L".into(), self.key.g_l.to_string()),
            ("C_L".into(), self.key.c_l.to_string()),
            ("Y_min".into(), self.key.y_min.to_string()),
            ("Y_max".into(), self.key.y_max.to_string()),
            ("Q_max".into(), self.q_max.to_string()),
            ("sigma_s".into(), self.sigma_s.to_string()),
            ("sigma_r".into(), self.sigma_r.to_string()),
            (
                "hdr_white_luminance".into(),
                self.hdr_white_luminance.to_string(),
            ),
            (
                "hdr_adapting_luminance".into(),
                self.hdr_adapting_luminance.to_string(),
            ),
            (
                "display_adapting_luminance".into(),
                self.display_adapting_luminance.to_string(),
            ),
            ("input_clamped".into(), self.input_clamped.to_string()),
            (
                "negative_achromatic".into(),
                self.negative_achromatic.to_string(),
            ),
            (
                "achromatic_fallbacks".into(),
                self.achromatic_fallbacks.to_string(),
            ),
            (
                "inverse_saturated".into(),
                self.inverse_saturated.to_string(),
            ),
            ("inverse_negative".into(), self.inverse_negative.to_string()),
            ("glare_clipped".into(), self.glare_clipped.to_string()),
            ("glare_threshold".into(), self.glare_threshold.to_string()),
            ("gamut_clamped".into(), self.gamut_clamped.to_string()),
        ];
        for stage in Stage::ALL {
            let ms = self
                .timings
                .iter()
                .find(|(s, _)| *s == stage)
                .map_or(0.0, |(_, t)| *t);
            f.push((format!("time_ms.{stage}"), format!("{ms:.3}")));
        }
        f.push(("time_ms.total".into(), format!("{:.3}", self.total_ms())));
        f
    }

    pub fn total_ms(&self) -> f64 {
        self.timings.iter().map(|(_, t)| t).sum()
    }

    /// One `name=value` line per field, in a fixed order.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Column names matching [`RunReport::csv_row`].
    pub fn csv_header() -> String {
        RunReport::default()
            .fields()
            .into_iter()
            .map(|(k, _)| k)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn csv_row(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
            .join(",")
    }
}
