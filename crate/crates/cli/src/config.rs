//! Command-line flags, the flat config file and their merge into a [`Config`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use tmoz_core::{DisplayMode, KeyConvention, KeyExtrema, PipelineConfig, Surround};

use crate::UsageError;

/// Environment variable naming the config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "TMOZ_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Display adapted to a 0.2 cd/m² background.
    PaperExperiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsFormat {
    Kv,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Gamma,
    Beta,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Beta => "beta",
        })
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gamma" => Ok(SweepParam::Gamma),
            "beta" => Ok(SweepParam::Beta),
            _ => Err(format!("cannot sweep `{s}` (expected gamma or beta)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Tone map HDR images (.hdr, .pfm) to 8-bit sRGB PNG.
#[derive(Debug, Parser)]
#[command(name = "tonemap", version)]
pub struct Args {
    /// Input files or directories.
    pub inputs: Vec<PathBuf>,

    /// Output PNG for a single input, otherwise an output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Config file (defaults to $TMOZ_CONFIG when set).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Fixed base-layer exponent; skips the key-based estimate.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Detail exponent [default: 1.1].
    #[arg(long)]
    pub beta: Option<f64>,

    /// reinhard or as-printed.
    #[arg(long, value_parser = parse_with::<KeyConvention>)]
    pub key_convention: Option<KeyConvention>,

    /// Display white luminance in cd/m² [default: 560].
    #[arg(long)]
    pub display_peak: Option<f64>,

    /// srgb or gog.
    #[arg(long, value_parser = parse_with::<DisplayMode>)]
    pub display_mode: Option<DisplayMode>,

    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Spatial sigma as a fraction of the larger image side [default: 0.02].
    #[arg(long)]
    pub sigma_s_frac: Option<f64>,

    /// Range sigma in log10 units [default: 0.35].
    #[arg(long)]
    pub sigma_r: Option<f64>,

    /// Use the bilateral grid instead of the direct filter.
    #[arg(long)]
    pub fast_bilateral: bool,

    /// Fraction of brightest pixels clipped by glare [default: 0.01].
    #[arg(long)]
    pub glare: Option<f64>,

    /// Render one output per value, e.g. `--sweep gamma 0.1,0.4,0.6,0.8`.
    #[arg(long, num_args = 2, value_names = ["PARAM", "VALUES"])]
    pub sweep: Option<Vec<String>>,

    /// Write a `name=value` report next to every output.
    #[arg(long)]
    pub stats: bool,

    /// Write one CSV header and one row per output to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// Input units to cd/m² [default: 179].
    #[arg(long)]
    pub luminance_scale: Option<f64>,

    /// Threads per image (defaults to all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

fn parse_with<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

/// Everything a batch run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub pipeline: PipelineConfig,
    pub sweep: Option<Sweep>,
    pub stats: bool,
    pub csv: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn number(key: &str, v: &str) -> Result<f64, UsageError> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("`{key}`: `{v}` is not a number")))
}

fn triple(key: &str, v: &str) -> Result<[f64; 3], UsageError> {
    let parts: Vec<f64> = v
        .split(',')
        .map(|p| number(key, p))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x] => Ok([x; 3]),
        [r, g, b] => Ok([r, g, b]),
        _ => Err(usage(format!(
            "`{key}` takes one value or three comma-separated values"
        ))),
    }
}

fn flag(key: &str, v: &str) -> Result<bool, UsageError> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(usage(format!("`{key}`: `{v}` is not a boolean"))),
    }
}

fn parsed<T: FromStr>(key: &str, v: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    v.trim()
        .parse()
        .map_err(|e: T::Err| usage(format!("`{key}`: {e}")))
}

/// One `key = value` entry with its section.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses the flat config format: `[section]` headers, `key = value` lines,
/// `#` or `;` comments.
pub fn parse_config(text: &str) -> Result<Vec<Entry>, UsageError> {
    let mut section = String::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_ascii_lowercase();
            if !matches!(section.as_str(), "hdr" | "display" | "tone") {
                return Err(usage(format!(
                    "line {}: unknown section [{section}]",
                    i + 1
                )));
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected `key = value`", i + 1)))?;
        entries.push(Entry {
            section: section.clone(),
            key: key.trim().to_ascii_lowercase().replace('-', "_"),
            value: value.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(entries)
}

fn apply_entry(cfg: &mut PipelineConfig, e: &Entry) -> Result<(), UsageError> {
    let key = format!("{}.{}", e.section, e.key);
    let v = e.value.as_str();
    let k = key.as_str();
    match k {
        "tone.gamma" => {
            cfg.tone.gamma = match v {
                "auto" => None,
                _ => Some(number(k, v)?),
            }
        }
        "tone.beta" => cfg.tone.beta = number(k, v)?,
        "tone.scale" => cfg.tone.scale = number(k, v)?,
        "tone.a" => cfg.tone.a = number(k, v)?,
        "tone.b" => cfg.tone.b = number(k, v)?,
        "tone.delta" => cfg.tone.delta = number(k, v)?,
        "tone.glare" => cfg.tone.glare_fraction = number(k, v)?,
        "tone.key_convention" => cfg.tone.key_convention = parsed(k, v)?,
        "tone.key_extrema" => cfg.tone.key_extrema = parsed::<KeyExtrema>(k, v)?,
        "tone.sigma_s_frac" => cfg.sigma_s_fraction = number(k, v)?,
        "tone.sigma_s" => cfg.sigma_s = Some(number(k, v)?),
        "tone.sigma_r" => cfg.sigma_r = number(k, v)?,
        "tone.fast_bilateral" => cfg.fast_bilateral = flag(k, v)?,
        "tone.workers" => cfg.workers = Some(parsed(k, v)?),
        "hdr.white" => cfg.hdr_white = triple(k, v)?,
        "hdr.white_luminance" => cfg.hdr_white_luminance = Some(number(k, v)?),
        "hdr.luminance_scale" => cfg.luminance_scale = number(k, v)?,
        "hdr.background" => cfg.hdr_background = number(k, v)?,
        "hdr.surround" => cfg.hdr_surround = parsed::<Surround>(k, v)?,
        "display.peak" => cfg.display.peak_luminance = number(k, v)?,
        "display.mode" => cfg.display.mode = parsed(k, v)?,
        "display.background" => cfg.display_background = number(k, v)?,
        "display.adapting_luminance" => cfg.display_adapting_luminance = Some(number(k, v)?),
        "display.surround" => cfg.display_surround = parsed(k, v)?,
        "display.gog_gain" | "display.gog_offset" | "display.gog_gamma" => {
            let t = triple(k, v)?;
            for (ch, x) in cfg.display.gog.iter_mut().zip(t) {
                match e.key.as_str() {
                    "gog_gain" => ch.gain = x,
                    "gog_offset" => ch.offset = x,
                    _ => ch.gamma = x,
                }
            }
        }
        _ => {
            return Err(usage(format!("line {}: unknown setting `{key}`", e.line)));
        }
    }
    Ok(())
}

/// Defaults for a preset, or the built-in defaults.
pub fn base_config(preset: Option<Preset>) -> PipelineConfig {
    match preset {
        Some(Preset::PaperExperiment) => PipelineConfig::paper_experiment(),
        None => PipelineConfig::default(),
    }
}

fn read_config_file(path: &Path) -> Result<Vec<Entry>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| usage(format!("{}: {}", path.display(), e.0)))
}

fn parse_sweep(raw: &[String]) -> Result<Sweep, UsageError> {
    let param: SweepParam = raw[0].parse().map_err(usage)?;
    let values = raw[1]
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| number("--sweep", s))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(usage("--sweep needs at least one value"));
    }
    Ok(Sweep { param, values })
}

impl Config {
    /// Merges built-in defaults, the config file and the flags, in that
    /// order of increasing precedence. `env_config` is the value of
    /// [`CONFIG_ENV`].
    pub fn resolve(args: Args, env_config: Option<PathBuf>) -> Result<Config, UsageError> {
        let mut cfg = base_config(args.preset);
        if let Some(path) = args.config.or(env_config) {
            let entries = read_config_file(&path)?;
            // a preset in the file only applies when none was given as a flag
            if args.preset.is_none() {
                if let Some(e) = entries
                    .iter()
                    .find(|e| e.section.is_empty() && e.key == "preset")
                {
                    cfg = match e.value.as_str() {
                        "paper-experiment" | "paper_experiment" => {
                            base_config(Some(Preset::PaperExperiment))
                        }
                        "default" => base_config(None),
                        other => return Err(usage(format!("unknown preset `{other}`"))),
                    };
                }
            }
            for e in entries
                .iter()
                .filter(|e| !(e.section.is_empty() && e.key == "preset"))
            {
                apply_entry(&mut cfg, e)?;
            }
        }

        if let Some(g) = args.gamma {
            cfg.tone.gamma = Some(g);
        }
        if let Some(b) = args.beta {
            cfg.tone.beta = b;
        }
        if let Some(k) = args.key_convention {
            cfg.tone.key_convention = k;
        }
        if let Some(p) = args.display_peak {
            cfg.display.peak_luminance = p;
        }
        if let Some(m) = args.display_mode {
            cfg.display.mode = m;
        }
        if let Some(f) = args.sigma_s_frac {
            cfg.sigma_s_fraction = f;
            cfg.sigma_s = None;
        }
        if let Some(r) = args.sigma_r {
            cfg.sigma_r = r;
        }
        if args.fast_bilateral {
            cfg.fast_bilateral = true;
        }
        if let Some(g) = args.glare {
            cfg.tone.glare_fraction = g;
        }
        if let Some(s) = args.luminance_scale {
            cfg.luminance_scale = s;
        }
        if let Some(w) = args.workers {
            cfg.workers = Some(w);
        }

        let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
        if let Some(s) = &sweep {
            if s.param == SweepParam::Gamma && args.gamma.is_some() {
                return Err(usage("--gamma conflicts with --sweep gamma"));
            }
            for &v in &s.values {
                let mut probe = cfg;
                apply_sweep(&mut probe, s.param, v);
                probe.validate().map_err(|e| usage(e.to_string()))?;
            }
        }
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        if args.inputs.is_empty() {
            return Err(usage("no input files given"));
        }
        Ok(Config {
            inputs: args.inputs,
            output: args.output,
            pipeline: cfg,
            sweep,
            stats: args.stats,
            csv: args.csv,
        })
    }
}

/// Sets the swept parameter on `cfg`.
pub fn apply_sweep(cfg: &mut PipelineConfig, param: SweepParam, value: f64) {
    match param {
        SweepParam::Gamma => cfg.tone.gamma = Some(value),
        SweepParam::Beta => cfg.tone.beta = value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("tonemap").chain(list.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_and_flags() {
        let c = Config::resolve(args(&["in.hdr", "-o", "out.png"]), None).unwrap();
        assert_eq!(c.pipeline, PipelineConfig::default());
        let c = Config::resolve(args(&["in.hdr", "--gamma", "0.4"]), None).unwrap();
        assert_eq!(c.pipeline.tone.gamma, Some(0.4));
    }

    #[test]
    fn sweep_is_parsed() {
        let c = Config::resolve(
            args(&["in.hdr", "--sweep", "gamma", "0.1,0.4,0.6,0.8"]),
            None,
        )
        .unwrap();
        assert_eq!(
            c.sweep,
            Some(Sweep {
                param: SweepParam::Gamma,
                values: vec![0.1, 0.4, 0.6, 0.8]
            })
        );
    }

    #[test]
    fn gamma_conflicts_with_gamma_sweep() {
        let a = args(&["in.hdr", "--gamma", "0.5", "--sweep", "gamma", "0.1,0.4"]);
        assert!(Config::resolve(a, None).is_err());
        let a = args(&["in.hdr", "--gamma", "0.5", "--sweep", "beta", "0.8,1.2"]);
        assert!(Config::resolve(a, None).is_ok());
    }

    #[test]
    fn missing_input_and_bad_values() {
        assert!(Config::resolve(args(&[]), None).is_err());
        assert!(Config::resolve(args(&["a.hdr", "--beta", "9"]), None).is_err());
        assert!(Config::resolve(args(&["a.hdr", "--sweep", "sigma", "1"]), None).is_err());
        assert!(Args::try_parse_from(["tonemap", "a.hdr", "--bogus"]).is_err());
    }

    #[test]
    fn config_file_sits_between_defaults_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.conf");
        std::fs::write(
            &path,
            "preset = paper-experiment\n[tone]\nbeta = 1.3 # stronger detail\ngamma = 0.7\n\
             [display]\npeak = 300\ngog_gamma = 2.0, 2.2, 2.4\n[hdr]\nsurround = dim\n",
        )
        .unwrap();
        let a = args(&[
            "in.hdr",
            "--config",
            path.to_str().unwrap(),
            "--beta",
            "0.9",
        ]);
        let c = Config::resolve(a, None).unwrap();
        assert_eq!(c.pipeline.tone.beta, 0.9);
        assert_eq!(c.pipeline.tone.gamma, Some(0.7));
        assert_eq!(c.pipeline.display.peak_luminance, 300.0);
        assert_eq!(c.pipeline.display.gog[2].gamma, 2.4);
        assert_eq!(c.pipeline.hdr_surround, Surround::Dim);
        assert_eq!(c.pipeline.display_adapting_luminance, Some(0.2));

        // the environment only supplies the path when --config is absent
        let c = Config::resolve(args(&["in.hdr"]), Some(path.clone())).unwrap();
        assert_eq!(c.pipeline.tone.beta, 1.3);
    }

    #[test]
    fn config_errors() {
        assert!(parse_config("[tone]\nbeta 1.2\n").is_err());
        assert!(parse_config("[filters]\n").is_err());
        let mut cfg = PipelineConfig::default();
        let e = &parse_config("[tone]\nbogus = 1\n").unwrap()[0];
        assert!(apply_entry(&mut cfg, e).is_err());
        let a = args(&["in.hdr", "--config", "/nonexistent/tmoz.conf"]);
        assert!(Config::resolve(a, None).is_err());
    }
}
