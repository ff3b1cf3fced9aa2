//! The tone-mapping operator: key-driven base compression, detail
//! stretching and appearance reconstruction for the display.

mod display;
mod glare;
mod key;
mod ops;
mod params;
mod pipeline;
mod report;

pub use display::{
    encode_display, quantize, srgb_decode, srgb_encode, DisplayMode, DisplayModel, Encoded,
    GogChannel,
};
pub use glare::{simulate_glare, GlareOutput};
pub use key::{estimate_gamma, image_key, nearest_rank, KeyStats, NEUTRAL_KEY};
pub use ops::{compress_base, enhance_detail, recombine, to_linear};
pub use params::{KeyConvention, KeyExtrema, ToneParams, GAMMA_INTERCEPT, GAMMA_MAX, GAMMA_SLOPE};
pub use pipeline::{
    tonemap_pipeline, tonemap_trace, PipelineConfig, PipelineTrace, RADIANCE_EFFICACY,
    WHITE_PERCENTILE,
};
pub use report::RunReport;
