//! Perceptual tone mapping of high-dynamic-range radiance maps.
//!
//! The operator works on CIECAM16 brightness rather than luminance: the HDR
//! image is converted to XYZ, its brightness map is split into an
//! edge-preserving base layer and a detail layer, the base is compressed with
//! a gamma curve whose exponent is predicted from the image key, the detail
//! layer is stretched, and colorfulness and hue are rebuilt for the display
//! viewing conditions before the inverse appearance model produces display
//! XYZ.
//!
//! ```no_run
//! use tmoz_core::{hdr_io, tonemap_pipeline, PipelineConfig};
//!
//! let bytes = std::fs::read("memorial.hdr").unwrap();
//! let hdr = hdr_io::read_radiance_hdr(&bytes).unwrap();
//! let (sdr, report) = tonemap_pipeline(&hdr, &PipelineConfig::default()).unwrap();
//! hdr_io::write_sdr_png(&sdr, "memorial.png").unwrap();
//! println!("{}", report.to_kv());
//! ```

pub mod bilateral;
pub mod cam16;
pub mod color;
pub mod error;
pub mod hdr_io;
pub mod image;
pub mod synth;
pub mod tonemap;

pub use bilateral::{decompose, decompose_fast, BrightnessDecomposition};
pub use cam16::{
    derive_conditions, AdaptedResponses, AppearanceImage, DerivedConditions, Surround,
    ViewingConditions,
};
pub use color::ColorMatrix;
pub use error::{Error, FormatError, Result, Stage};
pub use image::{ColorSpace, HdrImage, SdrImage};
pub use tonemap::{
    tonemap_pipeline, DisplayMode, DisplayModel, KeyConvention, KeyExtrema, KeyStats,
    PipelineConfig, RunReport, ToneParams,
};
