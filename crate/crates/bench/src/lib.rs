//! Fixtures shared by the benchmarks.

use tmoz_core::synth::{fit_key, natural_scene, scene_luminance, SceneParams};
use tmoz_core::HdrImage;

/// Mid-key scene of the given size with a 1e5 dynamic range.
pub fn scene(width: usize, height: usize) -> HdrImage {
    natural_scene(&params(width, height))
}

/// Luminance of [`scene`].
pub fn luminance(width: usize, height: usize) -> Vec<f64> {
    scene_luminance(&params(width, height))
}

fn params(width: usize, height: usize) -> SceneParams {
    fit_key(
        SceneParams {
            width,
            height,
            seed: 7,
            dynamic_range: 1e5,
            ..Default::default()
        },
        0.18,
    )
}
