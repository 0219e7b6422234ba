//! Alpha compositing and synthetic training-set synthesis.

mod synth;

pub use synth::{
    list_pngs, pair_by_stem, read_manifest, render_record, render_to_dir, synthesize_manifest,
    upscale_to_fit, write_manifest, RenderedSample, SynthConfig, SynthRecord, TripletPaths,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imgcore::{ensure_same_dims, AlphaMatte, FlipHorizontal, Image, Raster, Trimap};

/// Crop sizes the synthesis procedure draws from.
pub const CROP_SIZES: [usize; 3] = [320, 480, 640];

/// `I = alpha * F + (1 - alpha) * B` per channel.
pub fn composite(fg: &Image, bg: &Image, alpha: &AlphaMatte) -> Result<Image> {
    ensure_same_dims(fg, bg)?;
    ensure_same_dims(fg, alpha)?;
    let a = alpha.as_slice();
    let planes = [0, 1, 2].map(|c| {
        fg.plane(c)
            .iter()
            .zip(bg.plane(c))
            .zip(a)
            .map(|((&f, &b), &a)| (a * f + (1.0 - a) * b).clamp(0.0, 1.0))
            .collect()
    });
    Image::from_planes(fg.width(), fg.height(), planes)
}

/// Foreground, background, alpha and their composite.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeSample {
    pub foreground: Image,
    pub background: Image,
    pub alpha: AlphaMatte,
    pub composite: Image,
}

impl CompositeSample {
    pub fn new(foreground: Image, background: Image, alpha: AlphaMatte) -> Result<Self> {
        let composite = composite(&foreground, &background, &alpha)?;
        Ok(Self {
            foreground,
            background,
            alpha,
            composite,
        })
    }
}

/// Draws the six jitter factors (three for the foreground, then three for
/// the background) from `[1 - s, 1 + s]`.
pub fn jitter_factors(jitter_seed: u64, strength: f64) -> ([f64; 3], [f64; 3]) {
    let mut rng = ChaCha8Rng::seed_from_u64(jitter_seed);
    let mut draw = || 1.0 + strength * rng.gen_range(-1.0..=1.0);
    let fg = [draw(), draw(), draw()];
    let bg = [draw(), draw(), draw()];
    (fg, bg)
}

fn scale_channels(img: &Image, factors: [f64; 3]) -> Image {
    let planes = [0, 1, 2].map(|c| {
        img.plane(c)
            .iter()
            .map(|v| (v * factors[c]).clamp(0.0, 1.0))
            .collect()
    });
    Image::from_planes(img.width(), img.height(), planes).expect("same dims")
}

/// Optional horizontal flip of every raster followed by independent
/// per-channel multiplicative jitter of foreground and background. Alpha is
/// never jittered; the composite is recomputed.
pub fn augment(
    sample: &CompositeSample,
    flip: bool,
    jitter_seed: u64,
    jitter_strength: f64,
) -> Result<CompositeSample> {
    if !(0.0..=1.0).contains(&jitter_strength) {
        return Err(Error::InvalidParameter(format!(
            "jitter strength {jitter_strength} is outside [0, 1]"
        )));
    }
    let (mut fg, mut bg, mut alpha) = (
        sample.foreground.clone(),
        sample.background.clone(),
        sample.alpha.clone(),
    );
    if flip {
        fg = fg.flip_horizontal();
        bg = bg.flip_horizontal();
        alpha = alpha.flip_horizontal();
    }
    if jitter_strength > 0.0 {
        let (ffg, fbg) = jitter_factors(jitter_seed, jitter_strength);
        fg = scale_channels(&fg, ffg);
        bg = scale_channels(&bg, fbg);
    }
    CompositeSample::new(fg, bg, alpha)
}

/// Square crop window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CropWindow {
    pub x: usize,
    pub y: usize,
    pub size: usize,
}

impl CropWindow {
    /// Pixel at `(x + size/2, y + size/2)`.
    pub fn center(&self) -> (usize, usize) {
        (self.x + self.size / 2, self.y + self.size / 2)
    }
}

/// Picks a window whose center pixel is unknown in `trimap`, uniformly among
/// unknown pixels whose centered window fits with one spare column on the
/// right (so the window can be shifted by one for a mirrored render). When
/// no pixel qualifies, a uniformly chosen unknown pixel is centered and the
/// window clamped to the frame.
///
/// `alpha` only fixes the frame; the source must be at least `size` in both
/// axes (upscale first with [`upscale_to_fit`]).
pub fn sample_crop(
    alpha: &AlphaMatte,
    trimap: &Trimap,
    size: usize,
    seed: u64,
) -> Result<CropWindow> {
    if !CROP_SIZES.contains(&size) {
        return Err(Error::InvalidCropSize(size));
    }
    ensure_same_dims(alpha, trimap)?;
    let (w, h) = trimap.dims();
    if w < size || h < size {
        return Err(Error::CropOutOfBounds {
            x: 0,
            y: 0,
            size,
            width: w,
            height: h,
        });
    }
    let unknown: Vec<usize> = trimap
        .as_bytes()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 128)
        .map(|(i, _)| i)
        .collect();
    if unknown.is_empty() {
        return Err(Error::NoUnknownPixels);
    }
    let half = size / 2;
    let fits = |i: &&usize| {
        let (px, py) = (*i % w, *i / w);
        px >= half && px + half < w && py >= half && py + half <= h
    };
    let fitting: Vec<usize> = unknown.iter().filter(fits).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pool, clamp) = if fitting.is_empty() {
        log::debug!("no centered {size}px window fits; clamping to frame");
        (&unknown, true)
    } else {
        (&fitting, false)
    };
    let pick = pool[rng.gen_range(0..pool.len())];
    let (px, py) = (pick % w, pick / w);
    let (x, y) = if clamp {
        (
            px.saturating_sub(half).min(w - size),
            py.saturating_sub(half).min(h - size),
        )
    } else {
        (px - half, py - half)
    };
    Ok(CropWindow { x, y, size })
}
