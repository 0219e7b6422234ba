//! PNG loading and saving.
//!
//! 8-bit and 16-bit PNGs are accepted on read; everything is written as
//! 8-bit. Bytes map linearly onto `[0, 1]` with no color management.

use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use super::raster::{AlphaMatte, BinaryMask, GrayMap, Image, Raster, Trimap, TrimapClass};
use crate::error::{Error, Result};

/// What a PNG should be decoded as.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PngKind {
    Image,
    Gray,
    Mask,
    Trimap,
}

/// Result of [`load_png`].
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Image(Image),
    Gray(GrayMap),
    Mask(BinaryMask),
    /// `snapped` is set when at least one byte was not already 0, 128 or 255.
    Trimap {
        trimap: Trimap,
        snapped: bool,
    },
}

enum Samples {
    Gray(Vec<f64>),
    Rgb([Vec<f64>; 3]),
}

fn decode(path: &Path) -> Result<(usize, usize, DynamicImage)> {
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    Ok((w, h, img))
}

fn read_samples(path: &Path, want_channels: usize) -> Result<(usize, usize, Samples)> {
    let (w, h, img) = decode(path)?;
    let found = img.color().channel_count() as usize;
    if found != want_channels {
        return Err(Error::ChannelCount {
            path: path.to_path_buf(),
            expected: want_channels,
            found,
        });
    }
    let samples = match img {
        DynamicImage::ImageLuma8(buf) => Samples::Gray(
            buf.into_raw()
                .into_iter()
                .map(|b| b as f64 / 255.0)
                .collect(),
        ),
        DynamicImage::ImageLuma16(buf) => Samples::Gray(
            buf.into_raw()
                .into_iter()
                .map(|b| b as f64 / 65535.0)
                .collect(),
        ),
        DynamicImage::ImageRgb8(buf) => Samples::Rgb(split_rgb(
            buf.into_raw().into_iter().map(|b| b as f64 / 255.0),
        )),
        DynamicImage::ImageRgb16(buf) => Samples::Rgb(split_rgb(
            buf.into_raw().into_iter().map(|b| b as f64 / 65535.0),
        )),
        other => {
            return Err(Error::UnsupportedLayout {
                path: path.to_path_buf(),
                layout: format!("{:?}", other.color()),
            })
        }
    };
    Ok((w, h, samples))
}

fn split_rgb(interleaved: impl Iterator<Item = f64>) -> [Vec<f64>; 3] {
    let mut planes = [Vec::new(), Vec::new(), Vec::new()];
    for (i, v) in interleaved.enumerate() {
        planes[i % 3].push(v);
    }
    planes
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    match read_samples(path, 3)? {
        (w, h, Samples::Rgb(planes)) => Image::from_planes(w, h, planes),
        _ => unreachable!("channel count checked"),
    }
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayMap> {
    let path = path.as_ref();
    match read_samples(path, 1)? {
        (w, h, Samples::Gray(data)) => GrayMap::from_vec(w, h, data),
        _ => unreachable!("channel count checked"),
    }
}

pub fn load_alpha(path: impl AsRef<Path>) -> Result<AlphaMatte> {
    AlphaMatte::from_gray(load_gray(path)?)
}

/// Loads a mask; samples at or above one half are `true`.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let gray = load_gray(path)?;
    Ok(BinaryMask::threshold(&gray, |v| v >= 0.5))
}

/// Loads a trimap, snapping every byte to the nearest of 0, 128 and 255.
pub fn load_trimap(path: impl AsRef<Path>) -> Result<(Trimap, bool)> {
    let gray = load_gray(path)?;
    let mut snapped = false;
    let bytes: Vec<u8> = gray
        .as_slice()
        .iter()
        .map(|&v| {
            let b = (v * 255.0).round() as u8;
            let s = TrimapClass::snap(b).byte();
            snapped |= s != b;
            s
        })
        .collect();
    let (w, h) = gray.dims();
    Ok((Trimap::from_vec(w, h, bytes)?, snapped))
}

pub fn load_png(path: impl AsRef<Path>, kind: PngKind) -> Result<Loaded> {
    Ok(match kind {
        PngKind::Image => Loaded::Image(load_image(path)?),
        PngKind::Gray => Loaded::Gray(load_gray(path)?),
        PngKind::Mask => Loaded::Mask(load_mask(path)?),
        PngKind::Trimap => {
            let (trimap, snapped) = load_trimap(path)?;
            Loaded::Trimap { trimap, snapped }
        }
    })
}

#[inline]
pub(crate) fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn write(path: &Path, img: DynamicImage) -> Result<()> {
    img.save_with_format(path, ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Rasters that can be written as 8-bit PNG.
pub trait SavePng {
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()>;
}

fn gray_bytes(w: usize, h: usize, bytes: Vec<u8>) -> DynamicImage {
    DynamicImage::ImageLuma8(
        image::GrayImage::from_raw(w as u32, h as u32, bytes).expect("buffer matches dims"),
    )
}

impl SavePng for GrayMap {
    /// Samples are clamped into `[0, 1]` first.
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes = self.as_slice().iter().map(|&v| quantize(v)).collect();
        write(
            path.as_ref(),
            gray_bytes(self.width(), self.height(), bytes),
        )
    }
}

impl SavePng for AlphaMatte {
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        self.as_gray().save_png(path)
    }
}

impl SavePng for BinaryMask {
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes = self
            .as_slice()
            .iter()
            .map(|&b| if b { 255 } else { 0 })
            .collect();
        write(
            path.as_ref(),
            gray_bytes(self.width(), self.height(), bytes),
        )
    }
}

impl SavePng for Trimap {
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        write(
            path.as_ref(),
            gray_bytes(self.width(), self.height(), self.as_bytes().to_vec()),
        )
    }
}

impl SavePng for Image {
    fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let [r, g, b] = self.planes();
        let mut bytes = Vec::with_capacity(self.len() * 3);
        for i in 0..self.len() {
            bytes.extend([quantize(r[i]), quantize(g[i]), quantize(b[i])]);
        }
        let buf = image::RgbImage::from_raw(self.width() as u32, self.height() as u32, bytes)
            .expect("buffer matches dims");
        write(path.as_ref(), DynamicImage::ImageRgb8(buf))
    }
}
