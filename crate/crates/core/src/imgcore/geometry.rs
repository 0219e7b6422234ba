//! Resampling, cropping and mirroring.

use super::raster::{AlphaMatte, GrayMap, Image, Raster, Trimap};
use crate::error::{Error, Result};

/// Source coordinate and blend weight along one axis for a half-pixel
/// aligned bilinear resample.
fn axis_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

fn resize_plane(data: &[f64], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<f64> {
    let xs = axis_taps(sw, dw);
    let ys = axis_taps(sh, dh);
    let mut out = Vec::with_capacity(dw * dh);
    for &(y0, y1, ty) in &ys {
        let r0 = &data[y0 * sw..(y0 + 1) * sw];
        let r1 = &data[y1 * sw..(y1 + 1) * sw];
        for &(x0, x1, tx) in &xs {
            let top = lerp(r0[x0], r0[x1], tx);
            let bottom = lerp(r1[x0], r1[x1], tx);
            out.push(lerp(top, bottom, ty));
        }
    }
    out
}

fn check_target(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        Err(Error::EmptyRaster(width, height))
    } else {
        Ok(())
    }
}

/// Bilinear resampling with pixel centers aligned (`(d + 0.5) * scale - 0.5`)
/// and edge clamping. Resizing to the current dimensions is the identity.
pub trait ResizeBilinear: Sized {
    fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self>;
}

impl ResizeBilinear for GrayMap {
    fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        check_target(width, height)?;
        if self.dims() == (width, height) {
            return Ok(self.clone());
        }
        let (sw, sh) = self.dims();
        GrayMap::from_vec(
            width,
            height,
            resize_plane(self.as_slice(), sw, sh, width, height),
        )
    }
}

impl ResizeBilinear for AlphaMatte {
    fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        Ok(AlphaMatte::clamped(
            self.as_gray().resize_bilinear(width, height)?,
        ))
    }
}

impl ResizeBilinear for Image {
    fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        check_target(width, height)?;
        if self.dims() == (width, height) {
            return Ok(self.clone());
        }
        let (sw, sh) = self.dims();
        let planes = [0, 1, 2].map(|c| {
            GrayMap::from_vec(
                width,
                height,
                resize_plane(self.plane(c), sw, sh, width, height),
            )
            .expect("target dims checked")
        });
        Image::from_gray_planes_clamped(planes)
    }
}

/// Nearest-neighbor resize of a trimap. Output pixel `d` reads source pixel
/// `floor(d * src / dst)`, so an even-sized output's center maps onto the
/// source window's center.
pub fn resize_nearest(trimap: &Trimap, width: usize, height: usize) -> Result<Trimap> {
    check_target(width, height)?;
    let (sw, sh) = trimap.dims();
    let map = |d: usize, s: usize, n: usize| (d * s / n).min(s - 1);
    Trimap::from_fn(width, height, |x, y| {
        trimap.get(map(x, sw, width), map(y, sh, height))
    })
}

/// Axis-aligned crops.
pub trait Crop: Sized {
    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self>;
}

fn check_crop(r: &impl Raster, x: usize, y: usize, w: usize, h: usize) -> Result<()> {
    check_target(w, h)?;
    if x + w > r.width() || y + h > r.height() {
        return Err(Error::CropOutOfBounds {
            x,
            y,
            size: w.max(h),
            width: r.width(),
            height: r.height(),
        });
    }
    Ok(())
}

fn crop_vec<T: Copy>(data: &[T], stride: usize, x: usize, y: usize, w: usize, h: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(w * h);
    for row in y..y + h {
        out.extend_from_slice(&data[row * stride + x..row * stride + x + w]);
    }
    out
}

impl Crop for GrayMap {
    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        check_crop(self, x, y, width, height)?;
        GrayMap::from_vec(
            width,
            height,
            crop_vec(self.as_slice(), self.width(), x, y, width, height),
        )
    }
}

impl Crop for AlphaMatte {
    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        AlphaMatte::from_gray(self.as_gray().crop(x, y, width, height)?)
    }
}

impl Crop for Image {
    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        check_crop(self, x, y, width, height)?;
        let planes = [0, 1, 2].map(|c| crop_vec(self.plane(c), self.width(), x, y, width, height));
        Image::from_planes(width, height, planes)
    }
}

impl Crop for Trimap {
    fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        check_crop(self, x, y, width, height)?;
        Trimap::from_vec(
            width,
            height,
            crop_vec(self.as_bytes(), self.width(), x, y, width, height),
        )
    }
}

/// Left-right mirror.
pub trait FlipHorizontal {
    fn flip_horizontal(&self) -> Self;
}

fn flip_vec<T: Copy>(data: &[T], width: usize) -> Vec<T> {
    data.chunks(width)
        .flat_map(|row| row.iter().rev().copied())
        .collect()
}

impl FlipHorizontal for GrayMap {
    fn flip_horizontal(&self) -> Self {
        GrayMap::from_vec(
            self.width(),
            self.height(),
            flip_vec(self.as_slice(), self.width()),
        )
        .expect("same dims")
    }
}

impl FlipHorizontal for AlphaMatte {
    fn flip_horizontal(&self) -> Self {
        AlphaMatte::clamped(self.as_gray().flip_horizontal())
    }
}

impl FlipHorizontal for Image {
    fn flip_horizontal(&self) -> Self {
        let planes = [0, 1, 2].map(|c| flip_vec(self.plane(c), self.width()));
        Image::from_planes(self.width(), self.height(), planes).expect("same dims and range")
    }
}

impl FlipHorizontal for Trimap {
    fn flip_horizontal(&self) -> Self {
        Trimap::from_vec(
            self.width(),
            self.height(),
            flip_vec(self.as_bytes(), self.width()),
        )
        .expect("same dims and values")
    }
}
