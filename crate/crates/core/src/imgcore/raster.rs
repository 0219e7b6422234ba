//! Row-major raster types.
//!
//! Every raster has positive dimensions. Float rasters store `f64`
//! samples; `Image` and `AlphaMatte` additionally keep every sample in
//! `[0, 1]`.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Shared shape accessors.
pub trait Raster {
    fn width(&self) -> usize;
    fn height(&self) -> usize;

    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn len(&self) -> usize {
        self.width() * self.height()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyRaster(width, height));
    }
    if width * height != len {
        return Err(Error::BufferLength { width, height, len });
    }
    Ok(())
}

/// Fails with [`Error::DimensionMismatch`] unless `b` has the shape of `a`.
pub fn ensure_same_dims(a: &impl Raster, b: &impl Raster) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            actual: b.dims(),
        });
    }
    Ok(())
}

fn check_unit_range(data: &[f64]) -> Result<()> {
    match data
        .iter()
        .position(|v| !(0.0..=1.0).contains(v) || v.is_nan())
    {
        Some(index) => Err(Error::OutOfRange {
            index,
            value: data[index],
        }),
        None => Ok(()),
    }
}

macro_rules! impl_raster {
    ($ty:ty) => {
        impl Raster for $ty {
            fn width(&self) -> usize {
                self.width
            }
            fn height(&self) -> usize {
                self.height
            }
        }
    };
}

/// Single-channel float raster with unbounded samples.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl_raster!(GrayMap);

impl GrayMap {
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::from_vec(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::from_vec(width, height, data)
    }

    /// Same shape as `self`, all zero.
    pub fn zeros_like(other: &impl Raster) -> Self {
        Self {
            width: other.width(),
            height: other.height(),
            data: vec![0.0; other.len()],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise `f(self, other)`; shapes must agree.
    pub fn zip_map(&self, other: &GrayMap, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_dims(self, other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Opacity map with samples in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaMatte(GrayMap);

impl AlphaMatte {
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_unit_range(&data)?;
        Ok(Self(GrayMap::from_vec(width, height, data)?))
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::from_vec(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        Self::from_gray(GrayMap::from_fn(width, height, f)?)
    }

    pub fn from_gray(gray: GrayMap) -> Result<Self> {
        check_unit_range(gray.as_slice())?;
        Ok(Self(gray))
    }

    /// Clamps every sample into `[0, 1]`; NaN becomes 0.
    pub fn clamped(mut gray: GrayMap) -> Self {
        for v in gray.as_mut_slice() {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self(gray)
    }

    pub fn as_gray(&self) -> &GrayMap {
        &self.0
    }

    pub fn into_gray(self) -> GrayMap {
        self.0
    }
}

impl Deref for AlphaMatte {
    type Target = GrayMap;

    fn deref(&self) -> &GrayMap {
        &self.0
    }
}

impl Raster for AlphaMatte {
    fn width(&self) -> usize {
        self.0.width
    }
    fn height(&self) -> usize {
        self.0.height
    }
}

/// Three-plane RGB raster with samples in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    planes: [Vec<f64>; 3],
}

impl_raster!(Image);

impl Image {
    pub fn from_planes(width: usize, height: usize, planes: [Vec<f64>; 3]) -> Result<Self> {
        for plane in &planes {
            check_dims(width, height, plane.len())?;
            check_unit_range(plane)?;
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        let n = width * height;
        Self::from_planes(width, height, rgb.map(|v| vec![v; n]))
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let n = width * height;
        let mut planes = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                for (plane, v) in planes.iter_mut().zip(px) {
                    plane.push(v);
                }
            }
        }
        Self::from_planes(width, height, planes)
    }

    /// Builds an image from three gray planes, clamping into `[0, 1]`.
    pub fn from_gray_planes_clamped(planes: [GrayMap; 3]) -> Result<Self> {
        let (w, h) = planes[0].dims();
        ensure_same_dims(&planes[0], &planes[1])?;
        ensure_same_dims(&planes[0], &planes[2])?;
        let planes = planes.map(|p| AlphaMatte::clamped(p).into_gray().into_vec());
        Ok(Self {
            width: w,
            height: h,
            planes,
        })
    }

    pub fn plane(&self, channel: usize) -> &[f64] {
        &self.planes[channel]
    }

    pub fn planes(&self) -> &[Vec<f64>; 3] {
        &self.planes
    }

    /// Channel as a standalone gray map.
    pub fn channel(&self, channel: usize) -> GrayMap {
        GrayMap {
            width: self.width,
            height: self.height,
            data: self.planes[channel].clone(),
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        let i = y * self.width + x;
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }
}

/// Two-valued raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl_raster!(BinaryMask);

impl BinaryMask {
    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::from_vec(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::from_vec(width, height, data)
    }

    pub fn falses_like(other: &impl Raster) -> Self {
        Self {
            width: other.width(),
            height: other.height(),
            data: vec![false; other.len()],
        }
    }

    /// `true` where `pred` holds for the gray sample.
    pub fn threshold(map: &GrayMap, pred: impl Fn(f64) -> bool) -> Self {
        Self {
            width: map.width(),
            height: map.height(),
            data: map.as_slice().iter().map(|&v| pred(v)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [bool] {
        &mut self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|b| !b).collect(),
        }
    }

    fn combine(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        ensure_same_dims(self, other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn and(&self, other: &BinaryMask) -> Result<Self> {
        self.combine(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> Result<Self> {
        self.combine(other, |a, b| a || b)
    }

    /// `self \ other`.
    pub fn minus(&self, other: &BinaryMask) -> Result<Self> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    /// 0.0 / 1.0 map.
    pub fn to_gray(&self) -> GrayMap {
        GrayMap {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

/// The three trimap regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrimapClass {
    Background,
    Unknown,
    Foreground,
}

impl TrimapClass {
    pub const fn byte(self) -> u8 {
        match self {
            TrimapClass::Background => 0,
            TrimapClass::Unknown => 128,
            TrimapClass::Foreground => 255,
        }
    }

    pub const fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(TrimapClass::Background),
            128 => Some(TrimapClass::Unknown),
            255 => Some(TrimapClass::Foreground),
            _ => None,
        }
    }

    /// Nearest trimap value; a byte equidistant from two values maps to 128.
    pub fn snap(b: u8) -> Self {
        let d_bg = b as i32;
        let d_unk = (b as i32 - 128).abs();
        let d_fg = 255 - b as i32;
        if d_unk <= d_bg && d_unk <= d_fg {
            TrimapClass::Unknown
        } else if d_bg < d_fg {
            TrimapClass::Background
        } else {
            TrimapClass::Foreground
        }
    }
}

/// Hard trimap: every byte is 0, 128 or 255.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trimap {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl_raster!(Trimap);

impl Trimap {
    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if let Some(index) = data
            .iter()
            .position(|&b| TrimapClass::from_byte(b).is_none())
        {
            return Err(Error::InvalidTrimapValue {
                index,
                value: data[index],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, class: TrimapClass) -> Result<Self> {
        Self::from_vec(width, height, vec![class.byte(); width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> TrimapClass,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).byte());
            }
        }
        Self::from_vec(width, height, data)
    }

    /// Builds a trimap from foreground and unknown masks; unknown wins
    /// where both are set, everything else is background.
    pub fn from_regions(foreground: &BinaryMask, unknown: &BinaryMask) -> Result<Self> {
        ensure_same_dims(foreground, unknown)?;
        let data = foreground
            .as_slice()
            .iter()
            .zip(unknown.as_slice())
            .map(|(&f, &u)| match (f, u) {
                (_, true) => TrimapClass::Unknown.byte(),
                (true, false) => TrimapClass::Foreground.byte(),
                (false, false) => TrimapClass::Background.byte(),
            })
            .collect();
        Ok(Self {
            width: foreground.width(),
            height: foreground.height(),
            data,
        })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> TrimapClass {
        self.class_at(y * self.width + x)
    }

    #[inline]
    pub fn class_at(&self, index: usize) -> TrimapClass {
        match self.data[index] {
            0 => TrimapClass::Background,
            128 => TrimapClass::Unknown,
            _ => TrimapClass::Foreground,
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn region(&self, class: TrimapClass) -> BinaryMask {
        let b = class.byte();
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v == b).collect(),
        }
    }

    pub fn unknown(&self) -> BinaryMask {
        self.region(TrimapClass::Unknown)
    }

    pub fn count(&self, class: TrimapClass) -> usize {
        let b = class.byte();
        self.data.iter().filter(|&&v| v == b).count()
    }
}
