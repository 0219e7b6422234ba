//! Probabilistic trimaps and trimap/matte fusion.
//!
//! A [`ProbTrimap`] holds per-pixel background, unknown and foreground
//! probabilities. [`fuse`] combines it with a matting network's alpha as
//! `alpha_f = F + U * alpha_m`.
//!
//! # PTM format
//!
//! ```text
//! offset  size        field
//! 0       8           magic "PTMAP\0\0\x01"
//! 8       4           width,  u32 little-endian
//! 12      4           height, u32 little-endian
//! 16      4*w*h       background plane, f32 little-endian, row-major
//! ...     4*w*h       unknown plane
//! ...     4*w*h       foreground plane
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::raster::check_dims;
use crate::imgcore::{ensure_same_dims, AlphaMatte, GrayMap, Raster, Trimap, TrimapClass};

pub const PTM_MAGIC: [u8; 8] = *b"PTMAP\0\0\x01";
const HEADER_LEN: usize = 16;

/// Allowed deviation of `B + U + F` from 1.
pub const SIMPLEX_TOLERANCE: f32 = 1e-4;

/// Three aligned probability planes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTrimap {
    width: usize,
    height: usize,
    background: Vec<f32>,
    unknown: Vec<f32>,
    foreground: Vec<f32>,
}

impl Raster for ProbTrimap {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
}

impl ProbTrimap {
    /// Validates that every plane lies in `[0, 1]` and the planes sum to 1
    /// within [`SIMPLEX_TOLERANCE`].
    pub fn from_planes(
        width: usize,
        height: usize,
        background: Vec<f32>,
        unknown: Vec<f32>,
        foreground: Vec<f32>,
    ) -> Result<Self> {
        for plane in [&background, &unknown, &foreground] {
            check_dims(width, height, plane.len())?;
            if let Some(index) = plane.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidProbability {
                    index,
                    value: plane[index],
                });
            }
        }
        for i in 0..background.len() {
            let s = background[i] + unknown[i] + foreground[i];
            if (s - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(Error::InvalidProbability { index: i, value: s });
            }
        }
        Ok(Self {
            width,
            height,
            background,
            unknown,
            foreground,
        })
    }

    /// Uniform probabilities `(b, u, f)` everywhere.
    pub fn filled(width: usize, height: usize, b: f32, u: f32, f: f32) -> Result<Self> {
        let n = width * height;
        Self::from_planes(width, height, vec![b; n], vec![u; n], vec![f; n])
    }

    pub fn background(&self) -> &[f32] {
        &self.background
    }

    pub fn unknown(&self) -> &[f32] {
        &self.unknown
    }

    pub fn foreground(&self) -> &[f32] {
        &self.foreground
    }

    /// `(B, U, F)` at pixel index `i`.
    #[inline]
    pub fn at(&self, i: usize) -> (f32, f32, f32) {
        (self.background[i], self.unknown[i], self.foreground[i])
    }

    /// Probability assigned to `class` at pixel index `i`.
    #[inline]
    pub fn prob_of(&self, i: usize, class: TrimapClass) -> f32 {
        match class {
            TrimapClass::Background => self.background[i],
            TrimapClass::Unknown => self.unknown[i],
            TrimapClass::Foreground => self.foreground[i],
        }
    }

    /// Foreground probability plane as a gray map.
    pub fn foreground_map(&self) -> GrayMap {
        GrayMap::from_vec(
            self.width,
            self.height,
            self.foreground.iter().map(|&v| v as f64).collect(),
        )
        .expect("dims valid by construction")
    }
}

/// `alpha_f = F + U * alpha_m`, clamped to `[0, 1]`.
pub fn fuse(prob: &ProbTrimap, alpha_m: &AlphaMatte) -> Result<AlphaMatte> {
    ensure_same_dims(prob, alpha_m)?;
    let data = alpha_m
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let (_, u, f) = prob.at(i);
            (f as f64 + u as f64 * a).clamp(0.0, 1.0)
        })
        .collect();
    AlphaMatte::from_vec(prob.width, prob.height, data)
}

/// Per-pixel argmax; any tie involving the unknown class, or between
/// background and foreground, yields unknown.
pub fn harden(prob: &ProbTrimap) -> Trimap {
    let n = prob.len();
    let data = (0..n)
        .map(|i| {
            let (b, u, f) = prob.at(i);
            let class = if u >= b && u >= f {
                TrimapClass::Unknown
            } else if f > b {
                TrimapClass::Foreground
            } else if b > f {
                TrimapClass::Background
            } else {
                TrimapClass::Unknown
            };
            class.byte()
        })
        .collect();
    Trimap::from_vec(prob.width, prob.height, data).expect("argmax yields trimap bytes")
}

/// One-hot lift of a hard trimap.
pub fn soften(trimap: &Trimap) -> ProbTrimap {
    let one_hot = |class: TrimapClass| -> Vec<f32> {
        trimap
            .as_bytes()
            .iter()
            .map(|&b| if b == class.byte() { 1.0 } else { 0.0 })
            .collect()
    };
    ProbTrimap {
        width: trimap.width(),
        height: trimap.height(),
        background: one_hot(TrimapClass::Background),
        unknown: one_hot(TrimapClass::Unknown),
        foreground: one_hot(TrimapClass::Foreground),
    }
}

/// Serializes to the PTM byte layout.
pub fn encode_ptm(prob: &ProbTrimap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 12 * prob.len());
    out.extend_from_slice(&PTM_MAGIC);
    out.extend_from_slice(&(prob.width as u32).to_le_bytes());
    out.extend_from_slice(&(prob.height as u32).to_le_bytes());
    for plane in [&prob.background, &prob.unknown, &prob.foreground] {
        for v in plane.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decoded PTM plus the number of pixels that had to be renormalized.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedPtm {
    pub prob: ProbTrimap,
    pub renormalized: usize,
}

/// Parses PTM bytes. Pixels whose planes do not sum to 1 within
/// [`SIMPLEX_TOLERANCE`] are divided by their sum (and counted); negative,
/// non-finite or all-zero pixels are errors.
pub fn decode_ptm(bytes: &[u8]) -> Result<DecodedPtm> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= PTM_MAGIC.len() && bytes[..PTM_MAGIC.len()] != PTM_MAGIC {
            return Err(Error::BadMagic);
        }
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    if bytes[..8] != PTM_MAGIC {
        return Err(Error::BadMagic);
    }
    let width = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let height = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    if width == 0 || height == 0 {
        return Err(Error::EmptyRaster(width, height));
    }
    let n = width * height;
    let expected = HEADER_LEN + 12 * n;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::TrailingBytes {
            extra: bytes.len() - expected,
        });
    }

    let mut planes = [vec![0f32; n], vec![0f32; n], vec![0f32; n]];
    for (p, plane) in planes.iter_mut().enumerate() {
        let base = HEADER_LEN + 4 * n * p;
        for (i, v) in plane.iter_mut().enumerate() {
            let off = base + 4 * i;
            *v = f32::from_le_bytes(bytes[off..off + 4].try_into().expect("4 bytes"));
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidProbability {
                    index: i,
                    value: *v,
                });
            }
        }
    }

    let [mut background, mut unknown, mut foreground] = planes;
    let mut renormalized = 0;
    for i in 0..n {
        let sum = background[i] as f64 + unknown[i] as f64 + foreground[i] as f64;
        if (sum - 1.0).abs() <= SIMPLEX_TOLERANCE as f64 {
            continue;
        }
        if sum <= 0.0 {
            return Err(Error::InvalidProbability {
                index: i,
                value: sum as f32,
            });
        }
        background[i] = (background[i] as f64 / sum) as f32;
        unknown[i] = (unknown[i] as f64 / sum) as f32;
        foreground[i] = (foreground[i] as f64 / sum) as f32;
        renormalized += 1;
    }
    let prob = ProbTrimap::from_planes(width, height, background, unknown, foreground)?;
    Ok(DecodedPtm { prob, renormalized })
}

pub fn write_ptm(prob: &ProbTrimap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ptm(prob)).map_err(|e| Error::io(path, e))
}

/// Reads a PTM file, logging a warning when pixels had to be renormalized.
pub fn read_ptm(path: impl AsRef<Path>) -> Result<ProbTrimap> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let decoded = decode_ptm(&bytes)?;
    if decoded.renormalized > 0 {
        log::warn!(
            "{}: renormalized {} pixel(s) whose probabilities did not sum to 1",
            path.display(),
            decoded.renormalized
        );
    }
    Ok(decoded.prob)
}
