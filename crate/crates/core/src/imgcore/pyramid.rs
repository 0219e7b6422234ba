//! Gaussian and Laplacian pyramids.
//!
//! Smoothing uses the separable binomial kernel `[1, 4, 6, 4, 1] / 16` with
//! edge-replicate padding, downsampling keeps every second sample (so each
//! level is `ceil(previous / 2)`), and expansion is bilinear to the finer
//! level's exact size. Reconstruction is therefore exact for any shape,
//! odd dimensions included.

use super::geometry::ResizeBilinear;
use super::raster::{GrayMap, Raster};
use crate::error::{Error, Result};

const BINOMIAL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Ordered pyramid levels, finest first.
#[derive(Clone, Debug, PartialEq)]
pub struct PyramidStack {
    levels: Vec<GrayMap>,
}

impl PyramidStack {
    pub fn levels(&self) -> &[GrayMap] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &GrayMap {
        &self.levels[i]
    }

    pub fn count(&self) -> usize {
        self.levels.len()
    }

    pub fn into_levels(self) -> Vec<GrayMap> {
        self.levels
    }

    /// Collapses a Laplacian stack: `G_i = L_i + expand(G_{i+1})`.
    pub fn reconstruct(&self) -> GrayMap {
        let mut levels = self.levels.iter().rev();
        let mut acc = levels
            .next()
            .expect("pyramid has at least one level")
            .clone();
        for lap in levels {
            let up = expand(&acc, lap.width(), lap.height());
            acc = lap.zip_map(&up, |l, u| l + u).expect("expand matches dims");
        }
        acc
    }
}

/// Separable binomial blur with replicated edges.
pub fn smooth(map: &GrayMap) -> GrayMap {
    let (w, h) = map.dims();
    let src = map.as_slice();
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            tmp[y * w + x] = BINOMIAL
                .iter()
                .enumerate()
                .map(|(k, c)| c * row[clamp(x as isize + k as isize - 2, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = BINOMIAL
                .iter()
                .enumerate()
                .map(|(k, c)| c * tmp[clamp(y as isize + k as isize - 2, h) * w + x])
                .sum();
        }
    }
    GrayMap::from_vec(w, h, out).expect("same dims")
}

/// Keeps samples at even coordinates.
pub fn decimate(map: &GrayMap) -> GrayMap {
    let (w, h) = map.dims();
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    GrayMap::from_fn(nw, nh, |x, y| map.get(2 * x, 2 * y)).expect("positive dims")
}

/// Bilinear expansion to an exact target size.
pub fn expand(map: &GrayMap, width: usize, height: usize) -> GrayMap {
    map.resize_bilinear(width, height)
        .expect("pyramid levels have positive dims")
}

fn check_levels(map: &GrayMap, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let need = 1usize
        .checked_shl((levels - 1) as u32)
        .unwrap_or(usize::MAX);
    if map.width() < need || map.height() < need {
        return Err(Error::PyramidTooSmall {
            width: map.width(),
            height: map.height(),
            levels,
        });
    }
    Ok(())
}

/// `levels` Gaussian levels, the first being the input itself.
pub fn gaussian_pyramid(map: &GrayMap, levels: usize) -> Result<PyramidStack> {
    check_levels(map, levels)?;
    let mut out = Vec::with_capacity(levels);
    out.push(map.clone());
    for _ in 1..levels {
        let next = decimate(&smooth(out.last().expect("non-empty")));
        out.push(next);
    }
    Ok(PyramidStack { levels: out })
}

/// Band-pass levels `L_i = G_i - expand(G_{i+1})`; the last level is the
/// coarsest Gaussian level.
pub fn laplacian_pyramid(map: &GrayMap, levels: usize) -> Result<PyramidStack> {
    let gauss = gaussian_pyramid(map, levels)?.into_levels();
    let mut out = Vec::with_capacity(levels);
    for pair in gauss.windows(2) {
        let (fine, coarse) = (&pair[0], &pair[1]);
        let up = expand(coarse, fine.width(), fine.height());
        out.push(
            fine.zip_map(&up, |a, b| a - b)
                .expect("expand matches dims"),
        );
    }
    out.push(gauss.last().expect("levels >= 1").clone());
    Ok(PyramidStack { levels: out })
}
