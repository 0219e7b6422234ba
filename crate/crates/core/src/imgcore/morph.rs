//! Binary morphology with Euclidean-disk structuring elements, exact
//! Euclidean distance transform, and 4-neighborhood boundary extraction.
//!
//! Pixels outside the frame count as background everywhere in this
//! module: the distance transform measures distance to the frame as well,
//! and erosion eats a band along the frame edge.

use super::raster::{BinaryMask, GrayMap, Raster};

/// Stand-in for "no feature on this line"; large enough that it never wins
/// against a real squared distance yet keeps the parabola arithmetic finite.
const FAR: f64 = 1e20;

/// One-dimensional squared distance transform of a sampled function
/// (lower envelope of parabolas, Felzenszwalb & Huttenlocher).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let sq = |q: usize| (q * q) as f64;
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = ((f[q] + sq(q)) - (f[p] + sq(p))) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Squared Euclidean distance from every pixel of a `width`×`height` grid
/// to the nearest pixel flagged in `features`. Pixels with no feature
/// anywhere get a value `>= FAR`.
pub(crate) fn squared_edt(width: usize, height: usize, features: &[bool]) -> Vec<f64> {
    debug_assert_eq!(features.len(), width * height);
    let mut grid: Vec<f64> = features
        .iter()
        .map(|&f| if f { 0.0 } else { FAR })
        .collect();

    let n = width.max(height);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for x in 0..width {
        for y in 0..height {
            line[y] = grid[y * width + x];
        }
        edt_1d(&line[..height], &mut out[..height], &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = out[y];
        }
    }
    for row in grid.chunks_mut(width) {
        line[..width].copy_from_slice(row);
        edt_1d(&line[..width], &mut out[..width], &mut v, &mut z);
        row.copy_from_slice(&out[..width]);
    }
    grid
}

/// Squared distance from each pixel to the nearest background pixel, with
/// a one-pixel background frame around the raster.
fn squared_distance_to_background(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = mask.dims();
    let (pw, ph) = (w + 2, h + 2);
    let mut features = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            features[(y + 1) * pw + x + 1] = !mask.get(x, y);
        }
    }
    let padded = squared_edt(pw, ph, &features);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        out.extend_from_slice(&padded[(y + 1) * pw + 1..(y + 1) * pw + 1 + w]);
    }
    out
}

/// Exact Euclidean distance from every `true` pixel to the nearest `false`
/// pixel or to the outside of the frame; `false` pixels map to 0.
pub fn distance_transform(mask: &BinaryMask) -> GrayMap {
    let sq = squared_distance_to_background(mask);
    let data = sq.into_iter().map(f64::sqrt).collect();
    GrayMap::from_vec(mask.width(), mask.height(), data).expect("dims come from a valid mask")
}

/// Dilation by a Euclidean disk: `p` is set iff some set pixel lies within
/// distance `radius` of it.
pub fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let limit = (radius as f64) * (radius as f64);
    let sq = squared_edt(mask.width(), mask.height(), mask.as_slice());
    let mut out = BinaryMask::falses_like(mask);
    for (o, d) in out.as_mut_slice().iter_mut().zip(sq) {
        *o = d <= limit;
    }
    out
}

/// Erosion by a Euclidean disk: `p` survives iff every pixel within
/// distance `radius`, including positions outside the frame, is set.
/// Equals `complement(dilate(complement(m), radius))` on a background-padded
/// raster.
pub fn erode(mask: &BinaryMask, radius: u32) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let limit = (radius as f64) * (radius as f64);
    let sq = squared_distance_to_background(mask);
    let mut out = BinaryMask::falses_like(mask);
    for (o, d) in out.as_mut_slice().iter_mut().zip(sq) {
        *o = d > limit;
    }
    out
}

/// Set pixels with at least one unset 4-neighbor; the frame counts as unset.
pub fn boundary(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::falses_like(mask);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let edge = x == 0
                || y == 0
                || x + 1 == w
                || y + 1 == h
                || !mask.get(x - 1, y)
                || !mask.get(x + 1, y)
                || !mask.get(x, y - 1)
                || !mask.get(x, y + 1);
            out.set(x, y, edge);
        }
    }
    out
}
