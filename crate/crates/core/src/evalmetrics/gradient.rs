//! Gradient error with first-order Gaussian derivative filters.
//!
//! The 2-D filter for the x direction is `g(y) * g'(x)` on a
//! `(2h + 1) x (2h + 1)` support, `h = ceil(sigma * sqrt(-2 ln(sqrt(2 pi) *
//! sigma * 0.01)))`, normalized to unit L2 norm. The y filter is its
//! transpose. Filtering is true convolution with replicated edges.

use crate::error::{Error, Result};
use crate::imgcore::{AlphaMatte, BinaryMask, GrayMap, Raster};

use super::metrics::{check_inputs, region_indices};

pub const DEFAULT_SIGMA: f64 = 1.4;

/// Filter half-width for `sigma`.
pub fn half_size(sigma: f64) -> usize {
    let eps = 1e-2;
    (sigma * (-2.0 * ((2.0 * std::f64::consts::PI).sqrt() * sigma * eps).ln()).sqrt()).ceil()
        as usize
}

fn gauss(x: f64, sigma: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn dgauss(x: f64, sigma: f64) -> f64 {
    -x * gauss(x, sigma) / (sigma * sigma)
}

/// Smoothing and derivative taps, each scaled so that their outer product
/// has unit L2 norm. Index `k` holds offset `k - h`.
pub fn derivative_kernels(sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let h = half_size(sigma) as isize;
    let g: Vec<f64> = (-h..=h).map(|u| gauss(u as f64, sigma)).collect();
    let d: Vec<f64> = (-h..=h).map(|u| dgauss(u as f64, sigma)).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (ng, nd) = (norm(&g), norm(&d));
    (
        g.iter().map(|v| v / ng).collect(),
        d.iter().map(|v| v / nd).collect(),
    )
}

/// `out(i) = sum_k taps[k] * in(i - (k - h))` along rows or columns.
fn convolve_1d(src: &[f64], w: usize, h: usize, taps: &[f64], horizontal: bool) -> Vec<f64> {
    let half = (taps.len() / 2) as isize;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let off = k as isize - half;
                let (sx, sy) = if horizontal {
                    ((x as isize - off).clamp(0, w as isize - 1) as usize, y)
                } else {
                    (x, (y as isize - off).clamp(0, h as isize - 1) as usize)
                };
                acc += t * src[sy * w + sx];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// `(gx, gy)` derivative responses of `map`.
pub fn gaussian_gradients(map: &GrayMap, sigma: f64) -> (GrayMap, GrayMap) {
    let (w, h) = map.dims();
    let (g, d) = derivative_kernels(sigma);
    let src = map.as_slice();
    let gx = convolve_1d(&convolve_1d(src, w, h, &d, true), w, h, &g, false);
    let gy = convolve_1d(&convolve_1d(src, w, h, &g, true), w, h, &d, false);
    (
        GrayMap::from_vec(w, h, gx).expect("same dims"),
        GrayMap::from_vec(w, h, gy).expect("same dims"),
    )
}

/// Sum over `region` of `|grad pred - grad gt|^q`, the Euclidean norm of
/// the gradient difference raised to `q`.
pub fn gradient_error(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: Option<&BinaryMask>,
    sigma: f64,
    q: f64,
) -> Result<f64> {
    check_inputs(pred, gt, region)?;
    if sigma.is_nan() || sigma <= 0.0 || q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gradient error needs sigma > 0 and q > 0, got {sigma} and {q}"
        )));
    }
    let (px, py) = gaussian_gradients(pred, sigma);
    let (gx, gy) = gaussian_gradients(gt, sigma);
    let (px, py, gx, gy) = (px.as_slice(), py.as_slice(), gx.as_slice(), gy.as_slice());
    Ok(region_indices(pred.len(), region)
        .map(|i| {
            let sq = (px[i] - gx[i]).powi(2) + (py[i] - gy[i]).powi(2);
            if q == 2.0 {
                sq
            } else {
                sq.sqrt().powf(q)
            }
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Full 2-D kernel evaluated directly, then normalized.
    fn kernel_2d(sigma: f64) -> Vec<Vec<f64>> {
        let h = half_size(sigma) as isize;
        let mut k: Vec<Vec<f64>> = (-h..=h)
            .map(|v| {
                (-h..=h)
                    .map(|u| gauss(v as f64, sigma) * dgauss(u as f64, sigma))
                    .collect()
            })
            .collect();
        let norm = k.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        k.iter_mut().flatten().for_each(|x| *x /= norm);
        k
    }

    fn direct(map: &GrayMap, k: &[Vec<f64>], transpose: bool) -> Vec<f64> {
        let (w, h) = map.dims();
        let half = (k.len() / 2) as isize;
        let mut out = vec![0.0; w * h];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut acc = 0.0;
                for (r, row) in k.iter().enumerate() {
                    for (c, _) in row.iter().enumerate() {
                        let t = if transpose { k[c][r] } else { k[r][c] };
                        let sx = (x - (c as isize - half)).clamp(0, w as isize - 1) as usize;
                        let sy = (y - (r as isize - half)).clamp(0, h as isize - 1) as usize;
                        acc += t * map.get(sx, sy);
                    }
                }
                out[y as usize * w + x as usize] = acc;
            }
        }
        out
    }

    #[test]
    fn half_size_for_default_sigma() {
        assert_eq!(half_size(1.4), 4);
    }

    #[test]
    fn separable_matches_direct_filter_bank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let map = GrayMap::from_fn(13, 11, |_, _| rng.gen()).unwrap();
        let k = kernel_2d(1.4);
        let (gx, gy) = gaussian_gradients(&map, 1.4);
        for (a, b) in gx.as_slice().iter().zip(direct(&map, &k, false)) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in gy.as_slice().iter().zip(direct(&map, &k, true)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_edges() {
        let step =
            |s: usize| AlphaMatte::from_fn(32, 32, move |x, _| (x >= s) as u8 as f64).unwrap();
        let (a, b) = (step(14), step(16));
        let k = kernel_2d(1.4);
        let (ax, ay) = (direct(&a, &k, false), direct(&a, &k, true));
        let (bx, by) = (direct(&b, &k, false), direct(&b, &k, true));
        let oracle: f64 = (0..32 * 32)
            .map(|i| (ax[i] - bx[i]).powi(2) + (ay[i] - by[i]).powi(2))
            .sum();
        let got = gradient_error(&a, &b, None, 1.4, 2.0).unwrap();
        assert!(oracle > 0.0);
        assert!((got - oracle).abs() < 1e-6);
        // a rightward increasing ramp has positive x response
        assert!(gaussian_gradients(&a, 1.4).0.get(14, 5) > 0.0);
    }

    #[test]
    fn constants_have_no_gradient() {
        let a = AlphaMatte::filled(9, 9, 0.2).unwrap();
        let b = AlphaMatte::filled(9, 9, 0.9).unwrap();
        assert!(gradient_error(&a, &b, None, 1.4, 2.0).unwrap() < 1e-20);
        assert!(gradient_error(&a, &a, None, 1.4, 2.0).unwrap() == 0.0);
        assert!(gradient_error(&a, &b, None, 0.0, 2.0).is_err());
    }
}
