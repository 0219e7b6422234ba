//! Connectivity error.
//!
//! For `theta = step, 2 step, ..., 1` the largest 4-connected component of
//! `{pred >= theta} & {gt >= theta}` is the source region (ties go to the
//! component reached first in row-major order). A pixel's level `l` is the
//! threshold just below the first one at which it is outside the source
//! region, or 1 if it never leaves. With `d = alpha - l`, the degree of
//! connectivity is `phi = 1 - d` where `d >= 0.15` and 1 elsewhere; the
//! error sums `|phi(pred) - phi(gt)|` over the region.

use crate::error::{Error, Result};
use crate::imgcore::{AlphaMatte, BinaryMask, Raster};

use super::metrics::{check_inputs, region_indices};

pub const DEFAULT_THETA_STEP: f64 = 0.1;
const PHI_CUTOFF: f64 = 0.15;

/// Largest 4-connected component of `mask`, or all-false when `mask` is
/// empty.
pub fn largest_component(mask: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut label = vec![0u32; w * h];
    let mut best = (0u32, 0usize);
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        stack.push(start);
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if mask[j] && label[j] == 0 {
                    label[j] = next;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if size > best.1 {
            best = (next, size);
        }
    }
    label.iter().map(|&l| best.0 != 0 && l == best.0).collect()
}

fn thresholds(step: f64) -> Result<Vec<f64>> {
    let n = (1.0 / step).round();
    if step.is_nan() || step <= 0.0 || n.is_nan() || n < 1.0 || (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "threshold step {step} must divide 1"
        )));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Per-pixel level map described in the module docs. `None` when the
/// intersection is empty at the first threshold.
pub fn level_map(pred: &AlphaMatte, gt: &AlphaMatte, theta_step: f64) -> Result<Option<Vec<f64>>> {
    let (w, h) = pred.dims();
    let steps = thresholds(theta_step)?;
    let (p, g) = (pred.as_slice(), gt.as_slice());
    let mut level = vec![f64::NAN; w * h];
    for i in 1..steps.len() {
        let theta = steps[i];
        let both: Vec<bool> = p
            .iter()
            .zip(g)
            .map(|(&a, &b)| a >= theta && b >= theta)
            .collect();
        let omega = largest_component(&both, w, h);
        if i == 1 && !omega.iter().any(|&b| b) {
            return Ok(None);
        }
        for (l, &inside) in level.iter_mut().zip(&omega) {
            if l.is_nan() && !inside {
                *l = steps[i - 1];
            }
        }
    }
    for l in level.iter_mut().filter(|l| l.is_nan()) {
        *l = 1.0;
    }
    Ok(Some(level))
}

fn phi(alpha: f64, level: f64) -> f64 {
    let d = alpha - level;
    if d >= PHI_CUTOFF {
        1.0 - d
    } else {
        1.0
    }
}

/// Connectivity error over `region`. Returns 0 with a warning when the two
/// mattes share no pixel at or above the first threshold.
pub fn connectivity_error(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    region: Option<&BinaryMask>,
    theta_step: f64,
) -> Result<f64> {
    check_inputs(pred, gt, region)?;
    let Some(level) = level_map(pred, gt, theta_step)? else {
        log::warn!("connectivity error: no source region at any threshold, reporting 0");
        return Ok(0.0);
    };
    let (p, g) = (pred.as_slice(), gt.as_slice());
    Ok(region_indices(p.len(), region)
        .map(|i| (phi(p[i], level[i]) - phi(g[i], level[i])).abs())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> AlphaMatte {
        let w = rows[0].len();
        AlphaMatte::from_vec(w, rows.len(), rows.concat()).unwrap()
    }

    #[test]
    fn largest_component_ties_and_empty() {
        let m = [true, false, true, true, false, false, true, true, false];
        assert_eq!(
            largest_component(&m, 3, 3),
            vec![true, false, false, true, false, false, true, true, false]
        );
        let tie = [true, false, true];
        assert_eq!(largest_component(&tie, 3, 1), vec![true, false, false]);
        assert!(largest_component(&[false; 4], 2, 2).iter().all(|b| !b));
    }

    #[test]
    fn identical_is_zero_and_blob_is_penalized() {
        let mut gt = vec![0.0; 64];
        for y in 2..6 {
            for x in 1..4 {
                gt[y * 8 + x] = 1.0;
            }
        }
        let gt = AlphaMatte::from_vec(8, 8, gt).unwrap();
        assert_eq!(connectivity_error(&gt, &gt, None, 0.1).unwrap(), 0.0);
        let mut pred = gt.as_slice().to_vec();
        pred[2 * 8 + 6] = 1.0;
        pred[3 * 8 + 6] = 1.0;
        let pred = AlphaMatte::from_vec(8, 8, pred).unwrap();
        let e = connectivity_error(&pred, &gt, None, 0.1).unwrap();
        // each detached pixel: level 0, phi_pred = 0, phi_gt = 1
        assert!((e - 2.0).abs() < 1e-12, "{e}");
    }

    #[test]
    fn hand_computed_levels() {
        // source: left 2x1 block stays above every threshold; the right
        // pixel is joined to it until it drops below 0.5
        let gt = from_rows(&[&[1.0, 1.0, 0.9]]);
        let pred = from_rows(&[&[1.0, 1.0, 0.45]]);
        let level = level_map(&pred, &gt, 0.1).unwrap().unwrap();
        assert_eq!(level[..2], [1.0, 1.0]);
        assert!((level[2] - 0.4).abs() < 1e-12);
        // phi_gt = 1 - 0.5, phi_pred = 1 (0.05 below cutoff)
        let e = connectivity_error(&pred, &gt, None, 0.1).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_source_reports_zero() {
        let a = from_rows(&[&[0.0, 0.05]]);
        let b = from_rows(&[&[0.9, 0.0]]);
        assert_eq!(connectivity_error(&a, &b, None, 0.1).unwrap(), 0.0);
        assert!(connectivity_error(&a, &b, None, 0.3).is_err());
    }
}
