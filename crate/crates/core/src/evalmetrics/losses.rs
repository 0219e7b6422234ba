//! Forward values of the training losses. L1 terms are sums, not means.

use serde::{Deserialize, Serialize};

use crate::compose::composite;
use crate::error::{Error, Result};
use crate::fuse::ProbTrimap;
use crate::imgcore::{
    ensure_same_dims, laplacian_pyramid, AlphaMatte, BinaryMask, GrayMap, Image, Raster, Trimap,
};

use super::metrics::{check_inputs, region_indices};

pub const LAPLACIAN_LEVELS: usize = 5;
/// Probability floor applied before taking logs.
pub const CE_FLOOR: f32 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w1: 1.0,
            w2: 1.0,
            w3: 1.0,
            w4: 1.0,
        }
    }
}

impl LossWeights {
    pub fn new(w1: f64, w2: f64, w3: f64, w4: f64) -> Result<Self> {
        let w = Self { w1, w2, w3, w4 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w1", self.w1),
            ("w2", self.w2),
            ("w3", self.w3),
            ("w4", self.w4),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// `sum_i 2^(i-1) * |L_i(pred) - L_i(gt)|_1` over `levels` Laplacian levels.
pub fn laplacian_loss(pred: &GrayMap, gt: &GrayMap, levels: usize) -> Result<f64> {
    ensure_same_dims(pred, gt)?;
    let lp = laplacian_pyramid(pred, levels)?;
    let lg = laplacian_pyramid(gt, levels)?;
    Ok(lp
        .levels()
        .iter()
        .zip(lg.levels())
        .enumerate()
        .map(|(i, (a, b))| {
            let l1: f64 = a
                .as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| (x - y).abs())
                .sum();
            2f64.powi(i as i32) * l1
        })
        .sum())
}

/// Inputs of the overall matting loss.
#[derive(Clone, Copy, Debug)]
pub struct MattingInputs<'a> {
    pub pred_alpha: &'a AlphaMatte,
    pub gt_alpha: &'a AlphaMatte,
    pub fg: &'a Image,
    pub bg: &'a Image,
    /// Ground-truth composite.
    pub real_image: &'a Image,
    /// Restricts the two L1 terms; the Laplacian term always covers the
    /// whole image.
    pub region: Option<&'a BinaryMask>,
}

/// Unweighted terms of the matting loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MattingParts {
    pub alpha_l1: f64,
    pub composition_l1: f64,
    pub laplacian: f64,
}

impl MattingParts {
    pub fn total(&self, w: &LossWeights) -> f64 {
        w.w1 * self.alpha_l1 + w.w2 * self.composition_l1 + w.w3 * self.laplacian
    }
}

pub fn matting_parts(inputs: &MattingInputs<'_>) -> Result<MattingParts> {
    let MattingInputs {
        pred_alpha,
        gt_alpha,
        fg,
        bg,
        real_image,
        region,
    } = *inputs;
    check_inputs(pred_alpha, gt_alpha, region)?;
    ensure_same_dims(pred_alpha, real_image)?;
    let predicted = composite(fg, bg, pred_alpha)?;

    let (p, g) = (pred_alpha.as_slice(), gt_alpha.as_slice());
    let alpha_l1 = region_indices(p.len(), region)
        .map(|i| (p[i] - g[i]).abs())
        .sum();
    let composition_l1 = (0..3)
        .map(|c| {
            let (a, b) = (predicted.plane(c), real_image.plane(c));
            region_indices(a.len(), region)
                .map(|i| (a[i] - b[i]).abs())
                .sum::<f64>()
        })
        .sum();
    let laplacian = laplacian_loss(pred_alpha, gt_alpha, LAPLACIAN_LEVELS)?;
    Ok(MattingParts {
        alpha_l1,
        composition_l1,
        laplacian,
    })
}

/// `w1 * L1(alpha) + w2 * L1(composite) + w3 * L_lap`.
pub fn matting_loss(inputs: &MattingInputs<'_>, weights: &LossWeights) -> Result<f64> {
    weights.validate()?;
    Ok(matting_parts(inputs)?.total(weights))
}

/// Foreground maps supervising the joint loss.
#[derive(Clone, Copy, Debug)]
pub struct JointBatchSupervision<'a> {
    /// `F_s`
    pub coarse_fg_map: &'a GrayMap,
    /// Predicted `F_s`
    pub predicted_fg_map: &'a GrayMap,
}

/// `sum over F_s > 0 of |predicted - F_s|`.
pub fn foreground_term(sup: &JointBatchSupervision<'_>) -> Result<f64> {
    let (f, p) = (sup.coarse_fg_map, sup.predicted_fg_map);
    ensure_same_dims(f, p)?;
    Ok(f.as_slice()
        .iter()
        .zip(p.as_slice())
        .filter(|(&fs, _)| fs > 0.0)
        .map(|(fs, fp)| (fp - fs).abs())
        .sum())
}

/// `L_M + w4 * foreground_term`.
pub fn joint_loss(
    inputs: &MattingInputs<'_>,
    sup: &JointBatchSupervision<'_>,
    weights: &LossWeights,
) -> Result<f64> {
    ensure_same_dims(inputs.pred_alpha, sup.coarse_fg_map)?;
    Ok(matting_loss(inputs, weights)? + weights.w4 * foreground_term(sup)?)
}

/// Mean over pixels of `-ln p(gt class)`, probabilities clamped to
/// `[1e-7, 1]`.
pub fn stn_ce_loss(prob: &ProbTrimap, gt: &Trimap) -> Result<f64> {
    ensure_same_dims(prob, gt)?;
    let n = gt.len();
    let sum: f64 = (0..n)
        .map(|i| -(prob.prob_of(i, gt.class_at(i)).clamp(CE_FLOOR, 1.0) as f64).ln())
        .sum();
    Ok(sum / n as f64)
}
