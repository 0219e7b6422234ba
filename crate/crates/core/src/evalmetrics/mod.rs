//! Evaluation metrics and forward loss values.
//!
//! SAD is a raw sum over `[0, 1]` alphas and MSE a raw mean; no display
//! scaling is applied except the `mse_x100` report field. Gradient and
//! connectivity errors follow the common alpha matting benchmark
//! definitions (Gaussian derivative filters with sigma 1.4, thresholds in
//! steps of 0.1, 4-connectivity).

mod connectivity;
mod gradient;
mod losses;
mod metrics;

pub use connectivity::{connectivity_error, largest_component, level_map, DEFAULT_THETA_STEP};
pub use gradient::{
    derivative_kernels, gaussian_gradients, gradient_error, half_size, DEFAULT_SIGMA,
};
pub use losses::{
    foreground_term, joint_loss, laplacian_loss, matting_loss, matting_parts, stn_ce_loss,
    JointBatchSupervision, LossWeights, MattingInputs, MattingParts, CE_FLOOR, LAPLACIAN_LEVELS,
};
pub use metrics::{mse, sad};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{ensure_same_dims, AlphaMatte, Raster, Trimap};

/// Pixels a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionMode {
    Whole,
    /// Trimap pixels equal to 128.
    Unknown,
}

impl fmt::Display for RegionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionMode::Whole => "whole",
            RegionMode::Unknown => "unknown",
        })
    }
}

impl FromStr for RegionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(RegionMode::Whole),
            "unknown" => Ok(RegionMode::Unknown),
            _ => Err(Error::InvalidParameter(format!(
                "region must be 'whole' or 'unknown', got '{s}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sad: f64,
    pub mse: f64,
    pub mse_x100: f64,
    pub grad: f64,
    pub conn: f64,
    pub region: RegionMode,
    #[serde(rename = "pixels")]
    pub pixel_count: usize,
}

/// All four metrics over the selected region. Unknown mode needs a trimap
/// with at least one unknown pixel.
pub fn evaluate(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    trimap: Option<&Trimap>,
    region_mode: RegionMode,
) -> Result<MetricsReport> {
    ensure_same_dims(pred, gt)?;
    if let Some(t) = trimap {
        ensure_same_dims(pred, t)?;
    }
    let mask = match region_mode {
        RegionMode::Whole => None,
        RegionMode::Unknown => Some(
            trimap
                .ok_or_else(|| {
                    Error::InvalidParameter("unknown region mode requires a trimap".into())
                })?
                .unknown(),
        ),
    };
    let region = mask.as_ref();
    let pixel_count = region.map_or(pred.len(), |m| m.count());
    let mse = mse(pred, gt, region)?;
    Ok(MetricsReport {
        sad: sad(pred, gt, region)?,
        mse,
        mse_x100: mse * 100.0,
        grad: gradient_error(pred, gt, region, DEFAULT_SIGMA, 2.0)?,
        conn: connectivity_error(pred, gt, region, DEFAULT_THETA_STEP)?,
        region: region_mode,
        pixel_count,
    })
}
