//! # mattekit
//!
//! Deterministic machinery for salient-object image matting pipelines:
//!
//! - [`imgcore`]: raster types, PNG I/O, Euclidean-disk morphology, exact
//!   distance transform, bilinear resampling and Laplacian pyramids.
//! - [`trimapgen`]: adaptive trimaps from coarse masks (band width scales
//!   with object size and boundary class) and erosion/dilation trimaps from
//!   ground-truth alphas.
//! - [`compose`]: alpha compositing and synthetic training-set synthesis.
//! - [`fuse`]: probabilistic trimaps, the `F + U * alpha` fusion rule and the
//!   PTM interchange format.
//! - [`evalmetrics`]: SAD, MSE, gradient and connectivity errors plus the
//!   matting, Laplacian, joint and cross-entropy losses.
//!
//! All operations are pure functions over immutable inputs.

pub mod compose;
pub mod error;
pub mod evalmetrics;
pub mod fuse;
pub mod imgcore;
pub mod trimapgen;

pub use error::{Error, Result};
pub use imgcore::{
    AlphaMatte, BinaryMask, GrayMap, Image, PyramidStack, Raster, Trimap, TrimapClass,
};
