//! Raster types, PNG I/O, morphology, distance transform, resampling and
//! pyramids.

pub mod geometry;
pub mod io;
pub mod morph;
pub mod pyramid;
pub mod raster;

pub use geometry::{resize_nearest, Crop, FlipHorizontal, ResizeBilinear};
pub use io::{
    load_alpha, load_gray, load_image, load_mask, load_png, load_trimap, Loaded, PngKind, SavePng,
};
pub use morph::{boundary, dilate, distance_transform, erode};
pub use pyramid::{gaussian_pyramid, laplacian_pyramid, PyramidStack};
pub use raster::{
    ensure_same_dims, AlphaMatte, BinaryMask, GrayMap, Image, Raster, Trimap, TrimapClass,
};
