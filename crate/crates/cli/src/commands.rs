//! Single-image subcommands.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use serde_json::json;

use mattekit::compose::composite;
use mattekit::fuse::{self as fusion, read_ptm};
use mattekit::imgcore::{laplacian_pyramid, load_alpha, load_gray, load_image, load_mask, SavePng};
use mattekit::trimapgen::{
    adaptive_trimap, classify_boundary, conventional_trimap, noisy_kernel_radius, AdaptiveReport,
    ClassHint, TrimapParams,
};
use mattekit::{Raster, TrimapClass};

use crate::args::{ComposeArgs, FuseArgs, HardenArgs, PyramidArgs, TrimapArgs, TrimapConvArgs};

pub fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

pub fn require_file(path: &Path) -> Result<()> {
    ensure!(path.is_file(), "{}: no such file", path.display());
    Ok(())
}

pub fn require_dir(path: &Path) -> Result<()> {
    ensure!(path.is_dir(), "{}: no such directory", path.display());
    Ok(())
}

/// Creates the parent directory of an output path.
pub fn prepare_output(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

pub fn trimap(a: &TrimapArgs) -> Result<()> {
    require_file(&a.mask)?;
    if let Some(h) = &a.hair_mask {
        require_file(h)?;
    }
    prepare_output(&a.out)?;

    let mask = load_mask(&a.mask)?;
    let parsing = a.hair_mask.as_deref().map(load_mask).transpose()?;
    let hint = ClassHint::from_inputs(parsing.as_ref(), a.fur)?;
    let classes = classify_boundary(&mask, hint)?;
    let params = TrimapParams::for_mask(&mask).with_rates(a.rates.hair, a.rates.fur, a.rates.solid);
    let trimap = adaptive_trimap(&mask, &classes, &params)?;
    trimap.save_png(&a.out)?;
    log::info!("wrote {}", a.out.display());
    print_json(&AdaptiveReport::new(&params, &classes))
}

pub fn trimap_conv(a: &TrimapConvArgs, seed: u64) -> Result<()> {
    require_file(&a.alpha)?;
    prepare_output(&a.out)?;
    let alpha = load_alpha(&a.alpha)?;
    let k = match a.kernel {
        Some(k) => k,
        None => noisy_kernel_radius(seed, a.k_min, a.k_max)?,
    };
    let trimap = conventional_trimap(&alpha, k)?;
    trimap.save_png(&a.out)?;
    print_json(&json!({
        "kernel_radius": k,
        "unknown_pixels": trimap.count(TrimapClass::Unknown),
    }))
}

pub fn compose(a: &ComposeArgs) -> Result<()> {
    for p in [&a.fg, &a.bg, &a.alpha] {
        require_file(p)?;
    }
    prepare_output(&a.out)?;
    let fg = load_image(&a.fg)?;
    let bg = load_image(&a.bg)?;
    let alpha = load_alpha(&a.alpha)?;
    composite(&fg, &bg, &alpha)?.save_png(&a.out)?;
    print_json(&json!({ "width": fg.width(), "height": fg.height() }))
}

pub fn fuse(a: &FuseArgs) -> Result<()> {
    require_file(&a.ptm)?;
    require_file(&a.alpha)?;
    prepare_output(&a.out)?;
    let prob = read_ptm(&a.ptm).with_context(|| format!("reading {}", a.ptm.display()))?;
    let alpha = load_alpha(&a.alpha)?;
    let fused = fusion::fuse(&prob, &alpha)?;
    fused.save_png(&a.out)?;
    print_json(&json!({
        "width": fused.width(),
        "height": fused.height(),
        "mean_alpha": fused.sum() / fused.len() as f64,
    }))
}

pub fn harden(a: &HardenArgs) -> Result<()> {
    require_file(&a.ptm)?;
    prepare_output(&a.out)?;
    let prob = read_ptm(&a.ptm).with_context(|| format!("reading {}", a.ptm.display()))?;
    let trimap = fusion::harden(&prob);
    trimap.save_png(&a.out)?;
    print_json(&json!({
        "background": trimap.count(TrimapClass::Background),
        "unknown": trimap.count(TrimapClass::Unknown),
        "foreground": trimap.count(TrimapClass::Foreground),
    }))
}

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    width: usize,
    height: usize,
    min: f64,
    max: f64,
    l1: f64,
    path: String,
}

/// Band-pass levels are written shifted by +0.5 so zero maps to mid gray;
/// the coarsest level is written as is.
pub fn pyramid(a: &PyramidArgs) -> Result<()> {
    require_file(&a.input)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let map = load_gray(&a.input)?;
    let stack = laplacian_pyramid(&map, a.levels)?;
    let last = stack.count() - 1;
    let mut summary = Vec::with_capacity(stack.count());
    for (i, level) in stack.levels().iter().enumerate() {
        let path = a.out_dir.join(format!("level_{}.png", i + 1));
        let shown = if i == last {
            level.clone()
        } else {
            level.map(|v| v + 0.5)
        };
        shown.save_png(&path)?;
        summary.push(LevelSummary {
            level: i + 1,
            width: level.width(),
            height: level.height(),
            min: level.min(),
            max: level.max(),
            l1: level.as_slice().iter().map(|v| v.abs()).sum(),
            path: path.display().to_string(),
        });
    }
    let reconstructed = stack.reconstruct();
    let max_err = reconstructed
        .as_slice()
        .iter()
        .zip(map.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    print_json(&json!({ "levels": summary, "reconstruction_max_error": max_err }))
}
