//! Manifest generation and rendering for synthetic training composites.
//!
//! A manifest is JSON Lines, one [`SynthRecord`] per line. Crop coordinates
//! refer to the source after [`upscale_to_fit`]; the trimap used for crop
//! placement and rendering is the noisy erosion/dilation trimap of the
//! (upscaled) alpha seeded with the record's `jitter_seed`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{augment, sample_crop, CompositeSample, CROP_SIZES};
use crate::error::{Error, Result};
use crate::imgcore::{
    ensure_same_dims, load_alpha, load_image, resize_nearest, AlphaMatte, Crop, FlipHorizontal,
    Raster, ResizeBilinear, SavePng, Trimap,
};
use crate::trimapgen::noisy_trimap;

const BACKGROUND_SALT: u64 = 0x6267_6372_6f70;

/// One synthetic sample, fully determined by its fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthRecord {
    pub fg: PathBuf,
    pub alpha: PathBuf,
    pub bg: PathBuf,
    pub x: usize,
    pub y: usize,
    pub size: usize,
    pub flip: bool,
    pub jitter_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Noisy trimap kernel radius range.
    pub k_min: u32,
    pub k_max: u32,
    pub jitter_strength: f64,
    pub out_size: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            k_min: 3,
            k_max: 25,
            jitter_strength: 0.2,
            out_size: 320,
        }
    }
}

/// Bilinearly enlarges `raster` so both sides are at least `size`, keeping
/// the aspect ratio. Sources that already fit are returned unchanged.
pub fn upscale_to_fit<T: ResizeBilinear + Raster + Clone>(raster: &T, size: usize) -> Result<T> {
    let (w, h) = raster.dims();
    let short = w.min(h);
    if short >= size {
        return Ok(raster.clone());
    }
    let f = size as f64 / short as f64;
    let nw = ((w as f64 * f).ceil() as usize).max(size);
    let nh = ((h as f64 * f).ceil() as usize).max(size);
    raster.resize_bilinear(nw, nh)
}

/// PNG files directly inside `dir`, sorted by file name.
pub fn list_pngs(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            out.push(path);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    out.sort();
    Ok(out)
}

fn stem_of(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Pairs two file lists by stem. Any file without a partner is an error.
pub fn pair_by_stem(fgs: &[PathBuf], alphas: &[PathBuf]) -> Result<Vec<(PathBuf, PathBuf)>> {
    let mut by_stem: BTreeMap<String, &PathBuf> = alphas.iter().map(|p| (stem_of(p), p)).collect();
    let mut pairs = Vec::with_capacity(fgs.len());
    for fg in fgs {
        let alpha = by_stem
            .remove(&stem_of(fg))
            .ok_or_else(|| Error::UnpairedForeground(fg.clone()))?;
        pairs.push((fg.clone(), alpha.clone()));
    }
    if let Some((_, alpha)) = by_stem.into_iter().next() {
        return Err(Error::UnpairedAlpha(alpha.clone()));
    }
    Ok(pairs)
}

/// Builds `per_fg` records per foreground. Backgrounds cycle through
/// `bg_dirs` in turn, each directory drawing from its own shuffled pool, so
/// every directory is used in equal proportion.
pub fn synthesize_manifest(
    fg_dir: impl AsRef<Path>,
    alpha_dir: impl AsRef<Path>,
    bg_dirs: &[PathBuf],
    per_fg: usize,
    seed: u64,
    config: &SynthConfig,
) -> Result<Vec<SynthRecord>> {
    let pairs = pair_by_stem(&list_pngs(fg_dir)?, &list_pngs(alpha_dir)?)?;
    if bg_dirs.is_empty() {
        return Err(Error::InvalidParameter("no background directories".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pools = bg_dirs.iter().map(list_pngs).collect::<Result<Vec<_>>>()?;
    for pool in &mut pools {
        pool.shuffle(&mut rng);
    }
    let mut used = vec![0usize; pools.len()];

    let mut records = Vec::with_capacity(pairs.len() * per_fg);
    for (fg, alpha_path) in &pairs {
        if per_fg == 0 {
            break;
        }
        let alpha = load_alpha(alpha_path)?;
        for _ in 0..per_fg {
            let jitter_seed = rng.gen::<u32>() as u64;
            let flip = rng.gen_bool(0.5);
            let size = CROP_SIZES[rng.gen_range(0..CROP_SIZES.len())];
            let crop_seed = rng.gen::<u64>();

            let alpha_up = upscale_to_fit(&alpha, size)?;
            let trimap = noisy_trimap(&alpha_up, jitter_seed, config.k_min, config.k_max)?;
            let win = sample_crop(&alpha_up, &trimap, size, crop_seed).map_err(|e| {
                log::error!("{}: {e}", alpha_path.display());
                e
            })?;
            // a mirrored render reads one column further right so the
            // sampled pixel stays at the output center
            let x = if flip {
                (win.x + 1).min(alpha_up.width() - size)
            } else {
                win.x
            };

            let d = records.len() % pools.len();
            let bg = pools[d][used[d] % pools[d].len()].clone();
            used[d] += 1;

            records.push(SynthRecord {
                fg: fg.clone(),
                alpha: alpha_path.clone(),
                bg,
                x,
                y: win.y,
                size,
                flip,
                jitter_seed,
            });
        }
    }
    Ok(records)
}

pub fn write_manifest(records: &[SynthRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parses a manifest; blank lines are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<SynthRecord>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|source| Error::Manifest {
            line: i + 1,
            source,
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// A rendered composite with its training trimap.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedSample {
    pub sample: CompositeSample,
    pub trimap: Trimap,
}

/// Loads, crops, resizes and augments one record.
///
/// The trimap is cropped, mirrored when `flip` is set, then resized with
/// nearest sampling, which keeps the sampled unknown pixel at the output
/// center. The background gets its own random window of the crop size.
pub fn render_record(record: &SynthRecord, config: &SynthConfig) -> Result<RenderedSample> {
    let (size, out) = (record.size, config.out_size);
    if !CROP_SIZES.contains(&size) {
        return Err(Error::InvalidCropSize(size));
    }
    let fg = load_image(&record.fg)?;
    let alpha = load_alpha(&record.alpha)?;
    ensure_same_dims(&fg, &alpha)?;
    let fg = upscale_to_fit(&fg, size)?;
    let alpha = upscale_to_fit(&alpha, size)?;

    let trimap = noisy_trimap(&alpha, record.jitter_seed, config.k_min, config.k_max)?
        .crop(record.x, record.y, size, size)?;
    let trimap = if record.flip {
        trimap.flip_horizontal()
    } else {
        trimap
    };
    let trimap = resize_nearest(&trimap, out, out)?;

    let fg = fg
        .crop(record.x, record.y, size, size)?
        .resize_bilinear(out, out)?;
    let alpha: AlphaMatte = alpha
        .crop(record.x, record.y, size, size)?
        .resize_bilinear(out, out)?;

    let bg = upscale_to_fit(&load_image(&record.bg)?, size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(record.jitter_seed ^ BACKGROUND_SALT);
    let bx = rng.gen_range(0..=bg.width() - size);
    let by = rng.gen_range(0..=bg.height() - size);
    let bg = bg.crop(bx, by, size, size)?.resize_bilinear(out, out)?;

    let base = CompositeSample::new(fg, bg, alpha)?;
    let sample = augment(
        &base,
        record.flip,
        record.jitter_seed,
        config.jitter_strength,
    )?;
    Ok(RenderedSample { sample, trimap })
}

/// Where [`render_to_dir`] put a triplet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripletPaths {
    pub composite: PathBuf,
    pub alpha: PathBuf,
    pub trimap: PathBuf,
}

impl TripletPaths {
    /// `out_dir/{composite,alpha,trimap}/{index:06}.png`
    pub fn for_index(out_dir: impl AsRef<Path>, index: usize) -> Self {
        let out_dir = out_dir.as_ref();
        let name = format!("{index:06}.png");
        Self {
            composite: out_dir.join("composite").join(&name),
            alpha: out_dir.join("alpha").join(&name),
            trimap: out_dir.join("trimap").join(&name),
        }
    }
}

/// Renders `record` and writes its PNG triplet.
pub fn render_to_dir(
    record: &SynthRecord,
    index: usize,
    out_dir: impl AsRef<Path>,
    config: &SynthConfig,
) -> Result<TripletPaths> {
    let paths = TripletPaths::for_index(out_dir, index);
    for p in [&paths.composite, &paths.alpha, &paths.trimap] {
        let parent = p.parent().expect("joined path");
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let r = render_record(record, config)?;
    r.sample.composite.save_png(&paths.composite)?;
    r.sample.alpha.save_png(&paths.alpha)?;
    r.trimap.save_png(&paths.trimap)?;
    Ok(paths)
}
