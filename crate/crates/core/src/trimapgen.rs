//! Trimap generation.
//!
//! [`adaptive_trimap`] turns a coarse binary mask into a trimap whose
//! unknown band follows the mask boundary, with a per-pixel band radius
//! that scales with the object's size `D` (the maximum of its distance
//! map) and with the boundary class: hair 3.5 %, fur 2.5 %, solid 1.5 % of
//! `D`. Bands are dilations of the boundary pixels themselves, so they
//! straddle the coarse edge symmetrically.
//!
//! [`conventional_trimap`] is the usual erosion/dilation scheme for
//! ground-truth alphas, and [`noisy_trimap`] draws its kernel radius at
//! random.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imgcore::morph::squared_edt;
use crate::imgcore::{
    boundary, dilate, distance_transform, ensure_same_dims, erode, AlphaMatte, BinaryMask, Raster,
    Trimap,
};

/// Label of a coarse-mask boundary pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryClass {
    None,
    Hair,
    Fur,
    Solid,
}

impl BoundaryClass {
    pub const LABELED: [BoundaryClass; 3] = [
        BoundaryClass::Hair,
        BoundaryClass::Fur,
        BoundaryClass::Solid,
    ];
}

/// Per-pixel boundary labels; non-boundary pixels are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryClassMap {
    width: usize,
    height: usize,
    labels: Vec<BoundaryClass>,
}

impl Raster for BoundaryClassMap {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
}

impl BoundaryClassMap {
    pub fn get(&self, x: usize, y: usize) -> BoundaryClass {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[BoundaryClass] {
        &self.labels
    }

    /// Pixels carrying `class`.
    pub fn mask_of(&self, class: BoundaryClass) -> BinaryMask {
        BinaryMask::from_vec(
            self.width,
            self.height,
            self.labels.iter().map(|&l| l == class).collect(),
        )
        .expect("dims valid by construction")
    }

    pub fn count(&self, class: BoundaryClass) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }
}

/// Object scale plus per-class dilation rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrimapParams {
    pub object_scale: f64,
    pub rate_hair: f64,
    pub rate_fur: f64,
    pub rate_solid: f64,
    pub min_radius: u32,
}

impl TrimapParams {
    pub const RATE_HAIR: f64 = 0.035;
    pub const RATE_FUR: f64 = 0.025;
    pub const RATE_SOLID: f64 = 0.015;

    /// Default rates with the given object scale.
    pub fn with_scale(object_scale: f64) -> Self {
        Self {
            object_scale,
            rate_hair: Self::RATE_HAIR,
            rate_fur: Self::RATE_FUR,
            rate_solid: Self::RATE_SOLID,
            min_radius: 1,
        }
    }

    /// Default rates with `D` measured on `mask`.
    pub fn for_mask(mask: &BinaryMask) -> Self {
        Self::with_scale(object_scale(mask))
    }

    pub fn with_rates(mut self, hair: f64, fur: f64, solid: f64) -> Self {
        self.rate_hair = hair;
        self.rate_fur = fur;
        self.rate_solid = solid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.rate_hair, self.rate_fur, self.rate_solid];
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "dilation rates must be positive, got {rates:?}"
            )));
        }
        if !(self.object_scale.is_finite() && self.object_scale >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "object scale must be non-negative, got {}",
                self.object_scale
            )));
        }
        Ok(())
    }

    pub fn rate(&self, class: BoundaryClass) -> f64 {
        match class {
            BoundaryClass::Hair => self.rate_hair,
            BoundaryClass::Fur => self.rate_fur,
            BoundaryClass::Solid => self.rate_solid,
            BoundaryClass::None => 0.0,
        }
    }

    /// `max(min_radius, round(rate * D))`, rounding halves up.
    pub fn radius(&self, class: BoundaryClass) -> u32 {
        let r = (self.rate(class) * self.object_scale + 0.5).floor();
        (r as u32).max(self.min_radius)
    }
}

/// Maximum of the mask's Euclidean distance map (0 for an empty mask).
pub fn object_scale(mask: &BinaryMask) -> f64 {
    distance_transform(mask).max().max(0.0)
}

/// How boundary pixels should be labeled.
#[derive(Clone, Copy, Debug)]
pub enum ClassHint<'a> {
    /// Every boundary pixel is solid.
    None,
    /// Animals and soft toys: every boundary pixel is fur.
    Fur,
    /// Binary hair/non-hair parsing raster; each boundary pixel takes the
    /// class of its nearest parsing pixel, ties going to hair.
    Hair(&'a BinaryMask),
}

impl<'a> ClassHint<'a> {
    /// Builds a hint from the two optional inputs, rejecting both at once.
    pub fn from_inputs(parsing_mask: Option<&'a BinaryMask>, fur_object: bool) -> Result<Self> {
        match (parsing_mask, fur_object) {
            (Some(_), true) => Err(Error::ConflictingClassHints),
            (Some(p), false) => Ok(ClassHint::Hair(p)),
            (None, true) => Ok(ClassHint::Fur),
            (None, false) => Ok(ClassHint::None),
        }
    }
}

/// Labels each boundary pixel of `mask` as hair, fur or solid.
pub fn classify_boundary(mask: &BinaryMask, hint: ClassHint<'_>) -> Result<BoundaryClassMap> {
    let edge = boundary(mask);
    let (w, h) = mask.dims();
    let labels = match hint {
        ClassHint::None | ClassHint::Fur => {
            let class = if matches!(hint, ClassHint::Fur) {
                BoundaryClass::Fur
            } else {
                BoundaryClass::Solid
            };
            edge.as_slice()
                .iter()
                .map(|&e| if e { class } else { BoundaryClass::None })
                .collect()
        }
        ClassHint::Hair(parsing) => {
            ensure_same_dims(mask, parsing)?;
            let to_hair = squared_edt(w, h, parsing.as_slice());
            let to_other = squared_edt(w, h, parsing.complement().as_slice());
            edge.as_slice()
                .iter()
                .enumerate()
                .map(|(i, &e)| match e {
                    false => BoundaryClass::None,
                    true if to_hair[i] <= to_other[i] => BoundaryClass::Hair,
                    true => BoundaryClass::Solid,
                })
                .collect()
        }
    };
    Ok(BoundaryClassMap {
        width: w,
        height: h,
        labels,
    })
}

/// The unknown region alone: union over classes of the class's boundary
/// pixels dilated by the class radius.
pub fn adaptive_unknown(classes: &BoundaryClassMap, params: &TrimapParams) -> BinaryMask {
    let mut unknown = BinaryMask::falses_like(classes);
    for class in BoundaryClass::LABELED {
        if classes.count(class) == 0 {
            continue;
        }
        let band = dilate(&classes.mask_of(class), params.radius(class));
        for (u, b) in unknown.as_mut_slice().iter_mut().zip(band.as_slice()) {
            *u |= *b;
        }
    }
    unknown
}

/// Adaptive trimap: unknown band around the classified boundary, mask
/// interior foreground, everything else background.
pub fn adaptive_trimap(
    mask: &BinaryMask,
    classes: &BoundaryClassMap,
    params: &TrimapParams,
) -> Result<Trimap> {
    ensure_same_dims(mask, classes)?;
    params.validate()?;
    let unknown = adaptive_unknown(classes, params);
    Trimap::from_regions(mask, &unknown)
}

/// Erosion/dilation trimap of a ground-truth alpha with disk radius
/// `kernel_radius`. Partially transparent pixels and a band around the
/// 0.5 iso-contour are unknown.
pub fn conventional_trimap(alpha: &AlphaMatte, kernel_radius: u32) -> Result<Trimap> {
    if kernel_radius == 0 {
        return Err(Error::InvalidParameter(
            "kernel radius must be at least 1".into(),
        ));
    }
    let binary = BinaryMask::threshold(alpha, |a| a > 0.5);
    let partial = BinaryMask::threshold(alpha, |a| a > 0.0 && a < 1.0);
    let grown = dilate(&binary, kernel_radius);
    let shrunk = erode(&binary, kernel_radius);
    let unknown = grown.minus(&shrunk)?.or(&dilate(&partial, kernel_radius))?;
    Trimap::from_regions(&shrunk, &unknown)
}

/// Kernel radius [`noisy_trimap`] uses for `seed`.
pub fn noisy_kernel_radius(seed: u64, k_min: u32, k_max: u32) -> Result<u32> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k_min <= k_max, got {k_min}..{k_max}"
        )));
    }
    Ok(ChaCha8Rng::seed_from_u64(seed).gen_range(k_min..=k_max))
}

/// [`conventional_trimap`] with a radius drawn uniformly from
/// `k_min..=k_max`, deterministic in `seed`.
pub fn noisy_trimap(alpha: &AlphaMatte, seed: u64, k_min: u32, k_max: u32) -> Result<Trimap> {
    conventional_trimap(alpha, noisy_kernel_radius(seed, k_min, k_max)?)
}

/// Radii and scale reported by the trimap CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptiveReport {
    pub object_scale: f64,
    pub radius_hair: u32,
    pub radius_fur: u32,
    pub radius_solid: u32,
    pub boundary_hair: usize,
    pub boundary_fur: usize,
    pub boundary_solid: usize,
}

impl AdaptiveReport {
    pub fn new(params: &TrimapParams, classes: &BoundaryClassMap) -> Self {
        Self {
            object_scale: params.object_scale,
            radius_hair: params.radius(BoundaryClass::Hair),
            radius_fur: params.radius(BoundaryClass::Fur),
            radius_solid: params.radius(BoundaryClass::Solid),
            boundary_hair: classes.count(BoundaryClass::Hair),
            boundary_fur: classes.count(BoundaryClass::Fur),
            boundary_solid: classes.count(BoundaryClass::Solid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::TrimapClass;
    use proptest::prelude::*;

    fn disk(size: usize, radius: f64) -> BinaryMask {
        let c = (size / 2) as f64;
        BinaryMask::from_fn(size, size, |x, y| {
            (x as f64 - c).powi(2) + (y as f64 - c).powi(2) <= radius * radius
        })
        .unwrap()
    }

    fn rect(w: usize, h: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| (x0..x1).contains(&x) && (y0..y1).contains(&y)).unwrap()
    }

    #[test]
    fn object_scale_cases() {
        assert_eq!(object_scale(&BinaryMask::filled(9, 9, false).unwrap()), 0.0);
        let d = object_scale(&disk(201, 50.0));
        assert!((49.0..=51.0).contains(&d), "{d}");
        // the frame is background: the deepest pixel sits mid-way
        let full = object_scale(&BinaryMask::filled(40, 30, true).unwrap());
        assert_eq!(full, 15.0);
    }

    #[test]
    fn radius_arithmetic() {
        let p = TrimapParams::with_scale(200.0);
        assert_eq!(p.radius(BoundaryClass::Solid), 3);
        assert_eq!(p.radius(BoundaryClass::Fur), 5);
        assert_eq!(p.radius(BoundaryClass::Hair), 7);
        // half rounds up, and tiny objects still get one pixel
        assert_eq!(
            TrimapParams::with_scale(100.0).radius(BoundaryClass::Solid),
            2
        );
        assert_eq!(TrimapParams::with_scale(0.0).radius(BoundaryClass::Hair), 1);
    }

    #[test]
    fn class_hints() {
        let m = rect(12, 12, 2, 2, 10, 10);
        let fur = classify_boundary(&m, ClassHint::Fur).unwrap();
        assert_eq!(fur.count(BoundaryClass::Fur), boundary(&m).count());
        assert_eq!(fur.count(BoundaryClass::Solid), 0);
        let solid = classify_boundary(&m, ClassHint::None).unwrap();
        assert_eq!(solid.count(BoundaryClass::Solid), boundary(&m).count());
        assert!(matches!(
            ClassHint::from_inputs(Some(&m), true),
            Err(Error::ConflictingClassHints)
        ));
        let other = BinaryMask::filled(5, 5, true).unwrap();
        assert!(matches!(
            classify_boundary(&m, ClassHint::Hair(&other)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Nearest labeled parsing pixel by exhaustive search, ties to hair.
    fn brute_hair(parsing: &BinaryMask, x: usize, y: usize) -> bool {
        let (mut best_hair, mut best_other) = (i64::MAX, i64::MAX);
        for qy in 0..parsing.height() {
            for qx in 0..parsing.width() {
                let d = (qx as i64 - x as i64).pow(2) + (qy as i64 - y as i64).pow(2);
                if parsing.get(qx, qy) {
                    best_hair = best_hair.min(d);
                } else {
                    best_other = best_other.min(d);
                }
            }
        }
        best_hair <= best_other
    }

    #[test]
    fn hair_covering_top_half() {
        let (w, h) = (20, 20);
        let m = rect(w, h, 4, 3, 16, 17);
        let parsing = BinaryMask::from_fn(w, h, |_, y| y < h / 2).unwrap();
        let classes = classify_boundary(&m, ClassHint::Hair(&parsing)).unwrap();
        let edge = boundary(&m);
        for y in 0..h {
            for x in 0..w {
                let expected = match (edge.get(x, y), brute_hair(&parsing, x, y)) {
                    (false, _) => BoundaryClass::None,
                    (true, true) => BoundaryClass::Hair,
                    (true, false) => BoundaryClass::Solid,
                };
                assert_eq!(classes.get(x, y), expected, "({x},{y})");
                if edge.get(x, y) {
                    assert_eq!(expected == BoundaryClass::Hair, y < h / 2);
                }
            }
        }
    }

    #[test]
    fn all_hair_parsing_labels_every_edge_pixel() {
        let m = rect(8, 8, 2, 2, 6, 6);
        let parsing = BinaryMask::filled(8, 8, true).unwrap();
        let classes = classify_boundary(&m, ClassHint::Hair(&parsing)).unwrap();
        assert_eq!(classes.count(BoundaryClass::Hair), boundary(&m).count());
    }

    #[test]
    fn empty_mask_gives_all_background() {
        let m = BinaryMask::filled(10, 10, false).unwrap();
        let classes = classify_boundary(&m, ClassHint::Fur).unwrap();
        let t = adaptive_trimap(&m, &classes, &TrimapParams::for_mask(&m)).unwrap();
        assert_eq!(t.count(TrimapClass::Background), 100);
    }

    #[test]
    fn straight_edge_band_width() {
        // vertical edge between columns 49 and 50 of a half-plane mask kept off
        // the frame on the other three sides by a wide margin
        let (w, h) = (120, 240);
        let m = rect(w, h, 10, 10, 50, 230);
        let classes = classify_boundary(&m, ClassHint::None).unwrap();
        for scale in [40.0, 200.0, 400.0] {
            let params = TrimapParams::with_scale(scale);
            let r = params.radius(BoundaryClass::Solid) as i64;
            let t = adaptive_trimap(&m, &classes, &params).unwrap();
            let y = 120;
            let run = (0..w)
                .filter(|&x| x > 30 && t.get(x, y) == TrimapClass::Unknown)
                .count() as i64;
            assert!(
                (run - (2 * r + 1)).abs() <= 1,
                "scale {scale}: run {run}, r {r}"
            );
        }
    }

    #[test]
    fn class_bands_are_ordered() {
        let m = disk(321, 150.0);
        let params = TrimapParams::for_mask(&m);
        assert!(
            params.radius(BoundaryClass::Hair) > params.radius(BoundaryClass::Fur)
                && params.radius(BoundaryClass::Fur) > params.radius(BoundaryClass::Solid)
        );
        let widths: Vec<usize> = [ClassHint::Hair(&m), ClassHint::Fur, ClassHint::None]
            .into_iter()
            .map(|hint| {
                let c = classify_boundary(&m, hint).unwrap();
                adaptive_trimap(&m, &c, &params)
                    .unwrap()
                    .count(TrimapClass::Unknown)
            })
            .collect();
        assert!(widths[0] > widths[1] && widths[1] > widths[2], "{widths:?}");
    }

    #[test]
    fn conventional_binary_alpha_band() {
        let alpha = AlphaMatte::from_fn(40, 40, |x, _| if x < 20 { 1.0 } else { 0.0 }).unwrap();
        let t = conventional_trimap(&alpha, 3).unwrap();
        for x in 0..40 {
            let expected = if (17..23).contains(&x) {
                TrimapClass::Unknown
            } else if (3..17).contains(&x) {
                TrimapClass::Foreground
            } else if x < 3 {
                // frame erosion on the left edge
                TrimapClass::Unknown
            } else {
                TrimapClass::Background
            };
            assert_eq!(t.get(x, 20), expected, "x={x}");
        }
    }

    #[test]
    fn conventional_constant_alpha() {
        let alpha = AlphaMatte::filled(30, 20, 1.0).unwrap();
        let t = conventional_trimap(&alpha, 2).unwrap();
        for y in 0..20 {
            for x in 0..30 {
                let inner = (2..28).contains(&x) && (2..18).contains(&y);
                let expect = if inner {
                    TrimapClass::Foreground
                } else {
                    TrimapClass::Unknown
                };
                assert_eq!(t.get(x, y), expect);
            }
        }
    }

    #[test]
    fn conventional_isolated_partial_pixel() {
        let alpha =
            AlphaMatte::from_fn(9, 9, |x, y| if (x, y) == (4, 4) { 0.5 } else { 0.0 }).unwrap();
        let t = conventional_trimap(&alpha, 1).unwrap();
        let u = t.unknown();
        assert_eq!(u.count(), 5);
        for (x, y) in [(4, 4), (3, 4), (5, 4), (4, 3), (4, 5)] {
            assert!(u.get(x, y));
        }
        assert!(conventional_trimap(&alpha, 0).is_err());
    }

    #[test]
    fn noisy_trimap_determinism() {
        let alpha = AlphaMatte::from_fn(48, 48, |x, y| ((x + y) as f64 / 94.0).min(1.0)).unwrap();
        assert_eq!(
            noisy_trimap(&alpha, 17, 5, 5).unwrap(),
            conventional_trimap(&alpha, 5).unwrap()
        );
        assert_eq!(
            noisy_trimap(&alpha, 3, 3, 25).unwrap(),
            noisy_trimap(&alpha, 3, 3, 25).unwrap()
        );
        assert!(noisy_kernel_radius(0, 4, 3).is_err());
        assert!(noisy_kernel_radius(0, 0, 3).is_err());
    }

    #[test]
    fn noisy_radius_is_roughly_uniform() {
        let (lo, hi) = (3u32, 25u32);
        let bins = (hi - lo + 1) as usize;
        let mut counts = vec![0usize; bins];
        for seed in 0..100 {
            let k = noisy_kernel_radius(seed, lo, hi).unwrap();
            counts[(k - lo) as usize] += 1;
        }
        let expected = 100.0 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 22 degrees of freedom, 99.9th percentile
        assert!(chi2 < 48.27, "chi-square {chi2}, counts {counts:?}");
    }

    fn blob_strategy() -> impl Strategy<Value = BinaryMask> {
        (4usize..20, 4usize..20, 4usize..14, 4usize..14).prop_map(|(x0, y0, w, h)| {
            BinaryMask::from_fn(40, 40, |x, y| {
                (x0..x0 + w).contains(&x) && (y0..y0 + h).contains(&y) && (x * 7 + y * 3) % 11 != 0
            })
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn trimap_invariants(m in blob_strategy(), fur in any::<bool>(), scale in 0.0f64..400.0) {
            let hint = if fur { ClassHint::Fur } else { ClassHint::None };
            let classes = classify_boundary(&m, hint).unwrap();
            let params = TrimapParams::with_scale(scale);
            let t = adaptive_trimap(&m, &classes, &params).unwrap();
            prop_assert!(t.as_bytes().iter().all(|b| [0u8, 128, 255].contains(b)));
            prop_assert!(boundary(&m).is_subset_of(&t.unknown()));
            let larger = adaptive_trimap(&m, &classes, &TrimapParams::with_scale(scale + 37.0)).unwrap();
            prop_assert!(t.unknown().is_subset_of(&larger.unknown()));
        }
    }
}
