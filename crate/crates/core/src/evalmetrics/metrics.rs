//! Pixel-wise error sums.

use crate::error::{Error, Result};
use crate::imgcore::{ensure_same_dims, AlphaMatte, BinaryMask, GrayMap};

/// Indices a metric is summed over.
pub(crate) fn region_indices<'a>(
    n: usize,
    region: Option<&'a BinaryMask>,
) -> Box<dyn Iterator<Item = usize> + 'a> {
    match region {
        None => Box::new(0..n),
        Some(m) => Box::new(
            m.as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i),
        ),
    }
}

pub(crate) fn check_inputs(a: &GrayMap, b: &GrayMap, region: Option<&BinaryMask>) -> Result<()> {
    ensure_same_dims(a, b)?;
    if let Some(m) = region {
        ensure_same_dims(a, m)?;
    }
    Ok(())
}

/// Sum of absolute differences over `region` (all pixels when `None`).
pub fn sad(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&BinaryMask>) -> Result<f64> {
    check_inputs(pred, gt, region)?;
    let (p, g) = (pred.as_slice(), gt.as_slice());
    Ok(region_indices(p.len(), region)
        .map(|i| (p[i] - g[i]).abs())
        .sum())
}

/// Mean squared error over `region`.
pub fn mse(pred: &AlphaMatte, gt: &AlphaMatte, region: Option<&BinaryMask>) -> Result<f64> {
    check_inputs(pred, gt, region)?;
    let (p, g) = (pred.as_slice(), gt.as_slice());
    let (sum, n) = region_indices(p.len(), region).fold((0.0, 0usize), |(s, n), i| {
        (s + (p[i] - g[i]).powi(2), n + 1)
    });
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matte(v: Vec<f64>) -> AlphaMatte {
        AlphaMatte::from_vec(v.len(), 1, v).unwrap()
    }

    #[test]
    fn trivial_values() {
        let one = AlphaMatte::filled(10, 10, 1.0).unwrap();
        let zero = AlphaMatte::filled(10, 10, 0.0).unwrap();
        assert_eq!(sad(&one, &zero, None).unwrap(), 100.0);
        assert_eq!(sad(&one, &one, None).unwrap(), 0.0);
        let a = AlphaMatte::filled(4, 4, 0.3).unwrap();
        let b = AlphaMatte::filled(4, 4, 0.4).unwrap();
        assert!((mse(&a, &b, None).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn region_handling() {
        let p = matte(vec![0.0, 1.0, 0.5]);
        let g = matte(vec![0.0, 0.0, 0.0]);
        let m = BinaryMask::from_vec(3, 1, vec![false, false, true]).unwrap();
        assert_eq!(sad(&p, &g, Some(&m)).unwrap(), 0.5);
        assert_eq!(mse(&p, &g, Some(&m)).unwrap(), 0.25);
        let empty = BinaryMask::filled(3, 1, false).unwrap();
        assert!(matches!(mse(&p, &g, Some(&empty)), Err(Error::EmptyRegion)));
        assert_eq!(sad(&p, &g, Some(&empty)).unwrap(), 0.0);
        let wrong = BinaryMask::filled(2, 1, true).unwrap();
        assert!(sad(&p, &g, Some(&wrong)).is_err());
        assert!(sad(&p, &matte(vec![0.0; 4]), None).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_scaling(
            v in proptest::collection::vec((0.0f64..0.5, 0.0f64..0.5, any::<bool>()), 1..64),
            c in 0.0f64..2.0,
        ) {
            let n = v.len();
            let p = matte(v.iter().map(|t| t.0).collect());
            let g = matte(v.iter().map(|t| t.1).collect());
            let m = BinaryMask::from_vec(n, 1, v.iter().map(|t| t.2).collect()).unwrap();
            let base = sad(&p, &g, Some(&m)).unwrap();
            prop_assert_eq!(base, sad(&g, &p, Some(&m)).unwrap());
            prop_assert!(sad(&p, &g, None).unwrap() >= base);
            // scale the difference around gt, staying in [0, 1]
            let scaled = matte(v.iter().map(|t| t.1 + c * (t.0 - t.1) / 2.0 + 0.25).collect());
            let shifted = matte(v.iter().map(|t| t.1 + 0.25).collect());
            let half = matte(v.iter().map(|t| t.1 + (t.0 - t.1) / 2.0 + 0.25).collect());
            let lhs = sad(&scaled, &shifted, Some(&m)).unwrap();
            let rhs = c * sad(&half, &shifted, Some(&m)).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
            if base == 0.0 {
                prop_assert_eq!(mse(&p, &g, Some(&m)).unwrap_or(0.0), 0.0);
            }
        }
    }
}
