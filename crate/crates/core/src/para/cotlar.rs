//! Almost-orthogonal block decomposition of the composed paraproduct: the
//! operator `f ↦ Π(g, P_M f)` where `P_M` projects one axis onto the
//! dyadic level band `[2^M - 1, 2^{M+1} - 2]`. The bands partition the
//! nonnegative levels, so blocks with different indices have exactly
//! orthogonal ranges of `P_M` and `T_M T_{M'}^* = 0`.

use super::paraproduct;
use crate::error::Result;
use crate::expansion::HaarExpansion;

/// The level band of block `m`: `[2^m - 1, 2^{m+1} - 2]`.
pub fn cotlar_band(m: usize) -> (usize, usize) {
    ((1usize << m) - 1, (1usize << (m + 1)) - 2)
}

/// Number of blocks with a nonempty band below `depth`.
pub fn cotlar_band_count(depth: usize) -> usize {
    (0..).take_while(|&m| cotlar_band(m).0 < depth).count()
}

/// Apply the block `T_M f = Π(g, P_M f)` for a precomposed symbol `g`.
pub fn cotlar_block_apply(
    g: &HaarExpansion,
    f: &HaarExpansion,
    m: usize,
    axis: usize,
) -> Result<HaarExpansion> {
    let (lo, hi) = cotlar_band(m);
    let banded = f.axis_band(axis, lo, hi)?;
    paraproduct(g, &banded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::rng::{derive_rng, random_expansion};

    #[test]
    fn bands_partition_levels() {
        for depth in 1..=6 {
            let count = cotlar_band_count(depth);
            let mut covered = vec![false; depth];
            for m in 0..count {
                let (lo, hi) = cotlar_band(m);
                for (level, seen) in covered.iter_mut().enumerate() {
                    if level >= lo && level <= hi {
                        assert!(!*seen, "bands overlap at level {level}");
                        *seen = true;
                    }
                }
            }
            assert!(covered.iter().all(|&c| c), "bands miss a level at depth {depth}");
        }
    }

    #[test]
    fn band_sum_is_axis_tail() {
        let shape = Shape::uniform(2, 3).unwrap();
        let mut rng = derive_rng(55, "cotlar-band", 0);
        let f = random_expansion(&shape, &mut rng, false);
        let mut sum = HaarExpansion::zeros(shape.clone());
        for m in 0..cotlar_band_count(3) {
            let (lo, hi) = cotlar_band(m);
            sum = sum.add(&f.axis_band(0, lo, hi).unwrap()).unwrap();
        }
        assert!(sum.max_abs_diff(&f.axis_tail(0, 0).unwrap()) == 0.0);
    }

    #[test]
    fn blocks_with_distinct_bands_are_range_orthogonal() {
        // T_M T_{M'}^* = 0 exactly: P_M P_{M'} annihilates everything.
        let shape = Shape::uniform(2, 3).unwrap();
        let mut rng = derive_rng(56, "cotlar-ortho", 0);
        let f = random_expansion(&shape, &mut rng, false);
        let banded = f.axis_band(0, cotlar_band(1).0, cotlar_band(1).1).unwrap();
        let double = banded.axis_band(0, cotlar_band(0).0, cotlar_band(0).1).unwrap();
        assert_eq!(double.l2_norm_sq(), 0.0);
    }
}
