//! Level compression along one axis: the nonlinear coefficient map that
//! leaves levels below `k` alone, gathers the l2 mass of levels `>= k` in
//! each level-`k` subtree onto the level-`k` slot, and zeroes everything
//! deeper. Mean directions on the compressed axis pass through unchanged.

use crate::error::{Error, Result};
use crate::expansion::{for_each_line, HaarExpansion};

pub fn level_compress(exp: &HaarExpansion, axis: usize, k: usize) -> Result<HaarExpansion> {
    exp.shape().check_axis(axis)?;
    let depth = exp.shape().depth(axis);
    if k >= depth {
        return Err(Error::LevelOutOfRange { level: k, depth });
    }
    let shape = exp.shape().clone();
    let mut data = exp.coeffs().to_vec();
    for_each_line(&mut data, &shape, axis, |line| {
        // Subtree sums of squares rooted at each level-k slot.
        let mut sq = vec![0.0f64; 1 << k];
        for j in k..depth {
            for kk in 0..(1usize << j) {
                let c = line[(1 << j) + kk];
                sq[kk >> (j - k)] += c * c;
            }
        }
        for j in k..depth {
            for kk in 0..(1usize << j) {
                line[(1 << j) + kk] = 0.0;
            }
        }
        for (kk, &s) in sq.iter().enumerate() {
            line[(1 << k) + kk] = s.sqrt();
        }
    });
    HaarExpansion::from_coeffs(shape, data)
}
