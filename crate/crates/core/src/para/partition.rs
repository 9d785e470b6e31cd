//! The partition paraproducts that only appear with three or more
//! parameters: the axes split into a detail/indicator/averaged triple.

use super::{bilinear_apply, SignSpec};
use crate::error::{Error, Result};
use crate::expansion::HaarExpansion;
use serde::{Deserialize, Serialize};

/// A partition of the axis set into three disjoint nonempty groups:
/// `detail_axes` carry the output wavelet with the input averaged,
/// `indicator_axes` carry the normalized indicator with equal pairing, and
/// `averaged_axes` carry the output wavelet with the symbol averaged.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub detail_axes: Vec<usize>,
    pub indicator_axes: Vec<usize>,
    pub averaged_axes: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(
        detail_axes: Vec<usize>,
        indicator_axes: Vec<usize>,
        averaged_axes: Vec<usize>,
    ) -> Result<Self> {
        let spec = Self { detail_axes, indicator_axes, averaged_axes };
        spec.validate_internal()?;
        Ok(spec)
    }

    fn validate_internal(&self) -> Result<()> {
        if self.detail_axes.is_empty()
            || self.indicator_axes.is_empty()
            || self.averaged_axes.is_empty()
        {
            return Err(Error::InvalidPartition("all three groups must be nonempty".into()));
        }
        let mut all: Vec<usize> = self
            .detail_axes
            .iter()
            .chain(&self.indicator_axes)
            .chain(&self.averaged_axes)
            .copied()
            .collect();
        all.sort_unstable();
        let n = all.len();
        if all.iter().enumerate().any(|(i, &a)| a != i) {
            return Err(Error::InvalidPartition(format!(
                "groups must partition 0..{n} without repeats"
            )));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.detail_axes.len() + self.indicator_axes.len() + self.averaged_axes.len()
    }

    /// Axes carrying a shift in the iterated commutator (detail and
    /// averaged groups).
    pub fn shifted_axes(&self) -> Vec<usize> {
        let mut axes: Vec<usize> =
            self.detail_axes.iter().chain(&self.averaged_axes).copied().collect();
        axes.sort_unstable();
        axes
    }

    /// The bilinear pattern of the operator.
    pub fn sign_spec(&self) -> SignSpec {
        let n = self.n_params();
        let mut eps = vec![false; n];
        let mut delta = vec![false; n];
        let mut beta = vec![false; n];
        for &a in &self.detail_axes {
            delta[a] = true; // input averaged, output wavelet
        }
        for &a in &self.indicator_axes {
            beta[a] = true; // equal pairing, indicator output
        }
        for &a in &self.averaged_axes {
            eps[a] = true; // symbol averaged, output wavelet
        }
        SignSpec::new(eps, delta, beta).expect("consistent lengths")
    }
}

/// Apply the partition paraproduct: per detail axis the symbol pairs by
/// detail and the input by mean, per indicator axis both pair by detail
/// with indicator output, per averaged axis the symbol pairs by mean and
/// the input by detail.
pub fn partition_paraproduct(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
    spec: &PartitionSpec,
) -> Result<HaarExpansion> {
    if spec.n_params() != symbol.shape().n_params() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} axes, expansion has {}",
            spec.n_params(),
            symbol.shape().n_params()
        )));
    }
    bilinear_apply(&spec.sign_spec(), symbol, input)
}
