//! The nine-term decomposition of pointwise multiplication in two
//! parameters.
//!
//! Grouping the matrix elements of multiplication by the per-axis relation
//! between the symbol's and the argument's Haar indices (symbol finer /
//! equal / coarser, with mean directions counted as coarsest) yields nine
//! operators of the bilinear family. Their sum reproduces the product up
//! to the channels in which both factors are means along some axis; those
//! are restored by `mean_channel_correction`.

use super::{bilinear_apply, SignSpec};
use crate::error::{Error, Result};
use crate::expansion::{haar_inverse, HaarExpansion};
use crate::signal::{pointwise_product, GridSignal};
use serde::{Deserialize, Serialize};

/// Names of the nine two-parameter product terms. `Para` marks an axis on
/// which the symbol is finer, `Diag` an axis with equal indices, `Avg` an
/// axis on which the symbol is averaged.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum NineTerm {
    /// Symbol finer on both axes: the main paraproduct.
    Para,
    /// Equal indices on both axes: the diagonal paraproduct.
    Diag,
    /// Finer on axis 0, equal on axis 1.
    ParaDiag,
    /// Equal on axis 0, finer on axis 1.
    DiagPara,
    /// Averaged on axis 0, equal on axis 1.
    AvgDiag,
    /// Equal on axis 0, averaged on axis 1.
    DiagAvg,
    /// Finer on axis 0, averaged on axis 1.
    ParaAvg,
    /// Averaged on axis 0, finer on axis 1.
    AvgPara,
    /// Averaged on both axes.
    AvgAvg,
}

impl NineTerm {
    pub const ALL: [NineTerm; 9] = [
        NineTerm::Para,
        NineTerm::Diag,
        NineTerm::ParaDiag,
        NineTerm::DiagPara,
        NineTerm::AvgDiag,
        NineTerm::DiagAvg,
        NineTerm::ParaAvg,
        NineTerm::AvgPara,
        NineTerm::AvgAvg,
    ];

    /// Per-axis pairing pattern (two parameters).
    pub fn spec(&self) -> SignSpec {
        // Axis letters: P = (ε,δ,β) = (0,1,0), D = (0,0,1), A = (1,0,0).
        let p = (false, true, false);
        let d = (false, false, true);
        let a = (true, false, false);
        let (x, y) = match self {
            NineTerm::Para => (p, p),
            NineTerm::Diag => (d, d),
            NineTerm::ParaDiag => (p, d),
            NineTerm::DiagPara => (d, p),
            NineTerm::AvgDiag => (a, d),
            NineTerm::DiagAvg => (d, a),
            NineTerm::ParaAvg => (p, a),
            NineTerm::AvgPara => (a, p),
            NineTerm::AvgAvg => (a, a),
        };
        SignSpec::new(vec![x.0, y.0], vec![x.1, y.1], vec![x.2, y.2]).expect("fixed lengths")
    }

    pub fn apply(&self, symbol: &HaarExpansion, input: &HaarExpansion) -> Result<HaarExpansion> {
        if symbol.shape().n_params() != 2 {
            return Err(Error::InvalidArgument(
                "the nine-term decomposition is two-parameter".into(),
            ));
        }
        bilinear_apply(&self.spec(), symbol, input)
    }
}

/// All nine terms with their pairing patterns.
pub fn nine_terms() -> Vec<(NineTerm, SignSpec)> {
    NineTerm::ALL.iter().map(|t| (*t, t.spec())).collect()
}

/// Extract the channel of `exp` whose index is `Mean` on `axis`.
fn mean_channel(exp: &HaarExpansion, axis: usize) -> HaarExpansion {
    let mut out = HaarExpansion::zeros(exp.shape().clone());
    for (flat, &c) in exp.coeffs().iter().enumerate() {
        if c != 0.0 && exp.axis_indices(flat)[axis].level().is_none() {
            out.coeffs_mut()[flat] = c;
        }
    }
    out
}

/// The product channels the nine rectangle-indexed terms do not carry:
/// both factors' mean channels per axis, with the doubly-counted global
/// mean product removed.
pub fn mean_channel_correction(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
) -> Result<GridSignal> {
    symbol.shape().check_same(input.shape())?;
    if symbol.shape().n_params() != 2 {
        return Err(Error::InvalidArgument(
            "the nine-term decomposition is two-parameter".into(),
        ));
    }
    let mut acc = GridSignal::zeros(symbol.shape().clone());
    for axis in 0..2 {
        let a = haar_inverse(&mean_channel(symbol, axis));
        let b = haar_inverse(&mean_channel(input, axis));
        acc = acc.add(&pointwise_product(&a, &b)?)?;
    }
    let mean_prod =
        symbol.coeffs()[0] * input.coeffs()[0]; // both global means
    let shape = symbol.shape().clone();
    acc.add(&GridSignal::constant(shape, -mean_prod))
}

/// Sum of the nine terms plus the mean-channel corrections, synthesized on
/// the grid; equals the pointwise product of the two synthesized signals.
pub fn product_reconstruction(
    symbol: &HaarExpansion,
    input: &HaarExpansion,
) -> Result<GridSignal> {
    let mut acc = mean_channel_correction(symbol, input)?;
    for (_, spec) in nine_terms() {
        let term = bilinear_apply(&spec, symbol, input)?;
        acc = acc.add(&haar_inverse(&term))?;
    }
    Ok(acc)
}
